//! The four input kinds the tokenizer distinguishes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Input modality of a span. Every span carries exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Modality {
    Text,
    Smiles,
    Nucleotide,
    Protein,
}

impl Modality {
    /// All modalities in partition order (TEXT first, then the scientific ones).
    pub const ALL: [Modality; 4] = [
        Modality::Text,
        Modality::Smiles,
        Modality::Nucleotide,
        Modality::Protein,
    ];

    pub fn is_scientific(self) -> bool {
        self != Modality::Text
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Text => "TEXT",
            Modality::Smiles => "SMILES",
            Modality::Nucleotide => "NUCLEOTIDE",
            Modality::Protein => "PROTEIN",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown modality {0:?} (expected TEXT, SMILES, NUCLEOTIDE or PROTEIN)")]
pub struct ParseModalityError(pub String);

impl FromStr for Modality {
    type Err = ParseModalityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "TEXT" => Ok(Modality::Text),
            "SMILES" => Ok(Modality::Smiles),
            "NUCLEOTIDE" => Ok(Modality::Nucleotide),
            "PROTEIN" => Ok(Modality::Protein),
            other => Err(ParseModalityError(other.to_string())),
        }
    }
}
