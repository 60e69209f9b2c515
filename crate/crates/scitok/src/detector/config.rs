//! Detector configuration, loadable from a `key=value` text file.

use std::path::Path;

use thiserror::Error;

/// Thresholds and switches for heuristic span detection.
///
/// Immutable after construction; shared freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorConfig {
    /// Minimum run length for a heuristic SMILES candidate.
    pub min_smiles_len: usize,
    /// Minimum run length for a heuristic nucleotide candidate.
    pub min_fasta_len: usize,
    /// Minimum run length for a heuristic protein candidate.
    pub min_protein_len: usize,
    /// When false, only tagged regions are detected; everything else is TEXT.
    pub enable_heuristics: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            min_smiles_len: 6,
            min_fasta_len: 12,
            min_protein_len: 16,
            enable_heuristics: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read detector config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("detector config line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("detector config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("detector config line {line}: invalid value {value:?} for {key}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
}

impl DetectorConfig {
    /// Parses a plain-text config: one `key=value` per line, `#` comments and
    /// blank lines ignored. Unlisted keys keep their defaults.
    pub fn from_str_config(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = DetectorConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: trimmed.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            };
            match key {
                "min_smiles_len" => cfg.min_smiles_len = value.parse().map_err(|_| bad())?,
                "min_fasta_len" => cfg.min_fasta_len = value.parse().map_err(|_| bad())?,
                "min_protein_len" => cfg.min_protein_len = value.parse().map_err(|_| bad())?,
                "enable_heuristics" => cfg.enable_heuristics = value.parse().map_err(|_| bad())?,
                other => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str_config(&text)
    }
}
