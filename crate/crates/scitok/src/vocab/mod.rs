//! Per-modality subword vocabularies and their assembly into one global
//! vocabulary with disjoint id partitions ("orthogonal" embedding spaces).
//!
//! Global id layout is fixed: the eight special tokens occupy ids `0..8`,
//! followed by contiguous partitions for TEXT, SMILES, NUCLEOTIDE and
//! PROTEIN, in that order. A token's global id is its partition offset plus
//! its dense local id, so no id ever belongs to two modalities.

mod bytes;
mod trainer;

pub use bytes::{byte_alphabet, byte_to_char, char_to_byte};
pub use trainer::{train_bpe, TrainError};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modality::Modality;

/// Vocab file schema version.
pub const FORMAT_VERSION: u32 = 1;

/// Per-modality unknown symbol; always part of a non-empty scientific
/// alphabet so encoding can substitute it for out-of-alphabet characters.
pub const UNKNOWN_SYMBOL: char = '\u{FFFD}';

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("{modality} alphabet: {reason}")]
    InvalidAlphabet { modality: Modality, reason: String },
    #[error("{modality} merge #{index}: {reason}")]
    InvalidMerge {
        modality: Modality,
        index: usize,
        reason: String,
    },
    #[error("duplicate vocabulary for modality {0}")]
    DuplicateModality(Modality),
    #[error("missing vocabulary for modality {0}")]
    MissingModality(Modality),
    #[error("cannot access vocab file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("vocab file is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("vocab file: {0}")]
    Format(String),
}

// ---------------------------------------------------------------------------
// special tokens

/// The fixed specials block at global ids `0..8`: padding, unknown, and an
/// open/close pair per scientific modality. Both FASTA-derived modalities
/// render the literal `<FASTA>` tags; their token ids stay distinct so the
/// token stream preserves which alphabet the payload used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpecialToken {
    Pad,
    Unk,
    SmilesOpen,
    SmilesClose,
    NucleotideOpen,
    NucleotideClose,
    ProteinOpen,
    ProteinClose,
}

impl SpecialToken {
    pub const ALL: [SpecialToken; 8] = [
        SpecialToken::Pad,
        SpecialToken::Unk,
        SpecialToken::SmilesOpen,
        SpecialToken::SmilesClose,
        SpecialToken::NucleotideOpen,
        SpecialToken::NucleotideClose,
        SpecialToken::ProteinOpen,
        SpecialToken::ProteinClose,
    ];

    pub const COUNT: u32 = 8;

    pub fn global_id(self) -> u32 {
        Self::ALL.iter().position(|&s| s == self).unwrap() as u32
    }

    pub fn from_global_id(id: u32) -> Option<SpecialToken> {
        Self::ALL.get(id as usize).copied()
    }

    /// Unique name, used as the key in vocab files.
    pub fn name(self) -> &'static str {
        match self {
            SpecialToken::Pad => "<PAD>",
            SpecialToken::Unk => "<UNK>",
            SpecialToken::SmilesOpen => "<SMILES>",
            SpecialToken::SmilesClose => "</SMILES>",
            SpecialToken::NucleotideOpen => "<FASTA:NUCLEOTIDE>",
            SpecialToken::NucleotideClose => "</FASTA:NUCLEOTIDE>",
            SpecialToken::ProteinOpen => "<FASTA:PROTEIN>",
            SpecialToken::ProteinClose => "</FASTA:PROTEIN>",
        }
    }

    /// Literal text the token decodes to.
    pub fn surface(self) -> &'static str {
        match self {
            SpecialToken::Pad => "<PAD>",
            SpecialToken::Unk => "<UNK>",
            SpecialToken::SmilesOpen => "<SMILES>",
            SpecialToken::SmilesClose => "</SMILES>",
            SpecialToken::NucleotideOpen | SpecialToken::ProteinOpen => "<FASTA>",
            SpecialToken::NucleotideClose | SpecialToken::ProteinClose => "</FASTA>",
        }
    }

    pub fn open_for(m: Modality) -> Option<SpecialToken> {
        match m {
            Modality::Text => None,
            Modality::Smiles => Some(SpecialToken::SmilesOpen),
            Modality::Nucleotide => Some(SpecialToken::NucleotideOpen),
            Modality::Protein => Some(SpecialToken::ProteinOpen),
        }
    }

    pub fn close_for(m: Modality) -> Option<SpecialToken> {
        match m {
            Modality::Text => None,
            Modality::Smiles => Some(SpecialToken::SmilesClose),
            Modality::Nucleotide => Some(SpecialToken::NucleotideClose),
            Modality::Protein => Some(SpecialToken::ProteinClose),
        }
    }

    /// The modality whose spans this tag token wraps, if it is a tag token.
    pub fn tag_modality(self) -> Option<Modality> {
        match self {
            SpecialToken::Pad | SpecialToken::Unk => None,
            SpecialToken::SmilesOpen | SpecialToken::SmilesClose => Some(Modality::Smiles),
            SpecialToken::NucleotideOpen | SpecialToken::NucleotideClose => {
                Some(Modality::Nucleotide)
            }
            SpecialToken::ProteinOpen | SpecialToken::ProteinClose => Some(Modality::Protein),
        }
    }
}

// ---------------------------------------------------------------------------
// single-modality vocabulary

/// One modality's token table: an initial alphabet plus an ordered merge
/// list. Local ids are dense, alphabet symbols first, then one id per merge.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    modality: Modality,
    alphabet: Vec<String>,
    merges: Vec<(String, String)>,
    token_strs: Vec<String>,
    token_ids: HashMap<String, u32>,
    /// (left id, right id) -> (merge rank, output id)
    merge_table: HashMap<(u32, u32), (u32, u32)>,
    char_ids: HashMap<char, u32>,
    unknown_id: Option<u32>,
    /// TEXT only: byte value -> local id.
    byte_ids: Vec<Option<u32>>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.modality == other.modality
            && self.alphabet == other.alphabet
            && self.merges == other.merges
    }
}

impl Vocabulary {
    /// Builds a vocabulary from its serialized parts, enforcing invariants:
    /// unique symbols, merge operands that exist by the time the merge runs,
    /// and unique merge outputs. TEXT alphabet symbols must come from the
    /// byte alphabet (the trainer always emits all 256, keeping encoding
    /// total on arbitrary input); non-empty scientific alphabets are single
    /// characters and must include [`UNKNOWN_SYMBOL`].
    pub fn from_parts(
        modality: Modality,
        alphabet: Vec<String>,
        merges: Vec<(String, String)>,
    ) -> Result<Vocabulary, VocabError> {
        let alpha_err = |reason: String| VocabError::InvalidAlphabet { modality, reason };
        if modality == Modality::Text {
            for sym in &alphabet {
                let mut chars = sym.chars();
                let mapped = chars
                    .next()
                    .filter(|_| chars.next().is_none())
                    .and_then(char_to_byte);
                if mapped.is_none() {
                    return Err(alpha_err(format!(
                        "symbol {sym:?} is not a byte-alphabet character"
                    )));
                }
            }
        } else if !alphabet.is_empty() {
            if !alphabet.iter().any(|s| s == &UNKNOWN_SYMBOL.to_string()) {
                return Err(alpha_err(format!(
                    "missing the unknown symbol {UNKNOWN_SYMBOL:?}"
                )));
            }
            if let Some(bad) = alphabet.iter().find(|s| s.chars().count() != 1) {
                return Err(alpha_err(format!(
                    "symbol {bad:?} is not a single character"
                )));
            }
        }
        if alphabet.is_empty() && !merges.is_empty() {
            return Err(alpha_err("merges present but alphabet is empty".into()));
        }

        let mut token_strs: Vec<String> = Vec::with_capacity(alphabet.len() + merges.len());
        let mut token_ids = HashMap::with_capacity(alphabet.len() + merges.len());
        for sym in &alphabet {
            if sym.is_empty() {
                return Err(alpha_err("empty symbol".into()));
            }
            if token_ids
                .insert(sym.clone(), token_strs.len() as u32)
                .is_some()
            {
                return Err(alpha_err(format!("duplicate symbol {sym:?}")));
            }
            token_strs.push(sym.clone());
        }

        let mut merge_table = HashMap::with_capacity(merges.len());
        for (index, (left, right)) in merges.iter().enumerate() {
            let merge_err = |reason: String| VocabError::InvalidMerge {
                modality,
                index,
                reason,
            };
            let &l = token_ids
                .get(left)
                .ok_or_else(|| merge_err(format!("left operand {left:?} is not a token")))?;
            let &r = token_ids
                .get(right)
                .ok_or_else(|| merge_err(format!("right operand {right:?} is not a token")))?;
            let out = format!("{left}{right}");
            let out_id = token_strs.len() as u32;
            if token_ids.insert(out.clone(), out_id).is_some() {
                return Err(merge_err(format!("output {out:?} already exists")));
            }
            token_strs.push(out);
            if merge_table.insert((l, r), (index as u32, out_id)).is_some() {
                return Err(merge_err("duplicate merge pair".into()));
            }
        }

        let char_ids = alphabet
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let mut chars = s.chars();
                let c = chars.next()?;
                chars.next().is_none().then_some((c, i as u32))
            })
            .collect::<HashMap<char, u32>>();
        let unknown_id = char_ids.get(&UNKNOWN_SYMBOL).copied();
        let byte_ids = if modality == Modality::Text {
            let mut table = vec![None; 256];
            for (c, &id) in &char_ids {
                if let Some(b) = char_to_byte(*c) {
                    table[b as usize] = Some(id);
                }
            }
            table
        } else {
            Vec::new()
        };

        Ok(Vocabulary {
            modality,
            alphabet,
            merges,
            token_strs,
            token_ids,
            merge_table,
            char_ids,
            unknown_id,
            byte_ids,
        })
    }

    /// A merge-free vocabulary over the given characters plus the unknown
    /// symbol. Scientific modalities only; TEXT is always byte-level.
    pub fn char_level(modality: Modality, chars: impl IntoIterator<Item = char>) -> Vocabulary {
        assert!(
            modality.is_scientific(),
            "char_level is for scientific modalities; TEXT is byte-level"
        );
        let set: BTreeSet<char> = chars
            .into_iter()
            .chain(std::iter::once(UNKNOWN_SYMBOL))
            .collect();
        let alphabet = set.into_iter().map(String::from).collect();
        Vocabulary::from_parts(modality, alphabet, Vec::new())
            .expect("sorted deduplicated char alphabet is valid")
    }

    /// A zero-token vocabulary for an untrained modality.
    pub fn empty(modality: Modality) -> Vocabulary {
        Vocabulary::from_parts(modality, Vec::new(), Vec::new())
            .expect("the empty vocabulary is valid")
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    /// Number of tokens (alphabet symbols plus merges).
    pub fn len(&self) -> usize {
        self.token_strs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_strs.is_empty()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn token_str(&self, local_id: u32) -> Option<&str> {
        self.token_strs.get(local_id as usize).map(String::as_str)
    }

    pub fn local_id(&self, token: &str) -> Option<u32> {
        self.token_ids.get(token).copied()
    }

    pub(crate) fn merge_table(&self) -> &HashMap<(u32, u32), (u32, u32)> {
        &self.merge_table
    }

    pub(crate) fn char_id(&self, c: char) -> Option<u32> {
        self.char_ids.get(&c).copied()
    }

    pub(crate) fn byte_id(&self, b: u8) -> Option<u32> {
        self.byte_ids.get(b as usize).copied().flatten()
    }

    pub(crate) fn unknown_id(&self) -> Option<u32> {
        self.unknown_id
    }
}

// ---------------------------------------------------------------------------
// assembled vocabulary set

/// Contiguous global-id range owned by one modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub id_offset: u32,
    pub size: u32,
}

impl Partition {
    pub fn contains(&self, global_id: u32) -> bool {
        global_id >= self.id_offset && global_id < self.id_offset + self.size
    }
}

/// A resolved global id: either one of the fixed specials or a regular token
/// in some modality's partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolvedToken {
    Special(SpecialToken),
    Regular { modality: Modality, local_id: u32 },
}

/// One vocabulary per modality plus the disjoint global id partition map.
/// Immutable once assembled; share freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct VocabularySet {
    vocabularies: BTreeMap<Modality, Vocabulary>,
    partitions: BTreeMap<Modality, Partition>,
    total_size: u32,
}

/// Assembles exactly one vocabulary per modality into a [`VocabularySet`],
/// assigning contiguous partitions in the fixed order specials, TEXT,
/// SMILES, NUCLEOTIDE, PROTEIN.
pub fn assemble(vocabularies: Vec<Vocabulary>) -> Result<VocabularySet, VocabError> {
    let mut by_modality: BTreeMap<Modality, Vocabulary> = BTreeMap::new();
    for vocab in vocabularies {
        let m = vocab.modality();
        if by_modality.insert(m, vocab).is_some() {
            return Err(VocabError::DuplicateModality(m));
        }
    }
    for m in Modality::ALL {
        if !by_modality.contains_key(&m) {
            return Err(VocabError::MissingModality(m));
        }
    }

    let mut partitions = BTreeMap::new();
    let mut offset = SpecialToken::COUNT;
    for m in Modality::ALL {
        let size = by_modality[&m].len() as u32;
        partitions.insert(
            m,
            Partition {
                id_offset: offset,
                size,
            },
        );
        offset += size;
    }
    Ok(VocabularySet {
        vocabularies: by_modality,
        partitions,
        total_size: offset,
    })
}

impl VocabularySet {
    pub fn vocabulary(&self, m: Modality) -> &Vocabulary {
        &self.vocabularies[&m]
    }

    pub fn partition(&self, m: Modality) -> Partition {
        self.partitions[&m]
    }

    /// Total id space size: specials plus every partition.
    pub fn total_size(&self) -> u32 {
        self.total_size
    }

    /// Global id of a modality-local token id.
    pub fn global_id(&self, m: Modality, local_id: u32) -> u32 {
        self.partitions[&m].id_offset + local_id
    }

    /// Maps a global id back to its owner, or `None` when out of range.
    pub fn resolve(&self, global_id: u32) -> Option<ResolvedToken> {
        if let Some(special) = SpecialToken::from_global_id(global_id) {
            return Some(ResolvedToken::Special(special));
        }
        for m in Modality::ALL {
            let p = self.partitions[&m];
            if p.contains(global_id) {
                return Some(ResolvedToken::Regular {
                    modality: m,
                    local_id: global_id - p.id_offset,
                });
            }
        }
        None
    }

    /// Special-token name -> global id, as stored in vocab files.
    pub fn specials() -> BTreeMap<String, u32> {
        SpecialToken::ALL
            .iter()
            .map(|s| (s.name().to_string(), s.global_id()))
            .collect()
    }

    /// Canonical JSON: UTF-8, sorted keys, stable formatting. Equal sets
    /// serialize to byte-identical strings.
    pub fn to_canonical_json(&self) -> String {
        let file = VocabFile {
            format_version: FORMAT_VERSION,
            modalities: self
                .vocabularies
                .iter()
                .map(|(m, v)| {
                    (
                        m.as_str().to_string(),
                        ModalityFile {
                            alphabet: v.alphabet.clone(),
                            merges: v.merges.clone(),
                        },
                    )
                })
                .collect(),
            partitions: self
                .partitions
                .iter()
                .map(|(m, p)| (m.as_str().to_string(), *p))
                .collect(),
            specials: Self::specials(),
        };
        let mut json = serde_json::to_string_pretty(&file).expect("vocab file serializes");
        json.push('\n');
        json
    }

    pub fn from_json(json: &str) -> Result<VocabularySet, VocabError> {
        let file: VocabFile = serde_json::from_str(json)?;
        if file.format_version != FORMAT_VERSION {
            return Err(VocabError::Format(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        if file.specials != Self::specials() {
            return Err(VocabError::Format(
                "specials table does not match this tool's fixed specials".into(),
            ));
        }
        let mut vocabularies = Vec::with_capacity(Modality::ALL.len());
        for (name, entry) in file.modalities {
            let modality: Modality = name
                .parse()
                .map_err(|e| VocabError::Format(format!("{e}")))?;
            vocabularies.push(Vocabulary::from_parts(
                modality,
                entry.alphabet,
                entry.merges,
            )?);
        }
        let set = assemble(vocabularies)?;
        let declared: BTreeMap<Modality, Partition> = file
            .partitions
            .iter()
            .map(|(name, p)| {
                Ok((
                    name.parse()
                        .map_err(|e| VocabError::Format(format!("{e}")))?,
                    *p,
                ))
            })
            .collect::<Result<_, VocabError>>()?;
        if declared != set.partitions {
            return Err(VocabError::Format(
                "declared partitions do not match vocabulary sizes".into(),
            ));
        }
        Ok(set)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<(), VocabError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_canonical_json()).map_err(|source| VocabError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<VocabularySet, VocabError> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path).map_err(|source| VocabError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&json)
    }
}

#[derive(Serialize, Deserialize)]
struct VocabFile {
    format_version: u32,
    modalities: BTreeMap<String, ModalityFile>,
    partitions: BTreeMap<String, Partition>,
    specials: BTreeMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
struct ModalityFile {
    alphabet: Vec<String>,
    merges: Vec<(String, String)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sized_vocab(modality: Modality, size: usize) -> Vocabulary {
        // synthetic single-char alphabets of an exact token count
        if size == 0 {
            return Vocabulary::empty(modality);
        }
        let v = if modality == Modality::Text {
            let alphabet = byte_alphabet().into_iter().take(size).collect();
            Vocabulary::from_parts(modality, alphabet, vec![]).unwrap()
        } else {
            let base = 0x4E00 + 0x100 * modality as u32;
            let chars = (0..size as u32 - 1).map(|i| char::from_u32(base + i).unwrap());
            Vocabulary::char_level(modality, chars)
        };
        assert_eq!(v.len(), size);
        v
    }

    #[test]
    fn assemble_assigns_cumulative_offsets() {
        let vs = assemble(vec![
            sized_vocab(Modality::Text, 100),
            sized_vocab(Modality::Smiles, 50),
            sized_vocab(Modality::Nucleotide, 10),
            sized_vocab(Modality::Protein, 30),
        ])
        .unwrap();
        assert_eq!(vs.partition(Modality::Text).id_offset, 8);
        assert_eq!(vs.partition(Modality::Smiles).id_offset, 108);
        assert_eq!(vs.partition(Modality::Nucleotide).id_offset, 158);
        assert_eq!(vs.partition(Modality::Protein).id_offset, 168);
        assert_eq!(vs.total_size(), 198);
    }

    #[test]
    fn assemble_degenerate_single_token_set() {
        let vs = assemble(vec![
            sized_vocab(Modality::Text, 0),
            sized_vocab(Modality::Smiles, 1),
            sized_vocab(Modality::Nucleotide, 0),
            sized_vocab(Modality::Protein, 0),
        ])
        .unwrap();
        let p = vs.partition(Modality::Smiles);
        assert_eq!((p.id_offset, p.size), (SpecialToken::COUNT, 1));
        assert_eq!(vs.total_size(), SpecialToken::COUNT + 1);
    }

    #[test]
    fn assemble_rejects_duplicates_and_missing() {
        assert!(matches!(
            assemble(vec![
                sized_vocab(Modality::Smiles, 3),
                sized_vocab(Modality::Smiles, 3),
            ]),
            Err(VocabError::DuplicateModality(Modality::Smiles))
        ));
        assert!(matches!(
            assemble(vec![sized_vocab(Modality::Smiles, 3)]),
            Err(VocabError::MissingModality(_))
        ));
    }

    #[test]
    fn specials_occupy_the_first_eight_ids() {
        assert_eq!(SpecialToken::ALL.len(), 8);
        for (i, s) in SpecialToken::ALL.iter().enumerate() {
            assert_eq!(s.global_id(), i as u32);
            assert_eq!(SpecialToken::from_global_id(i as u32), Some(*s));
        }
        assert_eq!(SpecialToken::from_global_id(8), None);
    }

    #[test]
    fn fasta_specials_share_surface_but_not_name() {
        assert_eq!(SpecialToken::NucleotideOpen.surface(), "<FASTA>");
        assert_eq!(SpecialToken::ProteinOpen.surface(), "<FASTA>");
        assert_ne!(
            SpecialToken::NucleotideOpen.name(),
            SpecialToken::ProteinOpen.name()
        );
    }

    #[test]
    fn from_parts_validates_merges() {
        let alphabet = vec!["C".into(), "O".into(), UNKNOWN_SYMBOL.to_string()];
        let ok = Vocabulary::from_parts(
            Modality::Smiles,
            alphabet.clone(),
            vec![("C".into(), "C".into()), ("CC".into(), "O".into())],
        )
        .unwrap();
        assert_eq!(ok.len(), 5);
        assert_eq!(ok.token_str(4), Some("CCO"));

        let unknown_operand = Vocabulary::from_parts(
            Modality::Smiles,
            alphabet.clone(),
            vec![("C".into(), "N".into())],
        );
        assert!(matches!(
            unknown_operand,
            Err(VocabError::InvalidMerge { index: 0, .. })
        ));

        let dup_symbol = Vocabulary::from_parts(
            Modality::Smiles,
            vec!["C".into(), "C".into(), UNKNOWN_SYMBOL.to_string()],
            vec![],
        );
        assert!(matches!(
            dup_symbol,
            Err(VocabError::InvalidAlphabet { .. })
        ));
    }

    #[test]
    fn scientific_alphabet_requires_unknown_symbol() {
        let missing = Vocabulary::from_parts(Modality::Smiles, vec!["C".into()], vec![]);
        assert!(matches!(missing, Err(VocabError::InvalidAlphabet { .. })));
    }

    #[test]
    fn text_alphabet_symbols_come_from_the_byte_alphabet() {
        // raw space is not a byte-alphabet character (0x20 maps elsewhere)
        let bad = Vocabulary::from_parts(Modality::Text, vec![" ".into()], vec![]);
        assert!(matches!(bad, Err(VocabError::InvalidAlphabet { .. })));
        let multi = Vocabulary::from_parts(Modality::Text, vec!["ab".into()], vec![]);
        assert!(matches!(multi, Err(VocabError::InvalidAlphabet { .. })));
        assert!(Vocabulary::from_parts(Modality::Text, byte_alphabet(), vec![]).is_ok());
    }

    #[test]
    fn resolve_round_trips_every_id() {
        let vs = assemble(vec![
            sized_vocab(Modality::Text, 256),
            sized_vocab(Modality::Smiles, 7),
            sized_vocab(Modality::Nucleotide, 5),
            sized_vocab(Modality::Protein, 9),
        ])
        .unwrap();
        for id in 0..vs.total_size() {
            match vs.resolve(id).unwrap() {
                ResolvedToken::Special(s) => assert_eq!(s.global_id(), id),
                ResolvedToken::Regular { modality, local_id } => {
                    assert_eq!(vs.global_id(modality, local_id), id)
                }
            }
        }
        assert_eq!(vs.resolve(vs.total_size()), None);
    }

    #[test]
    fn canonical_json_round_trips_and_is_stable() {
        let vs = assemble(vec![
            Vocabulary::from_parts(Modality::Text, byte_alphabet(), vec![]).unwrap(),
            Vocabulary::from_parts(
                Modality::Smiles,
                vec!["C".into(), "O".into(), UNKNOWN_SYMBOL.to_string()],
                vec![("C".into(), "C".into())],
            )
            .unwrap(),
            Vocabulary::char_level(Modality::Nucleotide, "ACGT".chars()),
            Vocabulary::char_level(Modality::Protein, "MKT".chars()),
        ])
        .unwrap();
        let json = vs.to_canonical_json();
        let back = VocabularySet::from_json(&json).unwrap();
        assert_eq!(back, vs);
        assert_eq!(back.to_canonical_json(), json);
    }

    #[test]
    fn from_json_rejects_inconsistent_files() {
        let vs = assemble(vec![
            sized_vocab(Modality::Text, 0),
            sized_vocab(Modality::Smiles, 3),
            sized_vocab(Modality::Nucleotide, 0),
            sized_vocab(Modality::Protein, 0),
        ])
        .unwrap();
        let json = vs.to_canonical_json();
        let wrong_version = json.replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(matches!(
            VocabularySet::from_json(&wrong_version),
            Err(VocabError::Format(_))
        ));
        let wrong_offset = json.replace("\"id_offset\": 8", "\"id_offset\": 9");
        assert!(matches!(
            VocabularySet::from_json(&wrong_offset),
            Err(VocabError::Format(_))
        ));
    }
}
