//! Modality-aware dynamic tokenization for mixed scientific text.
//!
//! Plain prose, SMILES molecules, nucleotide sequences, and protein sequences
//! are detected inside one input string, tokenized with per-modality subword
//! vocabularies that draw from disjoint global id partitions, and decoded
//! losslessly. On top of the tokenizer sit compression-ratio benchmarking and
//! the variable-length balanced packing strategy for building load-balanced
//! training batches.
//!
//! ```
//! use scitok::detector::{segment, DetectorConfig};
//! use scitok::vocab::{assemble, Vocabulary};
//! use scitok::codec::{encode, decode};
//! use scitok::Modality;
//!
//! let vs = assemble(vec![
//!     Vocabulary::from_parts(Modality::Text, scitok::vocab::byte_alphabet(), vec![]).unwrap(),
//!     Vocabulary::char_level(Modality::Smiles, "C1()=ONc".chars()),
//!     Vocabulary::char_level(Modality::Nucleotide, "ACGTUN".chars()),
//!     Vocabulary::char_level(Modality::Protein, "ACDEFGHIKLMNPQRSTVWYX".chars()),
//! ])
//! .unwrap();
//!
//! let text = "solvent <SMILES>C1CCCCC1</SMILES> was added";
//! let seg = segment(text, &DetectorConfig::default()).unwrap();
//! let seq = encode(&seg, &vs).unwrap();
//! assert_eq!(decode(&seq, &vs).unwrap(), text);
//! ```

pub mod codec;
pub mod detector;
pub mod metrics;
pub mod modality;
pub mod packer;
pub mod vocab;

pub use codec::{decode, encode, token_count, CodecError, TokenSequence};
pub use detector::{segment, DetectError, DetectorConfig, SegmentedText, Span, SpanOrigin};
pub use modality::Modality;
pub use vocab::{assemble, SpecialToken, VocabError, Vocabulary, VocabularySet};
