//! Encoding a [`SegmentedText`] into one global token sequence and decoding
//! it back, losslessly for any input that needed no unknown substitutions.
//!
//! Each span is tokenized by its modality's vocabulary (greedy merge
//! application over the initial-alphabet symbolization), local ids are
//! offset into the global id space, and the per-span streams are
//! concatenated in span order. TAG-origin spans are wrapped in their
//! modality's open/close special tokens; heuristic spans get no delimiters,
//! so decoding reproduces the original untagged text exactly.

use thiserror::Error;

use crate::detector::{DetectError, DetectorConfig, SegmentedText, SpanOrigin};
use crate::modality::Modality;
use crate::vocab::{char_to_byte, ResolvedToken, SpecialToken, Vocabulary, VocabularySet};

#[derive(Debug, Error)]
pub enum CodecError {
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error("token id {id} at position {position} is outside every partition")]
    InvalidId { position: usize, id: u32 },
    #[error("the {0} vocabulary is empty; cannot encode a {0} span")]
    EmptyModalityVocabulary(Modality),
    #[error("byte 0x{byte:02x} has no symbol in the TEXT alphabet")]
    ByteOutsideTextAlphabet { byte: u8 },
    #[error("the {0} vocabulary has no unknown token to substitute")]
    NoUnknownToken(Modality),
    #[error("TEXT span carries tag delimiters")]
    TaggedTextSpan,
    #[error("decoded bytes are not valid UTF-8 (valid up to byte {valid_up_to})")]
    InvalidUtf8 { valid_up_to: usize },
}

/// Global token ids with per-token source character ranges. Special tokens
/// carry empty ranges anchored at their delimiter offsets; all other
/// alignments are sorted, disjoint payload ranges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    pub ids: Vec<u32>,
    pub alignments: Vec<(usize, usize)>,
    /// Out-of-alphabet characters replaced by a modality's unknown token.
    pub unknown_substitutions: u64,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// One symbol or merged token with its source range (byte-relative for TEXT,
/// char-relative for scientific spans) still attached.
#[derive(Debug, Clone, Copy)]
struct Sym {
    id: u32,
    start: usize,
    end: usize,
}

/// Repeatedly applies the lowest-rank merge present anywhere in the symbol
/// sequence, replacing left to right, until no trained merge applies. This
/// equals applying the merge list in training order.
fn apply_merges(syms: &mut Vec<Sym>, vocab: &Vocabulary) {
    let table = vocab.merge_table();
    if table.is_empty() {
        return;
    }
    loop {
        let mut best: Option<(u32, u32, (u32, u32))> = None;
        for w in syms.windows(2) {
            let pair = (w[0].id, w[1].id);
            if let Some(&(rank, out)) = table.get(&pair) {
                if best.is_none_or(|(r, _, _)| rank < r) {
                    best = Some((rank, out, pair));
                }
            }
        }
        let Some((_, out, pair)) = best else {
            return;
        };
        let mut merged = Vec::with_capacity(syms.len());
        let mut i = 0;
        while i < syms.len() {
            if i + 1 < syms.len() && syms[i].id == pair.0 && syms[i + 1].id == pair.1 {
                merged.push(Sym {
                    id: out,
                    start: syms[i].start,
                    end: syms[i + 1].end,
                });
                i += 2;
            } else {
                merged.push(syms[i]);
                i += 1;
            }
        }
        *syms = merged;
    }
}

/// Encodes a segmentation against an assembled vocabulary set.
pub fn encode(seg: &SegmentedText, vs: &VocabularySet) -> Result<TokenSequence, CodecError> {
    let mut out = TokenSequence::default();

    for (i, span) in seg.spans().iter().enumerate() {
        debug_assert_eq!(span.origin == SpanOrigin::Tag, span.delims().is_some());
        if let Some(d) = span.delims() {
            let open = SpecialToken::open_for(span.modality).ok_or(CodecError::TaggedTextSpan)?;
            out.ids.push(open.global_id());
            out.alignments.push((d.open.0, d.open.0));
        }

        let vocab = vs.vocabulary(span.modality);
        if vocab.is_empty() {
            return Err(CodecError::EmptyModalityVocabulary(span.modality));
        }
        let text = seg.span_text(i);
        let offset = vs.partition(span.modality).id_offset;

        if span.modality == Modality::Text {
            let mut syms = Vec::with_capacity(text.len());
            for (k, b) in text.bytes().enumerate() {
                let id = vocab
                    .byte_id(b)
                    .ok_or(CodecError::ByteOutsideTextAlphabet { byte: b })?;
                syms.push(Sym {
                    id,
                    start: k,
                    end: k + 1,
                });
            }
            apply_merges(&mut syms, vocab);
            // byte ranges -> char ranges: a char belongs to the token holding
            // its first byte, so ranges stay disjoint even when a token
            // boundary falls inside a multi-byte character
            let char_starts: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
            let ceil_char = |b: usize| char_starts.partition_point(|&cb| cb < b);
            for sym in syms {
                out.ids.push(offset + sym.id);
                out.alignments.push((
                    span.start + ceil_char(sym.start),
                    span.start + ceil_char(sym.end),
                ));
            }
        } else {
            let unknown = vocab.unknown_id();
            let mut syms = Vec::new();
            for (k, c) in text.chars().enumerate() {
                let id = match vocab.char_id(c) {
                    Some(id) => id,
                    None => {
                        out.unknown_substitutions += 1;
                        unknown.ok_or(CodecError::NoUnknownToken(span.modality))?
                    }
                };
                syms.push(Sym {
                    id,
                    start: k,
                    end: k + 1,
                });
            }
            apply_merges(&mut syms, vocab);
            for sym in syms {
                out.ids.push(offset + sym.id);
                out.alignments
                    .push((span.start + sym.start, span.start + sym.end));
            }
        }

        if let Some(d) = span.delims() {
            let close = SpecialToken::close_for(span.modality).ok_or(CodecError::TaggedTextSpan)?;
            out.ids.push(close.global_id());
            out.alignments.push((d.close.0, d.close.0));
        }
    }
    Ok(out)
}

/// Decodes a token sequence back to text, re-materializing tag delimiters
/// from the special tokens.
pub fn decode(ts: &TokenSequence, vs: &VocabularySet) -> Result<String, CodecError> {
    let mut bytes: Vec<u8> = Vec::new();
    for (position, &id) in ts.ids.iter().enumerate() {
        match vs.resolve(id) {
            None => return Err(CodecError::InvalidId { position, id }),
            Some(ResolvedToken::Special(s)) => bytes.extend_from_slice(s.surface().as_bytes()),
            Some(ResolvedToken::Regular { modality, local_id }) => {
                let token = vs
                    .vocabulary(modality)
                    .token_str(local_id)
                    .expect("resolved local id is in range");
                if modality == Modality::Text {
                    for c in token.chars() {
                        // alphabet validation guarantees a byte for every char
                        bytes.push(char_to_byte(c).expect("TEXT token chars map to bytes"));
                    }
                } else {
                    bytes.extend_from_slice(token.as_bytes());
                }
            }
        }
    }
    String::from_utf8(bytes).map_err(|e| CodecError::InvalidUtf8 {
        valid_up_to: e.utf8_error().valid_up_to(),
    })
}

/// Token count of `text` under segmentation and encoding: the `len(τ(s))`
/// of the compression-ratio formula.
pub fn token_count(
    text: &str,
    vs: &VocabularySet,
    rules: &DetectorConfig,
) -> Result<usize, CodecError> {
    let seg = crate::detector::segment(text, rules)?;
    Ok(encode(&seg, vs)?.len())
}
