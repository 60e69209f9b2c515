//! Characters-per-token compression statistics.
//!
//! The ratio aggregates then divides: total characters over the dataset
//! divided by total tokens, both in one sum, rather than a mean of
//! per-document ratios. Characters are Unicode scalar values of span
//! payloads (tag delimiters are markup, re-materialized from special tokens,
//! and contribute no characters); special tokens occupy model positions and
//! count toward the token total by default, configurable off for ablation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::{encode, CodecError};
use crate::detector::{segment, DetectError, DetectorConfig};
use crate::modality::Modality;
use crate::vocab::{ResolvedToken, VocabularySet};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("document #{index} is empty")]
    EmptyDocument { index: u64 },
    #[error("document #{index} tokenized to zero tokens")]
    ZeroTokens { index: u64 },
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("need at least two reports to compare, got {count}")]
    TooFewReports { count: usize },
    #[error("dataset fingerprint mismatch: {a} was measured on {a_fp}, {b} on {b_fp}")]
    FingerprintMismatch {
        a: String,
        a_fp: String,
        b: String,
        b_fp: String,
    },
    #[error("reports disagree on special-token counting; not comparable")]
    CountingMismatch,
}

/// Order-independent content hash of a document multiset. Per-document
/// SHA-256 digests are folded by lane-wise wrapping addition, so the
/// fingerprint is independent of document order, sensitive to duplicates,
/// and computable in constant memory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetFingerprint {
    lanes: [u64; 4],
    count: u64,
}

impl DatasetFingerprint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, doc: &str) {
        let digest = Sha256::digest(doc.as_bytes());
        for (lane, chunk) in self.lanes.iter_mut().zip(digest.chunks_exact(8)) {
            *lane = lane.wrapping_add(u64::from_le_bytes(chunk.try_into().unwrap()));
        }
        self.count += 1;
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(64);
        for lane in self.lanes {
            s.push_str(&format!("{lane:016x}"));
        }
        s
    }
}

/// Per-modality character/token attribution inside a [`CrReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalityStat {
    pub chars: u64,
    pub tokens: u64,
    pub cr: f64,
}

/// Compression-ratio report for one tokenizer over one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrReport {
    pub tokenizer_name: String,
    pub documents: u64,
    pub total_chars: u64,
    pub total_tokens: u64,
    pub cr: f64,
    pub per_modality: BTreeMap<Modality, ModalityStat>,
    pub dataset_fingerprint: String,
    pub count_specials: bool,
}

/// Options for [`compression_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrOptions {
    /// Count tag special tokens in the denominator (they occupy model
    /// positions). Off only for ablation.
    pub count_specials: bool,
}

impl Default for CrOptions {
    fn default() -> Self {
        CrOptions {
            count_specials: true,
        }
    }
}

/// Streaming accumulator behind [`compression_ratio`]; lets callers feed one
/// document at a time without materializing the dataset.
#[derive(Debug)]
pub struct CrAccumulator {
    name: String,
    opts: CrOptions,
    documents: u64,
    total_chars: u64,
    total_tokens: u64,
    per_modality: BTreeMap<Modality, (u64, u64)>,
    fingerprint: DatasetFingerprint,
    pub unknown_substitutions: u64,
}

impl CrAccumulator {
    pub fn new(tokenizer_name: impl Into<String>, opts: CrOptions) -> Self {
        CrAccumulator {
            name: tokenizer_name.into(),
            opts,
            documents: 0,
            total_chars: 0,
            total_tokens: 0,
            per_modality: BTreeMap::new(),
            fingerprint: DatasetFingerprint::new(),
            unknown_substitutions: 0,
        }
    }

    pub fn add_document(
        &mut self,
        text: &str,
        vs: &VocabularySet,
        rules: &DetectorConfig,
    ) -> Result<(), MetricsError> {
        let index = self.documents;
        if text.is_empty() {
            return Err(MetricsError::EmptyDocument { index });
        }
        let seg = segment(text, rules)?;
        let ts = encode(&seg, vs)?;
        self.unknown_substitutions += ts.unknown_substitutions;

        let mut doc_tokens = 0u64;
        for &id in &ts.ids {
            match vs.resolve(id).expect("encoder emits in-range ids") {
                ResolvedToken::Regular { modality, .. } => {
                    doc_tokens += 1;
                    self.per_modality.entry(modality).or_insert((0, 0)).1 += 1;
                }
                ResolvedToken::Special(s) => {
                    if self.opts.count_specials {
                        doc_tokens += 1;
                        if let Some(m) = s.tag_modality() {
                            self.per_modality.entry(m).or_insert((0, 0)).1 += 1;
                        }
                    }
                }
            }
        }
        if doc_tokens == 0 {
            return Err(MetricsError::ZeroTokens { index });
        }
        for span in seg.spans() {
            let chars = span.len() as u64;
            self.total_chars += chars;
            self.per_modality.entry(span.modality).or_insert((0, 0)).0 += chars;
        }
        self.total_tokens += doc_tokens;
        self.fingerprint.add(text);
        self.documents += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<CrReport, MetricsError> {
        if self.documents == 0 {
            return Err(MetricsError::EmptyDataset);
        }
        debug_assert!(self.total_tokens > 0);
        let per_modality = self
            .per_modality
            .into_iter()
            .map(|(m, (chars, tokens))| {
                (
                    m,
                    ModalityStat {
                        chars,
                        tokens,
                        cr: chars as f64 / tokens as f64,
                    },
                )
            })
            .collect();
        Ok(CrReport {
            tokenizer_name: self.name,
            documents: self.documents,
            total_chars: self.total_chars,
            total_tokens: self.total_tokens,
            cr: self.total_chars as f64 / self.total_tokens as f64,
            per_modality,
            dataset_fingerprint: self.fingerprint.to_hex(),
            count_specials: self.opts.count_specials,
        })
    }
}

/// Measures the compression ratio of the tokenizer `vs` (with detection
/// `rules`) over `dataset`: total payload characters divided by total
/// tokens, with a per-modality breakdown.
pub fn compression_ratio<S: AsRef<str>>(
    vs: &VocabularySet,
    rules: &DetectorConfig,
    dataset: &[S],
    tokenizer_name: &str,
    opts: CrOptions,
) -> Result<CrReport, MetricsError> {
    if dataset.is_empty() {
        return Err(MetricsError::EmptyDataset);
    }
    let mut acc = CrAccumulator::new(tokenizer_name, opts);
    for doc in dataset {
        acc.add_document(doc.as_ref(), vs, rules)?;
    }
    acc.finish()
}

/// One row of a [`ComparisonTable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrRow {
    pub tokenizer_name: String,
    pub total_chars: u64,
    pub total_tokens: u64,
    pub cr: f64,
}

/// Pairwise relative improvement `cr_a / cr_b - 1` between two rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrImprovement {
    pub a: String,
    pub b: String,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub dataset_fingerprint: String,
    pub count_specials: bool,
    /// Sorted descending by compression ratio.
    pub rows: Vec<CrRow>,
    /// One cell per unordered pair, in row order.
    pub improvements: Vec<CrImprovement>,
}

/// Compares two or more reports measured on the same dataset fingerprint.
pub fn compare(reports: &[CrReport]) -> Result<ComparisonTable, MetricsError> {
    if reports.len() < 2 {
        return Err(MetricsError::TooFewReports {
            count: reports.len(),
        });
    }
    let first = &reports[0];
    for r in &reports[1..] {
        if r.dataset_fingerprint != first.dataset_fingerprint {
            return Err(MetricsError::FingerprintMismatch {
                a: first.tokenizer_name.clone(),
                a_fp: first.dataset_fingerprint.clone(),
                b: r.tokenizer_name.clone(),
                b_fp: r.dataset_fingerprint.clone(),
            });
        }
        if r.count_specials != first.count_specials {
            return Err(MetricsError::CountingMismatch);
        }
    }
    let mut sorted: Vec<&CrReport> = reports.iter().collect();
    sorted.sort_by(|a, b| {
        b.cr.partial_cmp(&a.cr)
            .expect("cr is finite")
            .then_with(|| a.tokenizer_name.cmp(&b.tokenizer_name))
    });
    let rows = sorted
        .iter()
        .map(|r| CrRow {
            tokenizer_name: r.tokenizer_name.clone(),
            total_chars: r.total_chars,
            total_tokens: r.total_tokens,
            cr: r.cr,
        })
        .collect();
    let mut improvements = Vec::new();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            improvements.push(CrImprovement {
                a: sorted[i].tokenizer_name.clone(),
                b: sorted[j].tokenizer_name.clone(),
                relative: sorted[i].cr / sorted[j].cr - 1.0,
            });
        }
    }
    Ok(ComparisonTable {
        dataset_fingerprint: first.dataset_fingerprint.clone(),
        count_specials: first.count_specials,
        rows,
        improvements,
    })
}

impl ComparisonTable {
    /// Aligned plain-text rendering: one row per tokenizer plus the pairwise
    /// relative improvements.
    pub fn render_text(&self) -> String {
        let name_w = self
            .rows
            .iter()
            .map(|r| r.tokenizer_name.len())
            .chain(std::iter::once("tokenizer".len()))
            .max()
            .unwrap_or(9);
        let mut out = String::new();
        out.push_str(&format!(
            "{:<name_w$}  {:>12}  {:>12}  {:>8}\n",
            "tokenizer", "chars", "tokens", "cr"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<name_w$}  {:>12}  {:>12}  {:>8.4}\n",
                r.tokenizer_name, r.total_chars, r.total_tokens, r.cr
            ));
        }
        out.push('\n');
        for imp in &self.improvements {
            out.push_str(&format!(
                "{} vs {}: {:+.2}%\n",
                imp.a,
                imp.b,
                imp.relative * 100.0
            ));
        }
        out
    }
}
