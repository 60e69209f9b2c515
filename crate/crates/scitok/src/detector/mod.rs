//! Scientific-span detection: explicit tags, heuristic rules, and the total
//! segmentation of an input string into modality-labeled spans.
//!
//! All offsets in the public types count Unicode scalar values, matching the
//! character convention of the compression-ratio metric. Detection itself
//! runs on bytes internally and converts at the boundary.

mod config;
mod smiles;

pub use config::{ConfigError, DetectorConfig};
pub use smiles::validate_smiles;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::modality::Modality;

/// How a span was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpanOrigin {
    /// From an explicit `<SMILES>`/`<FASTA>` tag pair.
    Tag,
    /// From rule-based detection.
    Heuristic,
    /// Gap-filling TEXT.
    Default,
}

impl SpanOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            SpanOrigin::Tag => "TAG",
            SpanOrigin::Heuristic => "HEURISTIC",
            SpanOrigin::Default => "DEFAULT",
        }
    }
}

/// Character ranges of the literal tag delimiters around a TAG span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagDelims {
    /// Range of the opening tag, e.g. `<SMILES>`.
    pub open: (usize, usize),
    /// Range of the closing tag, e.g. `</SMILES>`.
    pub close: (usize, usize),
}

/// A contiguous modality-labeled region. `start..end` covers the payload
/// only; for TAG spans the delimiter extents are recorded separately so the
/// segmentation still covers every character of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    /// Payload start, in Unicode scalar values (inclusive).
    pub start: usize,
    /// Payload end, in Unicode scalar values (exclusive).
    pub end: usize,
    pub modality: Modality,
    pub origin: SpanOrigin,
    delims: Option<TagDelims>,
}

impl Span {
    /// A span without tag delimiters (TEXT or heuristic).
    pub fn new(start: usize, end: usize, modality: Modality, origin: SpanOrigin) -> Span {
        Span {
            start,
            end,
            modality,
            origin,
            delims: None,
        }
    }

    pub fn tagged(start: usize, end: usize, modality: Modality, delims: TagDelims) -> Span {
        Span {
            start,
            end,
            modality,
            origin: SpanOrigin::Tag,
            delims: Some(delims),
        }
    }

    pub fn delims(&self) -> Option<TagDelims> {
        self.delims
    }

    /// Start of the span including its opening delimiter, if any.
    pub fn effective_start(&self) -> usize {
        self.delims.map_or(self.start, |d| d.open.0)
    }

    /// End of the span including its closing delimiter, if any.
    pub fn effective_end(&self) -> usize {
        self.delims.map_or(self.end, |d| d.close.1)
    }

    /// Payload length in characters.
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Why a tagged region was demoted to TEXT during segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarnReason {
    /// `<FASTA>` payload fits neither the nucleotide nor the protein alphabet.
    UnclassifiableFasta,
    /// Tag pair with nothing between the delimiters.
    EmptyTagPayload,
}

/// Non-fatal diagnostic attached to a segmentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagWarning {
    /// Character offset of the opening delimiter.
    pub offset: usize,
    pub reason: WarnReason,
}

/// An input string partitioned into contiguous, non-overlapping spans whose
/// union (delimiters included) covers the whole text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedText {
    text: String,
    spans: Vec<Span>,
    byte_ranges: Vec<SpanBytes>,
    warnings: Vec<TagWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SpanBytes {
    payload: (usize, usize),
    open: Option<(usize, usize)>,
    close: Option<(usize, usize)>,
}

impl SegmentedText {
    /// Builds and validates a segmentation from char-offset spans.
    pub fn new(text: impl Into<String>, spans: Vec<Span>) -> Result<SegmentedText, DetectError> {
        let text = text.into();
        let byte_ranges = byte_ranges_for(&text, &spans)?;
        let seg = SegmentedText {
            text,
            spans,
            byte_ranges,
            warnings: Vec::new(),
        };
        seg.validate()?;
        Ok(seg)
    }

    fn validate(&self) -> Result<(), DetectError> {
        let total = self.text.chars().count();
        let err = |msg: String| Err(DetectError::InvalidSegmentation(msg));
        if self.spans.is_empty() {
            if total != 0 {
                return err("non-empty text with no spans".into());
            }
            return Ok(());
        }
        let mut cursor = 0usize;
        for (i, span) in self.spans.iter().enumerate() {
            if span.start >= span.end {
                return err(format!("span {i} is empty"));
            }
            if let Some(d) = span.delims {
                if d.open.0 >= d.open.1 || d.open.1 != span.start || d.close.0 != span.end {
                    return err(format!("span {i} has inconsistent delimiters"));
                }
                if d.close.0 >= d.close.1 {
                    return err(format!("span {i} has inconsistent delimiters"));
                }
            }
            if span.effective_start() != cursor {
                return err(format!(
                    "span {i} starts at {}, expected {cursor}",
                    span.effective_start()
                ));
            }
            cursor = span.effective_end();
        }
        if cursor != total {
            return err(format!("spans cover [0, {cursor}), text has {total} chars"));
        }
        Ok(())
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn warnings(&self) -> &[TagWarning] {
        &self.warnings
    }

    /// Payload text of span `i`.
    pub fn span_text(&self, i: usize) -> &str {
        let (b0, b1) = self.byte_ranges[i].payload;
        &self.text[b0..b1]
    }

    /// Concatenation of every span's full extent (delimiters included);
    /// equals the source text for any valid segmentation.
    pub fn reconstruct(&self) -> String {
        let mut out = String::with_capacity(self.text.len());
        for b in &self.byte_ranges {
            if let Some((o0, o1)) = b.open {
                out.push_str(&self.text[o0..o1]);
            }
            out.push_str(&self.text[b.payload.0..b.payload.1]);
            if let Some((c0, c1)) = b.close {
                out.push_str(&self.text[c0..c1]);
            }
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("unbalanced {kind} tag at character {offset}")]
    UnbalancedTag { kind: TagKind, offset: usize },
    #[error("nested {kind} tag at character {offset}")]
    NestedTag { kind: TagKind, offset: usize },
    #[error("invalid segmentation: {0}")]
    InvalidSegmentation(String),
}

/// The two tag families recognized in input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagKind {
    Smiles,
    Fasta,
}

impl TagKind {
    fn open_lit(self) -> &'static str {
        match self {
            TagKind::Smiles => "<SMILES>",
            TagKind::Fasta => "<FASTA>",
        }
    }

    fn close_lit(self) -> &'static str {
        match self {
            TagKind::Smiles => "</SMILES>",
            TagKind::Fasta => "</FASTA>",
        }
    }
}

impl std::fmt::Display for TagKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TagKind::Smiles => "SMILES",
            TagKind::Fasta => "FASTA",
        })
    }
}

// ---------------------------------------------------------------------------
// tag scanning (byte offsets)

#[derive(Debug, Clone, Copy)]
struct RawRegion {
    kind: TagKind,
    open: (usize, usize),
    payload: (usize, usize),
    close: (usize, usize),
}

enum RawEvent {
    Open(TagKind, usize, usize),
    Close(TagKind, usize, usize),
}

fn match_tag(text: &str, at: usize) -> Option<RawEvent> {
    let rest = &text[at..];
    for kind in [TagKind::Smiles, TagKind::Fasta] {
        let open = kind.open_lit();
        if rest.starts_with(open) {
            return Some(RawEvent::Open(kind, at, at + open.len()));
        }
        let close = kind.close_lit();
        if rest.starts_with(close) {
            return Some(RawEvent::Close(kind, at, at + close.len()));
        }
    }
    None
}

/// Scans for well-formed tag regions. Same-kind nesting and unbalanced tags
/// are errors (byte offsets; callers convert to chars); tags of the *other*
/// kind inside an open region are treated as payload characters.
fn scan_tags(text: &str) -> Result<Vec<RawRegion>, (TagKind, usize, bool)> {
    let bytes = text.as_bytes();
    let mut regions = Vec::new();
    let mut inside: Option<(TagKind, (usize, usize))> = None;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            i += 1;
            continue;
        }
        let Some(event) = match_tag(text, i) else {
            i += 1;
            continue;
        };
        match event {
            RawEvent::Open(kind, s, e) => match inside {
                None => {
                    inside = Some((kind, (s, e)));
                    i = e;
                }
                Some((open_kind, _)) if kind == open_kind => return Err((kind, s, true)),
                // other-kind tag inside a payload: plain characters
                Some(_) => i = e,
            },
            RawEvent::Close(kind, s, e) => match inside {
                None => return Err((kind, s, false)),
                Some((open_kind, open_range)) if kind == open_kind => {
                    regions.push(RawRegion {
                        kind,
                        open: open_range,
                        payload: (open_range.1, s),
                        close: (s, e),
                    });
                    inside = None;
                    i = e;
                }
                Some(_) => i = e,
            },
        }
    }
    if let Some((kind, (s, _))) = inside {
        return Err((kind, s, false));
    }
    Ok(regions)
}

// ---------------------------------------------------------------------------
// FASTA payload classification

fn is_nucleotide_char(c: char) -> bool {
    matches!(c, 'A' | 'C' | 'G' | 'T' | 'U' | 'N' | '-')
}

fn is_protein_char(c: char) -> bool {
    matches!(
        c,
        'A' | 'C'
            | 'D'
            | 'E'
            | 'F'
            | 'G'
            | 'H'
            | 'I'
            | 'K'
            | 'L'
            | 'M'
            | 'N'
            | 'P'
            | 'Q'
            | 'R'
            | 'S'
            | 'T'
            | 'V'
            | 'W'
            | 'Y'
            | 'X'
            | '-'
    )
}

/// Nucleotide when the payload stays inside {A,C,G,T,U,N,-}; protein when it
/// stays inside the amino-acid alphabet with at least one letter outside the
/// nucleotide set; otherwise unclassifiable.
fn classify_fasta(payload: &str) -> Option<Modality> {
    if payload.is_empty() {
        return None;
    }
    let mut protein_only = false;
    for c in payload.chars() {
        if is_nucleotide_char(c) {
            continue;
        }
        if is_protein_char(c) {
            protein_only = true;
        } else {
            return None;
        }
    }
    Some(if protein_only {
        Modality::Protein
    } else {
        Modality::Nucleotide
    })
}

// ---------------------------------------------------------------------------
// heuristic candidate detection (byte offsets within a slice)

fn in_smiles_run(c: char) -> bool {
    c.is_ascii_alphanumeric()
        || matches!(
            c,
            '[' | ']'
                | '('
                | ')'
                | '='
                | '#'
                | '$'
                | ':'
                | '/'
                | '\\'
                | '.'
                | '%'
                | '@'
                | '+'
                | '-'
        )
}

fn in_nucleotide_run(c: char) -> bool {
    matches!(c, 'A' | 'C' | 'G' | 'T' | 'U' | 'N')
}

fn in_protein_run(c: char) -> bool {
    c != '-' && is_protein_char(c)
}

fn has_structural_char(s: &str) -> bool {
    s.chars().any(|c| {
        c.is_ascii_digit() || matches!(c, '[' | ']' | '(' | ')' | '=' | '#' | '$' | '%' | '@')
    })
}

/// For candidates with no structural character, require a plain chain of
/// uppercase organic-subset atoms (C, N, O, ..., Cl, Br). Lowercase aromatic
/// chains are indistinguishable from English words at the surface level.
fn is_uppercase_organic_chain(s: &str) -> bool {
    let mut prev = '\0';
    for c in s.chars() {
        let ok = match c {
            'B' | 'C' | 'N' | 'O' | 'P' | 'S' | 'F' | 'I' => true,
            'l' => prev == 'C',
            'r' => prev == 'B',
            _ => false,
        };
        if !ok {
            return false;
        }
        prev = c;
    }
    true
}

/// True when the slice is one balanced `(...)` wrap around its whole body.
fn full_paren_wrap(s: &str) -> bool {
    let bytes = s.as_bytes();
    if bytes.first() != Some(&b'(') || bytes.last() != Some(&b')') {
        return false;
    }
    let mut depth = 0i32;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return i == bytes.len() - 1;
                }
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    false
}

/// Strips sentence punctuation that cannot begin or end a SMILES: leading and
/// trailing dot-disconnects and a parenthesis pair wrapping the whole run.
fn refine_smiles_range(text: &str, mut start: usize, mut end: usize) -> (usize, usize) {
    loop {
        let before = (start, end);
        while start < end && text.as_bytes()[start] == b'.' {
            start += 1;
        }
        while end > start && text.as_bytes()[end - 1] == b'.' {
            end -= 1;
        }
        if end > start && full_paren_wrap(&text[start..end]) {
            start += 1;
            end -= 1;
        }
        if (start, end) == before {
            return (start, end);
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    start: usize,
    end: usize,
    modality: Modality,
}

fn modality_priority(m: Modality) -> u8 {
    match m {
        Modality::Smiles => 0,
        Modality::Nucleotide => 1,
        Modality::Protein => 2,
        Modality::Text => 3,
    }
}

/// Maximal runs of `in_run` characters, returned as byte ranges.
fn char_runs(slice: &str, in_run: fn(char) -> bool) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut current: Option<usize> = None;
    for (i, c) in slice.char_indices() {
        if in_run(c) {
            current.get_or_insert(i);
        } else if let Some(s) = current.take() {
            runs.push((s, i));
        }
    }
    if let Some(s) = current {
        runs.push((s, slice.len()));
    }
    runs
}

/// Both run boundaries must sit on whitespace, punctuation, or the ends of
/// the slice; a letter or digit neighbor disqualifies the run.
fn bounded_by_separators(slice: &str, start: usize, end: usize) -> bool {
    let before_ok = slice[..start]
        .chars()
        .next_back()
        .is_none_or(|c| !c.is_alphanumeric());
    let after_ok = slice[end..]
        .chars()
        .next()
        .is_none_or(|c| !c.is_alphanumeric());
    before_ok && after_ok
}

fn candidates_in(slice: &str, rules: &DetectorConfig) -> Vec<Candidate> {
    let mut found = Vec::new();

    for (s, e) in char_runs(slice, in_smiles_run) {
        if !bounded_by_separators(slice, s, e) {
            continue;
        }
        let (s, e) = refine_smiles_range(slice, s, e);
        // ASCII run: byte length equals character length
        if e - s < rules.min_smiles_len {
            continue;
        }
        let run = &slice[s..e];
        if !validate_smiles(run) {
            continue;
        }
        if !has_structural_char(run) && !is_uppercase_organic_chain(run) {
            continue;
        }
        found.push(Candidate {
            start: s,
            end: e,
            modality: Modality::Smiles,
        });
    }

    for (s, e) in char_runs(slice, in_nucleotide_run) {
        if e - s >= rules.min_fasta_len && bounded_by_separators(slice, s, e) {
            found.push(Candidate {
                start: s,
                end: e,
                modality: Modality::Nucleotide,
            });
        }
    }

    for (s, e) in char_runs(slice, in_protein_run) {
        if e - s >= rules.min_protein_len
            && bounded_by_separators(slice, s, e)
            && slice[s..e].chars().any(|c| !in_nucleotide_run(c))
        {
            found.push(Candidate {
                start: s,
                end: e,
                modality: Modality::Protein,
            });
        }
    }

    resolve_overlaps(found)
}

/// Longest match wins; ties go to the earlier start, then to the modality
/// priority SMILES > NUCLEOTIDE > PROTEIN.
fn resolve_overlaps(mut candidates: Vec<Candidate>) -> Vec<Candidate> {
    candidates.sort_by(|a, b| {
        (b.end - b.start)
            .cmp(&(a.end - a.start))
            .then(a.start.cmp(&b.start))
            .then(modality_priority(a.modality).cmp(&modality_priority(b.modality)))
    });
    let mut accepted: Vec<Candidate> = Vec::new();
    for c in candidates {
        if accepted
            .iter()
            .all(|a| c.end <= a.start || c.start >= a.end)
        {
            accepted.push(c);
        }
    }
    accepted.sort_by_key(|c| c.start);
    accepted
}

// ---------------------------------------------------------------------------
// byte offset -> char offset conversion

fn char_offsets(text: &str, wanted: &BTreeSet<usize>) -> HashMap<usize, usize> {
    let mut map = HashMap::with_capacity(wanted.len());
    let mut chars = 0usize;
    let mut iter = wanted.iter().peekable();
    for (byte, _) in text.char_indices() {
        while let Some(&&w) = iter.peek() {
            if w <= byte {
                map.insert(w, chars);
                iter.next();
            } else {
                break;
            }
        }
        chars += 1;
    }
    for &w in iter {
        map.insert(w, chars);
    }
    map
}

fn byte_ranges_for(text: &str, spans: &[Span]) -> Result<Vec<SpanBytes>, DetectError> {
    // map char offsets back to byte offsets in a single walk
    let mut wanted = BTreeSet::new();
    for span in spans {
        wanted.insert(span.start);
        wanted.insert(span.end);
        if let Some(d) = span.delims {
            wanted.extend([d.open.0, d.open.1, d.close.0, d.close.1]);
        }
    }
    let mut map = HashMap::with_capacity(wanted.len());
    let mut iter = wanted.iter().peekable();
    for (chars, (byte, _)) in text.char_indices().enumerate() {
        if iter.peek() == Some(&&chars) {
            map.insert(chars, byte);
            iter.next();
        }
    }
    let total = text.chars().count();
    if iter.peek() == Some(&&total) {
        map.insert(total, text.len());
        iter.next();
    }
    if iter.next().is_some() {
        return Err(DetectError::InvalidSegmentation(
            "span offset beyond end of text".into(),
        ));
    }
    let get = |c: usize| map[&c];
    Ok(spans
        .iter()
        .map(|span| SpanBytes {
            payload: (get(span.start), get(span.end)),
            open: span.delims.map(|d| (get(d.open.0), get(d.open.1))),
            close: span.delims.map(|d| (get(d.close.0), get(d.close.1))),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// public operations

/// Finds every well-formed `<SMILES>…</SMILES>` and `<FASTA>…</FASTA>`
/// region. Spans cover the payload only, with the delimiter extents recorded
/// on the span; FASTA payloads are classified nucleotide vs protein by
/// alphabet. Unclassifiable or empty tag regions yield no span here (see
/// [`segment`], which demotes them to TEXT with a warning).
pub fn detect_tags(text: &str) -> Result<Vec<Span>, DetectError> {
    let (kept, _) = scan_and_classify(text)?;
    let mut wanted = BTreeSet::new();
    for (r, _) in &kept {
        wanted.extend([r.open.0, r.open.1, r.payload.1, r.close.1]);
    }
    let map = char_offsets(text, &wanted);
    Ok(kept
        .iter()
        .map(|(r, m)| {
            Span::tagged(
                map[&r.open.1],
                map[&r.payload.1],
                *m,
                TagDelims {
                    open: (map[&r.open.0], map[&r.open.1]),
                    close: (map[&r.payload.1], map[&r.close.1]),
                },
            )
        })
        .collect())
}

type Classified = (Vec<(RawRegion, Modality)>, Vec<(RawRegion, WarnReason)>);

fn scan_and_classify(text: &str) -> Result<Classified, DetectError> {
    let regions = scan_tags(text).map_err(|(kind, byte, nested)| {
        let offset = text[..byte].chars().count();
        if nested {
            DetectError::NestedTag { kind, offset }
        } else {
            DetectError::UnbalancedTag { kind, offset }
        }
    })?;
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for region in regions {
        let payload = &text[region.payload.0..region.payload.1];
        if payload.is_empty() {
            log::warn!("empty {} tag payload; region left as text", region.kind);
            rejected.push((region, WarnReason::EmptyTagPayload));
            continue;
        }
        match region.kind {
            TagKind::Smiles => kept.push((region, Modality::Smiles)),
            TagKind::Fasta => match classify_fasta(payload) {
                Some(m) => kept.push((region, m)),
                None => {
                    log::warn!("unclassifiable FASTA payload; region left as text");
                    rejected.push((region, WarnReason::UnclassifiableFasta));
                }
            },
        }
    }
    Ok((kept, rejected))
}

/// Rule-based detection over untagged text: maximal alphabet runs bounded by
/// whitespace/punctuation, length-thresholded per modality, with SMILES
/// candidates additionally passing [`validate_smiles`].
pub fn detect_heuristic(text: &str, rules: &DetectorConfig) -> Vec<Span> {
    let candidates = candidates_in(text, rules);
    let mut wanted = BTreeSet::new();
    for c in &candidates {
        wanted.insert(c.start);
        wanted.insert(c.end);
    }
    let map = char_offsets(text, &wanted);
    candidates
        .into_iter()
        .map(|c| {
            Span::new(
                map[&c.start],
                map[&c.end],
                c.modality,
                SpanOrigin::Heuristic,
            )
        })
        .collect()
}

/// Segments `text` into a total, non-overlapping span cover: tag regions
/// first, heuristic spans only in the gaps between them, TEXT everywhere
/// else. Adjacent TEXT gaps coalesce into one span.
pub fn segment(text: &str, rules: &DetectorConfig) -> Result<SegmentedText, DetectError> {
    #[derive(Debug)]
    struct Part {
        start: usize, // byte offsets; effective extent
        end: usize,
        payload: (usize, usize),
        modality: Modality,
        origin: SpanOrigin,
        delims: Option<((usize, usize), (usize, usize))>,
    }

    let (kept, rejected) = scan_and_classify(text)?;

    let mut parts: Vec<Part> = Vec::new();
    for (r, m) in &kept {
        parts.push(Part {
            start: r.open.0,
            end: r.close.1,
            payload: r.payload,
            modality: *m,
            origin: SpanOrigin::Tag,
            delims: Some((r.open, r.close)),
        });
    }
    // demoted tag regions stay opaque: no heuristic matching inside
    for (r, _) in &rejected {
        parts.push(Part {
            start: r.open.0,
            end: r.close.1,
            payload: (r.open.0, r.close.1),
            modality: Modality::Text,
            origin: SpanOrigin::Default,
            delims: None,
        });
    }
    parts.sort_by_key(|p| p.start);

    // heuristic + TEXT fill over the gaps between tag regions
    let mut filled: Vec<Part> = Vec::new();
    let mut cursor = 0usize;
    let gap_bounds: Vec<(usize, usize)> = {
        let mut gaps = Vec::new();
        for p in &parts {
            if cursor < p.start {
                gaps.push((cursor, p.start));
            }
            cursor = p.end;
        }
        if cursor < text.len() {
            gaps.push((cursor, text.len()));
        }
        gaps
    };
    for (g0, g1) in gap_bounds {
        let slice = &text[g0..g1];
        let candidates = if rules.enable_heuristics {
            candidates_in(slice, rules)
        } else {
            Vec::new()
        };
        let mut at = g0;
        for c in candidates {
            let (cs, ce) = (g0 + c.start, g0 + c.end);
            if at < cs {
                filled.push(text_part(at, cs));
            }
            filled.push(Part {
                start: cs,
                end: ce,
                payload: (cs, ce),
                modality: c.modality,
                origin: SpanOrigin::Heuristic,
                delims: None,
            });
            at = ce;
        }
        if at < g1 {
            filled.push(text_part(at, g1));
        }
    }

    fn text_part(start: usize, end: usize) -> Part {
        Part {
            start,
            end,
            payload: (start, end),
            modality: Modality::Text,
            origin: SpanOrigin::Default,
            delims: None,
        }
    }

    parts.extend(filled);
    parts.sort_by_key(|p| p.start);

    // merge adjacent default TEXT parts
    let mut merged: Vec<Part> = Vec::new();
    for p in parts {
        if let Some(last) = merged.last_mut() {
            if last.origin == SpanOrigin::Default
                && p.origin == SpanOrigin::Default
                && last.end == p.start
            {
                last.end = p.end;
                last.payload.1 = p.payload.1;
                continue;
            }
        }
        merged.push(p);
    }

    // byte offsets -> char offsets
    let mut wanted = BTreeSet::new();
    for p in &merged {
        wanted.extend([p.payload.0, p.payload.1]);
        if let Some((o, c)) = p.delims {
            wanted.extend([o.0, o.1, c.0, c.1]);
        }
    }
    for (r, _) in &rejected {
        wanted.insert(r.open.0);
    }
    let map = char_offsets(text, &wanted);

    let mut spans = Vec::with_capacity(merged.len());
    let mut byte_ranges = Vec::with_capacity(merged.len());
    for p in &merged {
        let delims = p.delims.map(|(o, c)| TagDelims {
            open: (map[&o.0], map[&o.1]),
            close: (map[&c.0], map[&c.1]),
        });
        spans.push(Span {
            start: map[&p.payload.0],
            end: map[&p.payload.1],
            modality: p.modality,
            origin: p.origin,
            delims,
        });
        byte_ranges.push(SpanBytes {
            payload: p.payload,
            open: p.delims.map(|(o, _)| o),
            close: p.delims.map(|(_, c)| c),
        });
    }
    let warnings = rejected
        .iter()
        .map(|(r, reason)| TagWarning {
            offset: map[&r.open.0],
            reason: *reason,
        })
        .collect();

    let seg = SegmentedText {
        text: text.to_string(),
        spans,
        byte_ranges,
        warnings,
    };
    debug_assert!(seg.validate().is_ok(), "segment produced invalid cover");
    Ok(seg)
}
