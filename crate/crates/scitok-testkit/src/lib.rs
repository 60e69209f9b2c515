//! Seeded corpus generators and brute-force oracles shared by the scitok
//! test suites. Everything here is deterministic given a seed and kept
//! independent of the library's own code paths, so the oracles stay honest.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// SMILES generation
//
// Molecules are assembled from fragments that are each grammatically
// self-contained (rings open and close inside one fragment, bonds only
// inside motifs), so every output satisfies the SMILES surface grammar by
// construction. Weights favor carbon chains and common functional groups to
// give a BPE trainer realistic recurring motifs.

const ATOM_FRAGMENTS: &[(&str, u32)] = &[
    ("C", 30),
    ("CC", 14),
    ("CCC", 6),
    ("N", 8),
    ("O", 8),
    ("S", 3),
    ("F", 2),
    ("Cl", 3),
    ("Br", 2),
    ("I", 1),
];

const MOTIF_FRAGMENTS: &[(&str, u32)] = &[
    ("C(=O)O", 5),
    ("C(=O)N", 4),
    ("C(=O)", 3),
    ("C(C)C", 4),
    ("C(C)(C)C", 2),
    ("OC", 5),
    ("N(C)C", 2),
    ("C#N", 1),
    ("C=C", 3),
    ("C=O", 2),
    ("CCO", 3),
    ("OCC", 2),
    ("S(=O)(=O)N", 1),
    ("C(F)(F)F", 1),
];

const RING_FRAGMENTS: &[(&str, u32)] = &[
    ("c1ccccc1", 8),
    ("c1ccncc1", 3),
    ("c1ccc(C)cc1", 3),
    ("c1ccc(O)cc1", 2),
    ("c1ccc(Cl)cc1", 2),
    ("c1cco1", 1),
    ("c1cc[nH]c1", 1),
    ("C1CCCCC1", 3),
    ("C1CCNCC1", 2),
    ("C1CC1", 1),
    ("C1CCOC1", 1),
];

const BRACKET_FRAGMENTS: &[(&str, u32)] = &[
    ("[C@@H](C)", 2),
    ("[C@H](O)", 2),
    ("[N+](C)(C)C", 1),
    ("[13C]", 1),
];

const SALT_FRAGMENTS: &[(&str, u32)] = &[(".[Na+]", 1), (".[Cl-]", 1), (".[K+]", 1)];

fn pick_weighted<'a, R: Rng>(rng: &mut R, table: &[(&'a str, u32)]) -> &'a str {
    let total: u32 = table.iter().map(|(_, w)| w).sum();
    let mut roll = rng.gen_range(0..total);
    for (frag, w) in table {
        if roll < *w {
            return frag;
        }
        roll -= w;
    }
    unreachable!("weights sum to total")
}

/// One random molecule, between 6 and ~90 characters.
pub fn molecule<R: Rng>(rng: &mut R) -> String {
    let target = rng.gen_range(8..=60);
    let mut out = String::new();
    while out.len() < target {
        let class = rng.gen_range(0..100);
        let frag = if class < 45 {
            pick_weighted(rng, ATOM_FRAGMENTS)
        } else if class < 75 {
            pick_weighted(rng, MOTIF_FRAGMENTS)
        } else if class < 95 {
            pick_weighted(rng, RING_FRAGMENTS)
        } else {
            pick_weighted(rng, BRACKET_FRAGMENTS)
        };
        out.push_str(frag);
    }
    if out.len() < 6 {
        out.push_str("CCCCC");
    }
    if rng.gen_ratio(1, 20) {
        out.push_str(pick_weighted(rng, SALT_FRAGMENTS));
    }
    out
}

/// `n` distinct random molecules.
pub fn molecules(seed: u64, n: usize) -> Vec<String> {
    let mut rng = rng(seed);
    let mut seen = std::collections::HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let m = molecule(&mut rng);
        if seen.insert(m.clone()) {
            out.push(m);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// FASTA-style sequences

const DNA_LETTERS: &[u8] = b"ACGT";
const AMINO_LETTERS: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";

pub fn dna_sequence<R: Rng>(rng: &mut R, min_len: usize, max_len: usize) -> String {
    let len = rng.gen_range(min_len..=max_len);
    (0..len)
        .map(|_| {
            if rng.gen_ratio(1, 40) {
                'N'
            } else {
                DNA_LETTERS[rng.gen_range(0..DNA_LETTERS.len())] as char
            }
        })
        .collect()
}

/// A protein sequence starting with methionine, so at least one letter sits
/// outside the nucleotide alphabet and the run cannot read as a SMILES chain.
pub fn protein_sequence<R: Rng>(rng: &mut R, min_len: usize, max_len: usize) -> String {
    let len = rng.gen_range(min_len.max(2)..=max_len);
    let mut s = String::with_capacity(len);
    s.push('M');
    for _ in 1..len {
        s.push(AMINO_LETTERS[rng.gen_range(0..AMINO_LETTERS.len())] as char);
    }
    s
}

pub fn dna_sequences(seed: u64, n: usize) -> Vec<String> {
    let mut rng = rng(seed);
    (0..n).map(|_| dna_sequence(&mut rng, 12, 80)).collect()
}

pub fn protein_sequences(seed: u64, n: usize) -> Vec<String> {
    let mut rng = rng(seed);
    (0..n).map(|_| protein_sequence(&mut rng, 16, 60)).collect()
}

// ---------------------------------------------------------------------------
// prose

const WORDS: &[&str] = &[
    "the",
    "a",
    "of",
    "and",
    "to",
    "in",
    "was",
    "is",
    "for",
    "with",
    "that",
    "this",
    "which",
    "from",
    "under",
    "over",
    "into",
    "after",
    "before",
    "between",
    "sample",
    "solution",
    "mixture",
    "solvent",
    "reaction",
    "product",
    "yield",
    "measured",
    "observed",
    "reported",
    "dissolved",
    "stirred",
    "heated",
    "cooled",
    "filtered",
    "dried",
    "added",
    "removed",
    "analysis",
    "method",
    "result",
    "figure",
    "table",
    "value",
    "ratio",
    "model",
    "study",
    "protein",
    "molecule",
    "compound",
    "sequence",
    "residue",
    "enzyme",
    "binding",
    "structure",
    "crystal",
    "buffer",
    "gradient",
    "column",
    "phase",
    "signal",
    "spectrum",
    "peak",
    "temperature",
    "pressure",
    "minutes",
    "hours",
    "slowly",
    "rapidly",
    "finally",
    "however",
    "therefore",
    "moreover",
    "approximately",
    "roughly",
    "about",
    "nearly",
    "water",
    "ethanol",
    "reagent",
    "catalyst",
    "excess",
    "trace",
    "pure",
    "crude",
    "white",
    "yellow",
    "pale",
    "solid",
    "liquid",
    "powder",
    "film",
    "layer",
    "washed",
    "extracted",
    "evaporated",
    "naïve",
    "Schrödinger",
    "café",
    "Müller",
    "microscopy",
    "spectrometry",
    "chromatography",
    "assay",
    "dilution",
    "aliquot",
    "pipette",
    "flask",
    "vial",
    "overnight",
    "ambient",
    "nitrogen",
    "argon",
    "vacuum",
    "reflux",
    "quenched",
    "isolated",
    "purified",
    "characterized",
];

/// One prose sentence: capitalized first word, 4-12 words, occasional comma,
/// closing period.
pub fn sentence<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(4..=12);
    let words: Vec<&str> = (0..n)
        .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
        .collect();
    let mut chars = words[0].chars();
    let mut out: String = chars
        .next()
        .map(|c| c.to_uppercase().collect::<String>())
        .unwrap_or_default();
    out.push_str(chars.as_str());
    for (i, w) in words.iter().enumerate().skip(1) {
        if i > 1 && i + 1 < n && rng.gen_ratio(1, 8) {
            out.push(',');
        }
        out.push(' ');
        out.push_str(w);
    }
    out.push('.');
    out
}

pub fn sentences(seed: u64, n: usize) -> Vec<String> {
    let mut rng = rng(seed);
    (0..n).map(|_| sentence(&mut rng)).collect()
}

// ---------------------------------------------------------------------------
// mixed documents

/// Fixture pools a mixed-document generator draws from. Training vocabulary
/// corpora should come from the same pools so documents never need unknown
/// substitutions.
pub struct Corpora {
    pub smiles: Vec<String>,
    pub dna: Vec<String>,
    pub protein: Vec<String>,
    pub prose: Vec<String>,
}

impl Corpora {
    pub fn generate(seed: u64) -> Corpora {
        Corpora {
            smiles: molecules(seed ^ 0x511e5, 400),
            dna: dna_sequences(seed ^ 0xd7a, 200),
            protein: protein_sequences(seed ^ 0x9407e17, 200),
            prose: sentences(seed ^ 0x9805e, 300),
        }
    }
}

/// A document mixing prose with tagged and untagged scientific spans, all
/// drawn from the fixture pools. Parts are space-separated so untagged runs
/// stay bounded by separators.
pub fn mixed_document<R: Rng>(rng: &mut R, pools: &Corpora) -> String {
    let n_parts = rng.gen_range(1..=6);
    let mut parts: Vec<String> = Vec::with_capacity(n_parts);
    for _ in 0..n_parts {
        let pick = rng.gen_range(0..100);
        let part = if pick < 40 {
            pools.prose[rng.gen_range(0..pools.prose.len())].clone()
        } else if pick < 55 {
            format!(
                "<SMILES>{}</SMILES>",
                pools.smiles[rng.gen_range(0..pools.smiles.len())]
            )
        } else if pick < 70 {
            pools.smiles[rng.gen_range(0..pools.smiles.len())].clone()
        } else if pick < 80 {
            format!(
                "<FASTA>{}</FASTA>",
                pools.dna[rng.gen_range(0..pools.dna.len())]
            )
        } else if pick < 88 {
            format!(
                "<FASTA>{}</FASTA>",
                pools.protein[rng.gen_range(0..pools.protein.len())]
            )
        } else if pick < 95 {
            pools.dna[rng.gen_range(0..pools.dna.len())].clone()
        } else {
            pools.protein[rng.gen_range(0..pools.protein.len())].clone()
        };
        parts.push(part);
    }
    parts.join(" ")
}

// ---------------------------------------------------------------------------
// brute-force BPE oracles

/// The scientific-modality initial alphabet: the corpus character set plus
/// the unknown symbol, sorted.
pub fn scientific_alphabet<S: AsRef<str>>(corpus: &[S]) -> Vec<String> {
    let mut set: std::collections::BTreeSet<char> =
        corpus.iter().flat_map(|s| s.as_ref().chars()).collect();
    set.insert('\u{FFFD}');
    set.into_iter().map(String::from).collect()
}

/// Brute-force greedy BPE: recount every adjacent pair from scratch each
/// round, merge the most frequent pair (count >= 2; ties to the
/// lexicographically smallest pair), applying it left-to-right in every
/// word, until `target_size` total tokens or no eligible pair remains.
pub fn brute_train<S: AsRef<str>>(corpus: &[S], target_size: usize) -> Vec<(String, String)> {
    let alphabet = scientific_alphabet(corpus);
    let mut words: Vec<Vec<String>> = corpus
        .iter()
        .map(|s| s.as_ref().chars().map(String::from).collect())
        .collect();
    let mut merges: Vec<(String, String)> = Vec::new();
    while alphabet.len() + merges.len() < target_size {
        let mut counts: std::collections::HashMap<(String, String), u64> = Default::default();
        for w in &words {
            for pair in w.windows(2) {
                *counts
                    .entry((pair[0].clone(), pair[1].clone()))
                    .or_insert(0) += 1;
            }
        }
        let best = counts
            .into_iter()
            .filter(|(_, c)| *c >= 2)
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)));
        let Some((pair, _)) = best else { break };
        for w in &mut words {
            *w = brute_apply_one(w, &pair);
        }
        merges.push(pair);
    }
    merges
}

fn brute_apply_one(symbols: &[String], pair: &(String, String)) -> Vec<String> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == pair.0 && symbols[i + 1] == pair.1 {
            out.push(format!("{}{}", pair.0, pair.1));
            i += 2;
        } else {
            out.push(symbols[i].clone());
            i += 1;
        }
    }
    out
}

/// Brute-force BPE inference: apply each merge in training order, scanning
/// left to right, one full pass per merge.
pub fn brute_apply_merges(symbols: Vec<String>, merges: &[(String, String)]) -> Vec<String> {
    let mut syms = symbols;
    for pair in merges {
        syms = brute_apply_one(&syms, pair);
    }
    syms
}

// ---------------------------------------------------------------------------
// curated fixtures

/// Well-known molecules written as plain SMILES; every entry must pass
/// surface-grammar validation.
pub const CURATED_VALID_SMILES: &[&str] = &[
    "C1CCCCC1",
    "c1ccccc1",
    "CCO",
    "CC(=O)O",
    "CC(=O)Oc1ccccc1C(=O)O",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "CC(=O)NC1=CC=C(C=C1)O",
    "C(C(=O)O)N",
    "C([C@@H](C(=O)O)N)O",
    "CC(N)C(=O)O",
    "N#N",
    "O=C=O",
    "C#C",
    "CC(C)(C)O",
    "CCN(CC)CC",
    "CC(C)O",
    "CCCCCCCCCC",
    "Clc1ccccc1",
    "BrCCBr",
    "FC(F)(F)c1ccccc1",
    "CN1CCC[C@H]1c2cccnc2",
    "[Cu+2].[O-]S(=O)(=O)[O-]",
    "[Na+].[Cl-]",
    "C1CCC(CC1)N",
    "c1ccc2ccccc2c1",
    "Oc1ccccc1",
    "Nc1ccccc1",
    "O=Cc1ccccc1",
    "CC=O",
    "C/C=C/C",
    "C1=CC=CC=C1",
    "[2H]O[2H]",
    "C%10CCCCC%10",
    "CCOC(=O)C",
    "CSC",
    "O1CCOCC1",
    "[nH]1cccc1",
    "c1ccsc1",
    "CNC(=O)N",
    "OCC(O)CO",
    "OC[C@@H](O)[C@H](O)C=O",
];

// ---------------------------------------------------------------------------
// fixture mutations

/// Drops the first ring-closure digit (a digit outside brackets); the label
/// parity breaks, so the result must fail validation.
pub fn drop_one_ring_digit(s: &str) -> Option<String> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            '0'..='9' if depth == 0 => {
                let mut out = String::with_capacity(s.len() - 1);
                out.push_str(&s[..i]);
                out.push_str(&s[i + 1..]);
                return Some(out);
            }
            _ => {}
        }
    }
    None
}

/// Removes the first `[` or `]`, leaving the brackets unbalanced.
pub fn unbalance_bracket(s: &str) -> Option<String> {
    let i = s.find(['[', ']'])?;
    let mut out = String::with_capacity(s.len() - 1);
    out.push_str(&s[..i]);
    out.push_str(&s[i + 1..]);
    Some(out)
}

// ---------------------------------------------------------------------------
// length distributions

/// Seeded lognormal(mu, sigma) lengths, rounded and clamped to `1..=cap`,
/// via the Box-Muller transform.
pub fn lognormal_lengths(seed: u64, n: usize, mu: f64, sigma: f64, cap: u64) -> Vec<u64> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            ((mu + sigma * z).exp().round() as u64).clamp(1, cap)
        })
        .collect()
}
