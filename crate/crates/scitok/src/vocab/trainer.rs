//! Greedy pair-merge BPE training.
//!
//! Repeatedly merges the most frequent adjacent symbol pair (ties broken by
//! the lexicographically smallest pair of token strings) until the target
//! vocabulary size is reached or no pair occurs at least twice. Merges are
//! applied corpus-wide, so the output is fully determined by the corpus
//! order and the target size.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::modality::Modality;
use crate::vocab::{byte_alphabet, VocabError, Vocabulary, UNKNOWN_SYMBOL};

/// Pairs occurring fewer times than this are never merged.
const MIN_PAIR_COUNT: u64 = 2;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("target size {target} is below the initial alphabet size {alphabet}")]
    TargetTooSmall { target: usize, alphabet: usize },
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

struct Word {
    symbols: Vec<u32>,
    freq: u64,
}

#[derive(Default)]
struct PairStat {
    count: u64,
    words: BTreeSet<u32>,
}

/// Trains a BPE vocabulary for `modality` on `corpus`.
///
/// TEXT trains over the full 256-symbol byte alphabet; scientific modalities
/// over the corpus character set plus the unknown symbol. `target_size`
/// counts total tokens (alphabet plus merges).
pub fn train_bpe<S: AsRef<str>>(
    corpus: &[S],
    modality: Modality,
    target_size: usize,
) -> Result<Vocabulary, TrainError> {
    if corpus.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }

    let alphabet: Vec<String> = if modality == Modality::Text {
        byte_alphabet()
    } else {
        let mut set: BTreeSet<char> = corpus.iter().flat_map(|s| s.as_ref().chars()).collect();
        set.insert(UNKNOWN_SYMBOL);
        set.into_iter().map(String::from).collect()
    };
    if target_size < alphabet.len() {
        return Err(TrainError::TargetTooSmall {
            target: target_size,
            alphabet: alphabet.len(),
        });
    }

    let char_ids: HashMap<char, u32> = alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.chars().next().expect("non-empty symbol"), i as u32))
        .collect();
    let symbolize = |s: &str| -> Vec<u32> {
        if modality == Modality::Text {
            s.bytes().map(u32::from).collect()
        } else {
            s.chars().map(|c| char_ids[&c]).collect()
        }
    };

    // identical corpus strings collapse into one weighted word
    let mut words: Vec<Word> = Vec::new();
    let mut word_index: HashMap<Vec<u32>, u32> = HashMap::new();
    for s in corpus {
        let symbols = symbolize(s.as_ref());
        if symbols.is_empty() {
            continue;
        }
        match word_index.get(&symbols) {
            Some(&i) => words[i as usize].freq += 1,
            None => {
                word_index.insert(symbols.clone(), words.len() as u32);
                words.push(Word { symbols, freq: 1 });
            }
        }
    }
    drop(word_index);

    let mut stats: HashMap<(u32, u32), PairStat> = HashMap::new();
    for (wi, word) in words.iter().enumerate() {
        for pair in adjacent_pairs(&word.symbols) {
            let stat = stats.entry(pair).or_default();
            stat.count += word.freq;
            stat.words.insert(wi as u32);
        }
    }

    let mut token_strs: Vec<String> = alphabet.clone();
    let mut merges: Vec<(String, String)> = Vec::new();

    while token_strs.len() < target_size {
        let Some(pair) = select_pair(&stats, &token_strs) else {
            break;
        };
        let left = token_strs[pair.0 as usize].clone();
        let right = token_strs[pair.1 as usize].clone();
        let new_id = token_strs.len() as u32;
        token_strs.push(format!("{left}{right}"));
        merges.push((left, right));

        let touched: Vec<u32> = stats[&pair].words.iter().copied().collect();
        for wi in touched {
            let word = &mut words[wi as usize];
            let old_counts = pair_multiset(&word.symbols);
            word.symbols = replace_pair(&word.symbols, pair, new_id);
            let new_counts = pair_multiset(&word.symbols);
            apply_deltas(&mut stats, wi, word.freq, &old_counts, &new_counts);
        }
        debug_assert!(!stats.contains_key(&pair) || stats[&pair].count == 0);
        stats.remove(&pair);
    }

    Ok(Vocabulary::from_parts(modality, alphabet, merges)?)
}

fn adjacent_pairs(symbols: &[u32]) -> impl Iterator<Item = (u32, u32)> + '_ {
    symbols.windows(2).map(|w| (w[0], w[1]))
}

fn pair_multiset(symbols: &[u32]) -> BTreeMap<(u32, u32), u64> {
    let mut counts = BTreeMap::new();
    for pair in adjacent_pairs(symbols) {
        *counts.entry(pair).or_insert(0) += 1;
    }
    counts
}

/// Most frequent pair with count >= [`MIN_PAIR_COUNT`]; ties broken by the
/// lexicographically smallest (left, right) token-string pair. The full scan
/// with a total order keeps the choice independent of hash iteration order.
fn select_pair(stats: &HashMap<(u32, u32), PairStat>, token_strs: &[String]) -> Option<(u32, u32)> {
    let strs = |p: (u32, u32)| (&token_strs[p.0 as usize], &token_strs[p.1 as usize]);
    let mut best: Option<((u32, u32), u64)> = None;
    for (&pair, stat) in stats {
        if stat.count < MIN_PAIR_COUNT {
            continue;
        }
        let better = match best {
            None => true,
            Some((bp, bc)) => stat.count > bc || (stat.count == bc && strs(pair) < strs(bp)),
        };
        if better {
            best = Some((pair, stat.count));
        }
    }
    best.map(|(pair, _)| pair)
}

/// Left-to-right single-pass replacement, the same application order the
/// encoder uses.
fn replace_pair(symbols: &[u32], pair: (u32, u32), new_id: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == pair.0 && symbols[i + 1] == pair.1 {
            out.push(new_id);
            i += 2;
        } else {
            out.push(symbols[i]);
            i += 1;
        }
    }
    out
}

fn apply_deltas(
    stats: &mut HashMap<(u32, u32), PairStat>,
    wi: u32,
    freq: u64,
    old_counts: &BTreeMap<(u32, u32), u64>,
    new_counts: &BTreeMap<(u32, u32), u64>,
) {
    for (&pair, &new_n) in new_counts {
        let old_n = old_counts.get(&pair).copied().unwrap_or(0);
        if new_n != old_n {
            let stat = stats.entry(pair).or_default();
            stat.count = stat.count + new_n * freq - old_n * freq;
        }
        stats.entry(pair).or_default().words.insert(wi);
    }
    for (&pair, &old_n) in old_counts {
        if !new_counts.contains_key(&pair) {
            if let Some(stat) = stats.get_mut(&pair) {
                stat.count -= old_n * freq;
                stat.words.remove(&wi);
                if stat.count == 0 {
                    stats.remove(&pair);
                }
            }
        }
    }
}
