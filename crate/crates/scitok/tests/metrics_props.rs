//! Compression-ratio invariants that relate aggregates, per-document
//! ratios, and vocabulary growth.

use proptest::prelude::*;
use rand::Rng;
use scitok::detector::DetectorConfig;
use scitok::metrics::{compare, compression_ratio, CrOptions};
use scitok::vocab::{assemble, byte_alphabet, train_bpe, Vocabulary};
use scitok::{Modality, VocabularySet};
use scitok_testkit as testkit;

fn trained_set(smiles_target: usize) -> (VocabularySet, Vec<String>) {
    let corpus = testkit::molecules(0x3e7, 300);
    let alphabet = testkit::scientific_alphabet(&corpus).len();
    let vs = assemble(vec![
        Vocabulary::from_parts(Modality::Text, byte_alphabet(), vec![]).unwrap(),
        train_bpe(&corpus, Modality::Smiles, alphabet + smiles_target).unwrap(),
        Vocabulary::char_level(Modality::Nucleotide, "ACGTUN".chars()),
        Vocabulary::char_level(Modality::Protein, "ACDEFGHIKLMNPQRSTVWYX".chars()),
    ])
    .unwrap();
    (vs, corpus)
}

#[test]
fn aggregate_cr_lies_between_per_document_extremes() {
    let (vs, corpus) = trained_set(60);
    let rules = DetectorConfig::default();
    let mut rng = testkit::rng(0xa66);
    for _ in 0..20 {
        let n = rng.gen_range(2..30);
        let docs: Vec<String> = (0..n)
            .map(|_| corpus[rng.gen_range(0..corpus.len())].clone())
            .collect();
        let aggregate = compression_ratio(&vs, &rules, &docs, "agg", CrOptions::default())
            .unwrap()
            .cr;
        let per_doc: Vec<f64> = docs
            .iter()
            .map(|d| {
                compression_ratio(
                    &vs,
                    &rules,
                    std::slice::from_ref(d),
                    "one",
                    CrOptions::default(),
                )
                .unwrap()
                .cr
            })
            .collect();
        let min = per_doc.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = per_doc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(
            min <= aggregate && aggregate <= max,
            "aggregate {aggregate} outside [{min}, {max}]"
        );
    }
}

#[test]
fn more_merges_never_decrease_cr_on_the_training_corpus() {
    let rules = DetectorConfig::default();
    let mut previous = 0.0f64;
    for target in [0usize, 10, 40, 120] {
        let (vs, corpus) = trained_set(target);
        let cr = compression_ratio(&vs, &rules, &corpus, "train", CrOptions::default())
            .unwrap()
            .cr;
        assert!(
            cr >= previous,
            "CR fell from {previous} to {cr} when growing to {target} merges"
        );
        previous = cr;
    }
}

fn small_and_large() -> &'static (VocabularySet, VocabularySet, Vec<String>) {
    static SETS: std::sync::OnceLock<(VocabularySet, VocabularySet, Vec<String>)> =
        std::sync::OnceLock::new();
    SETS.get_or_init(|| {
        let (small, corpus) = trained_set(25);
        let (large, _) = trained_set(80);
        (small, large, corpus)
    })
}

proptest! {
    // token counts are non-increasing document by document under a larger
    // merge list
    #[test]
    fn per_document_token_count_is_monotone_in_merges(seed in any::<u64>()) {
        let (small, large, corpus) = small_and_large();
        let rules = DetectorConfig::default();
        let mut rng = testkit::rng(seed);
        let doc = &corpus[rng.gen_range(0..corpus.len())];
        let count = |vs: &VocabularySet| {
            scitok::codec::token_count(doc, vs, &rules).unwrap()
        };
        prop_assert!(count(large) <= count(small));
    }
}

#[test]
fn comparison_is_consistent_with_the_reports_it_ranks() {
    let (merged, corpus) = trained_set(60);
    let (chars, _) = trained_set(0);
    let rules = DetectorConfig::default();
    let data = &corpus[..50];
    let a = compression_ratio(&merged, &rules, data, "merged", CrOptions::default()).unwrap();
    let b = compression_ratio(&chars, &rules, data, "chars", CrOptions::default()).unwrap();
    let table = compare(&[a.clone(), b.clone()]).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows[0].cr >= table.rows[1].cr);
    let cell = &table.improvements[0];
    let expected = table.rows[0].cr / table.rows[1].cr - 1.0;
    assert!((cell.relative - expected).abs() < 1e-12);
    assert_eq!(table.dataset_fingerprint, a.dataset_fingerprint);
}
