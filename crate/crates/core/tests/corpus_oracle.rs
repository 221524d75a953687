mod common;

use std::collections::HashMap;

use common::{brute_cooc, random_corpus, rng};
use discrim::corpus::{
    build_vocab, count_cooccurrences, count_cooccurrences_sequential, index_sentences, Sentence,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;

#[test]
fn vocab_matches_naive_counter() {
    let mut r = rng(11);
    let corpus = random_corpus(&mut r, 12_000, 300, 20);
    assert!(corpus.len() >= 1000);
    let mut naive: HashMap<&str, u64> = HashMap::new();
    let mut total = 0;
    for s in &corpus {
        for t in &s.tokens {
            *naive.entry(t).or_insert(0) += 1;
            total += 1;
        }
    }
    for min_count in [1, 3] {
        let v = build_vocab(&corpus, min_count).unwrap();
        assert_eq!(v.total_tokens(), total);
        let kept: HashMap<&str, u64> = naive
            .iter()
            .filter(|(_, &c)| c >= min_count)
            .map(|(k, v)| (*k, *v))
            .collect();
        assert_eq!(v.len(), kept.len());
        for (t, c) in &kept {
            assert_eq!(v.frequency(t), *c);
        }
        let ids: Vec<u32> = v.iter().map(|(t, _)| v.id(t).unwrap()).collect();
        assert_eq!(ids, (0..v.len() as u32).collect::<Vec<_>>());
    }
}

#[test]
fn postings_match_linear_scan() {
    let mut r = rng(12);
    let corpus = random_corpus(&mut r, 5_000, 80, 15);
    let corpus: Vec<Sentence> = corpus.into_iter().take(500).collect();
    let idx = index_sentences(corpus.clone());
    for w in 0..90 {
        let tok = format!("w{w}");
        let scan: Vec<u32> = corpus
            .iter()
            .enumerate()
            .filter(|(_, s)| s.tokens.contains(&tok))
            .map(|(i, _)| i as u32)
            .collect();
        assert_eq!(idx.lookup(&tok), &scan[..], "{tok}");
    }
}

#[test]
fn sharded_counting_is_identical() {
    let mut r = rng(13);
    let corpus = random_corpus(&mut r, 60_000, 500, 25);
    let v = build_vocab(&corpus, 2).unwrap();
    let par = count_cooccurrences(&corpus, &v, 3).unwrap();
    let seq = count_cooccurrences_sequential(&corpus, &v, 3).unwrap();
    assert_eq!(par, seq);
}

fn corpus_strategy() -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(
        prop::collection::vec((0u8..12).prop_map(|i| format!("t{i}")), 0..12),
        0..25,
    )
}

fn sentences(raw: &[Vec<String>]) -> Vec<Sentence> {
    raw.iter()
        .map(|s| Sentence::from_tokens(s.clone()))
        .collect()
}

proptest! {
    #[test]
    fn counts_match_enumeration(raw in corpus_strategy(), window in 1usize..5, min_count in 1u64..3) {
        let corpus = sentences(&raw);
        let v = build_vocab(&corpus, min_count).unwrap();
        let t = count_cooccurrences(&corpus, &v, window).unwrap();
        let b = brute_cooc(&corpus, window, &|w| v.id(w).is_some());
        prop_assert_eq!(t.total_mass(), b.total);
        prop_assert_eq!(t.num_pairs(), b.pairs.len());
        for ((x, y), n) in &b.pairs {
            prop_assert_eq!(t.count(x, y), *n);
            prop_assert_eq!(t.count(y, x), *n);
        }
        for (w, _) in v.iter() {
            prop_assert_eq!(t.marginal(w), b.marginal(w));
        }
    }

    #[test]
    fn duplication_and_order(raw in corpus_strategy(), window in 1usize..4, k in 2usize..4, seed in 0u64..1000) {
        let corpus = sentences(&raw);
        let v = build_vocab(&corpus, 1).unwrap();
        let base = count_cooccurrences(&corpus, &v, window).unwrap();
        let repeated: Vec<Sentence> = (0..k).flat_map(|_| corpus.iter().cloned()).collect();
        let rv = build_vocab(&repeated, 1).unwrap();
        let dup = count_cooccurrences(&repeated, &rv, window).unwrap();
        prop_assert_eq!(dup.total_mass(), k as u64 * base.total_mass());
        for (a, b, n) in base.sorted_rows() {
            prop_assert_eq!(dup.count(a, b), k as u64 * n);
        }
        for (w, _) in v.iter() {
            prop_assert_eq!(dup.marginal(w), k as u64 * base.marginal(w));
        }

        let mut shuffled = corpus.clone();
        shuffled.shuffle(&mut rng(seed));
        let sv = build_vocab(&shuffled, 1).unwrap();
        let perm = count_cooccurrences(&shuffled, &sv, window).unwrap();
        prop_assert_eq!(perm.sorted_rows(), base.sorted_rows());
    }

    #[test]
    fn tsv_roundtrip(raw in corpus_strategy(), window in 1usize..4) {
        let corpus = sentences(&raw);
        let v = build_vocab(&corpus, 1).unwrap();
        let t = count_cooccurrences(&corpus, &v, window).unwrap();
        let mut buf = Vec::new();
        t.write_tsv(&mut buf).unwrap();
        let back = discrim::corpus::CoocTable::read_tsv(&buf[..]).unwrap();
        prop_assert_eq!(back.sorted_rows(), t.sorted_rows());
        prop_assert_eq!(back.window(), window);
    }
}
