mod common;

use common::{
    brute_graph, brute_jobim, brute_neighbors, brute_overlap, random_corpus, rng, Ranked,
};
use discrim::corpus::{build_vocab, count_cooccurrences, parse_corpus, CoocTable};
use discrim::graph::{build_graph, DistributionalGraph};
use rand::Rng;

fn graph_rows(g: &DistributionalGraph) -> Vec<(String, Ranked)> {
    g.targets()
        .map(|(t, l)| {
            (
                t.to_string(),
                l.iter()
                    .map(|rc| (rc.key.lexical.clone(), rc.key.tag.clone(), rc.score))
                    .collect(),
            )
        })
        .collect()
}

#[test]
fn build_matches_full_sort() {
    for seed in 0..20 {
        let mut r = rng(100 + seed);
        let corpus = random_corpus(&mut r, 300, 30, 10);
        let v = build_vocab(&corpus, 1).unwrap();
        let t = count_cooccurrences(&corpus, &v, 2).unwrap();
        let g = build_graph(&t, 10).unwrap();
        let want: Vec<_> = brute_graph(&corpus, 2, 10).into_iter().collect();
        assert_eq!(graph_rows(&g), want, "seed {seed}");
    }
}

#[test]
fn p_one_keeps_max() {
    let corpus = parse_corpus("a b c\na b\nb c d", false);
    let v = build_vocab(&corpus, 1).unwrap();
    let t = count_cooccurrences(&corpus, &v, 1).unwrap();
    let full = build_graph(&t, 100).unwrap();
    let one = build_graph(&t, 1).unwrap();
    for (w, list) in full.targets() {
        assert_eq!(one.contexts(w), &list[..list.len().min(1)]);
    }
    assert!(build_graph(&t, 0).is_err());
}

#[test]
fn loaded_table_cannot_build_graph() {
    let t = CoocTable::read_tsv(&b"#window=1 total=2\na\tb\t1\nb\ta\t1\n"[..]).unwrap();
    assert!(build_graph(&t, 5).is_err());
}

#[test]
fn deterministic_bytes() {
    let mut r = rng(5);
    let corpus = random_corpus(&mut r, 2000, 60, 12);
    let bytes = |c: &[discrim::corpus::Sentence]| {
        let v = build_vocab(c, 1).unwrap();
        let t = count_cooccurrences(c, &v, 2).unwrap();
        let mut out = Vec::new();
        build_graph(&t, 20).unwrap().write_jsonl(&mut out).unwrap();
        out
    };
    assert_eq!(bytes(&corpus), bytes(&corpus));
}

#[test]
fn queries_match_brute_force() {
    for seed in 0..15 {
        let mut r = rng(200 + seed);
        let corpus = random_corpus(&mut r, 400, 25, 10);
        let v = build_vocab(&corpus, 1).unwrap();
        let t = count_cooccurrences(&corpus, &v, 2).unwrap();
        let p = r.gen_range(1..=20);
        let g = build_graph(&t, p).unwrap();
        let b = brute_graph(&corpus, 2, p);
        let words: Vec<String> = (0..27).map(|i| format!("w{i}")).collect();
        for a in &words {
            assert_eq!(
                g.neighbors(a, 10),
                brute_neighbors(&b, a, 10),
                "seed {seed} {a}"
            );
            let full = brute_neighbors(&b, a, usize::MAX);
            let got = g.neighbors(a, usize::MAX);
            assert_eq!(got, full);
            for c in &words {
                assert_eq!(g.context_overlap(a, c), brute_overlap(&b, a, c));
            }
        }
        for _ in 0..200 {
            let pick = |r: &mut rand_chacha::ChaCha8Rng| words[r.gen_range(0..words.len())].clone();
            let (w1, w2, f) = (pick(&mut r), pick(&mut r), pick(&mut r));
            assert_eq!(
                g.jobim_feature_block(&w1, &w2, &f).0,
                brute_jobim(&b, &w1, &w2, &f),
                "{w1} {w2} {f}"
            );
        }
    }
}

#[test]
fn jobim_invariants() {
    let mut r = rng(77);
    let corpus = random_corpus(&mut r, 3000, 50, 12);
    let v = build_vocab(&corpus, 1).unwrap();
    let t = count_cooccurrences(&corpus, &v, 2).unwrap();
    let g = build_graph(&t, 15).unwrap();
    for _ in 0..500 {
        let w = |r: &mut rand_chacha::ChaCha8Rng| format!("w{}", r.gen_range(0..52));
        let (w1, w2, f) = (w(&mut r), w(&mut r), w(&mut r));
        let a = g.jobim_feature_block(&w1, &w2, &f).0;
        let b = g.jobim_feature_block(&w2, &w1, &f).0;
        for m in 0..3 {
            let s = &a[m * 8..m * 8 + 8];
            assert!(s[0] == 0.0 || s[0] == 1.0);
            assert!(s[1] == 0.0 || s[1] == 1.0);
            assert!(s[3] == -1.0 || s[3] >= 1.0);
            if s[3] >= 1.0 {
                assert!(s[3] <= s[4]);
            }
        }
        assert_eq!((a[6], a[7], a[15], a[22]), (0.0, 0.0, 0.0, 0.0));
        let (p1, p2) = (g.query_profile(&w1, &f), g.query_profile(&w2, &f));
        if p1.total_score != p2.total_score {
            assert_eq!(a[1], 1.0 - b[1]);
        }
    }
}
