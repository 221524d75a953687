mod common;

use common::{rng, separable_fixture};
use discrim::gbt::{
    split_gain, train, train_with_history, GbtModel, GbtParams, Matrix, Node, Tree,
};
use proptest::prelude::*;
use rand::Rng;

fn params(rounds: usize, depth: usize) -> GbtParams {
    GbtParams {
        rounds,
        max_depth: depth,
        ..GbtParams::default()
    }
}

fn random_data(seed: u64, n: usize, d: usize) -> (Matrix, Vec<u8>) {
    let mut r = rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| r.gen_range(-3.0..3.0)).collect())
        .collect();
    let y = rows
        .iter()
        .map(|x| ((x[0] * x[1] + 0.5 * x[d - 1] + r.gen_range(-0.5..0.5)) > 0.0) as u8)
        .collect();
    (Matrix::from_rows(&rows).unwrap(), y)
}

#[test]
fn gain_hand_value() {
    assert!((split_gain(-2.0, 1.0, 2.0, 1.0, 1.0, 0.0) - 2.0).abs() <= 1e-12);
}

#[test]
fn separable_fixture_learned() {
    let (rows, y) = separable_fixture(3);
    let x = Matrix::from_rows(&rows).unwrap();
    let p = GbtParams {
        rounds: 50,
        max_depth: 3,
        eta: 0.3,
        ..GbtParams::default()
    };
    let (model, hist) = train_with_history(&x, &y, &p).unwrap();
    let pred = model.predict_labels(&x).unwrap();
    let acc = pred.iter().zip(&y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64;
    assert!(acc >= 0.99, "accuracy {acc}");
    for w in hist[..10].windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{hist:?}");
    }
    assert!(model.trees.iter().all(|t| t.depth() <= 3));
}

#[test]
fn monotone_transform_invariance() {
    let transforms: [fn(f64) -> f64; 4] =
        [|v| v.exp(), |v| 3.0 * v - 7.0, |v| v * v * v, |v| v.atan()];
    for seed in 0..20 {
        let (x, y) = random_data(seed, 150, 4);
        let mut tx = x.clone();
        let f = transforms[seed as usize % 4];
        let col = seed as usize % 4;
        for i in 0..x.rows() {
            tx.set(i, col, f(x.get(i, col)));
        }
        let p = params(10, 3);
        let a = train(&x, &y, &p).unwrap();
        let b = train(&tx, &y, &p).unwrap();
        let shape = |t: &Tree| {
            t.nodes
                .iter()
                .map(|n| match *n {
                    Node::Split {
                        feature,
                        left,
                        right,
                        ..
                    } => (feature, left, right, 0u64),
                    Node::Leaf { weight } => (usize::MAX, 0, 0, weight.to_bits()),
                })
                .collect::<Vec<_>>()
        };
        for (ta, tb) in a.trees.iter().zip(&b.trees) {
            assert_eq!(shape(ta), shape(tb), "seed {seed}");
        }
        assert_eq!(
            a.predict_labels(&x).unwrap(),
            b.predict_labels(&tx).unwrap(),
            "seed {seed}"
        );
    }
}

#[test]
fn training_is_byte_deterministic() {
    let (x, y) = random_data(9, 300, 6);
    let p = params(20, 4);
    assert_eq!(
        train(&x, &y, &p).unwrap().to_json(),
        train(&x, &y, &p).unwrap().to_json()
    );
}

#[test]
fn round_trip_predictions_on_random_inputs() {
    let (x, y) = random_data(11, 300, 5);
    let model = train(&x, &y, &params(25, 4)).unwrap();
    let back = GbtModel::from_json(&model.to_json()).unwrap();
    assert_eq!(back, model);
    let mut r = rng(12);
    for _ in 0..1000 {
        let v: Vec<f64> = (0..5).map(|_| r.gen_range(-5.0..5.0)).collect();
        assert_eq!(
            model.predict_prob(&v).unwrap().to_bits(),
            back.predict_prob(&v).unwrap().to_bits()
        );
    }
}

#[test]
fn hand_built_tree_walk() {
    let json = br#"{"format":"discrim-gbt","version":1,
        "params":{"rounds":1,"max_depth":2,"eta":0.5,"lambda":1.0,"gamma":0.0,"min_child_weight":1.0,"seed":0},
        "num_features":2,"base_score":0.25,
        "trees":[{"nodes":[
            {"kind":"split","feature":0,"threshold":1.0,"left":1,"right":2},
            {"kind":"leaf","weight":-2.0},
            {"kind":"split","feature":1,"threshold":0.0,"left":3,"right":4},
            {"kind":"leaf","weight":4.0},
            {"kind":"leaf","weight":1.0}]}]}"#;
    let m = GbtModel::from_json(json).unwrap();
    assert_eq!(m.predict_margin(&[0.5, 9.0]).unwrap(), 0.25 - 1.0);
    assert_eq!(m.predict_margin(&[1.0, -1.0]).unwrap(), 0.25 + 2.0);
    assert_eq!(m.predict_margin(&[1.0, 0.0]).unwrap(), 0.25 + 0.5);
    assert!(m.predict_margin(&[1.0]).is_err());
}

#[test]
fn malformed_models_rejected() {
    let (x, y) = random_data(13, 100, 3);
    let bytes = train(&x, &y, &params(5, 3)).unwrap().to_json();
    for cut in [1, bytes.len() / 3, bytes.len() / 2, bytes.len() - 1] {
        assert!(GbtModel::from_json(&bytes[..cut]).is_err());
    }
    let text = String::from_utf8(bytes).unwrap();
    assert!(GbtModel::from_json(text.replace("discrim-gbt", "other").as_bytes()).is_err());
    assert!(GbtModel::from_json(
        text.replacen("\"version\":1", "\"version\":9", 1)
            .as_bytes()
    )
    .is_err());
}

#[test]
fn single_class_gives_constant_model() {
    let (x, _) = random_data(14, 50, 3);
    let m = train(&x, &[1; 50], &params(10, 3)).unwrap();
    assert!(m.trees.is_empty());
    assert!(m.predict_prob(x.row(0)).unwrap() > 0.999);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gain_is_swap_symmetric(gl in -50.0f64..50.0, hl in 0.0f64..50.0, gr in -50.0f64..50.0, hr in 0.0f64..50.0, lambda in 0.1f64..5.0) {
        let a = split_gain(gl, hl, gr, hr, lambda, 0.0);
        let b = split_gain(gr, hr, gl, hl, lambda, 0.0);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn probabilities_in_unit_interval(seed in 0u64..1000) {
        let (x, y) = random_data(seed, 60, 3);
        let m = train(&x, &y, &params(5, 3)).unwrap();
        for p in m.predict_probs(&x).unwrap() {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
