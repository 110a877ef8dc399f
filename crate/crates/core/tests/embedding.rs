use std::collections::HashSet;

use proptest::prelude::*;
use skate_core::embedding::{cosine, EmbeddingStore, Vector};
use skate_core::fixtures;
use skate_testkit::embedding as oracle;
use skate_testkit::recognizer::frame_vector;

const DIM: usize = 8;

fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0f64..10.0, DIM)
}

fn nonzero() -> impl Strategy<Value = Vec<f64>> {
    vec_strategy().prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn self_similarity_is_one(a in nonzero()) {
        let v = Vector(a);
        prop_assert!((cosine(&v, &v).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn cosine_matches_oracle_and_ignores_scale(a in nonzero(), b in nonzero(), s in 0.01f64..100.0, t in 0.01f64..100.0) {
        let (va, vb) = (Vector(a.clone()), Vector(b.clone()));
        let c = cosine(&va, &vb).unwrap();
        prop_assert!((c - oracle::cosine(&a, &b)).abs() <= 1e-9);
        prop_assert!((cosine(&va.scale(s), &vb.scale(t)).unwrap() - c).abs() <= 1e-9);
        prop_assert!((-1.0..=1.0).contains(&c));
    }

    #[test]
    fn sentence_sum_is_permutation_invariant(vs in proptest::collection::vec(vec_strategy(), 1..8), seed in any::<u64>()) {
        let words: Vec<String> = (0..vs.len()).map(|i| format!("w{i}")).collect();
        let store = EmbeddingStore::from_vectors(
            words.iter().cloned().zip(vs.iter().cloned().map(Vector)),
            HashSet::new(),
        ).unwrap();
        let mut shuffled = words.clone();
        // deterministic Fisher-Yates from the seed
        let mut x = seed | 1;
        for i in (1..shuffled.len()).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            shuffled.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let a = store.sentence_embedding(&words);
        let b = store.sentence_embedding(&shuffled);
        let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        let expect = oracle::sum(&refs, DIM);
        prop_assert!(oracle::approx_eq(a.as_slice(), b.as_slice(), 1e-12));
        prop_assert!(oracle::approx_eq(a.as_slice(), &expect, 1e-12));
    }

    #[test]
    fn ranking_is_scale_invariant(q in nonzero(), cands in proptest::collection::vec((nonzero(), 0.1f64..50.0), 2..6)) {
        let qv = Vector(q);
        let rank = |scaled: bool| {
            let mut idx: Vec<(usize, f64)> = cands.iter().enumerate().map(|(i, (c, s))| {
                let v = Vector(c.clone());
                let v = if scaled { v.scale(*s) } else { v };
                (i, cosine(&qv, &v).unwrap())
            }).collect();
            idx.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            idx
        };
        let (a, b) = (rank(false), rank(true));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.1 - y.1).abs() <= 1e-9);
        }
    }

    #[test]
    fn mean_matches_oracle(vs in proptest::collection::vec(vec_strategy(), 1..10)) {
        let mut acc = Vector::zeros(DIM);
        for v in &vs {
            acc += &Vector(v.clone());
        }
        let mean = acc.scale(1.0 / vs.len() as f64);
        let refs: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        prop_assert!(oracle::approx_eq(mean.as_slice(), &oracle::mean(&refs, DIM), 1e-12));
    }
}

#[test]
fn zero_vector_has_zero_similarity() {
    let z = Vector::zeros(DIM);
    let v = Vector(vec![1.0; DIM]);
    assert_eq!(cosine(&z, &v).unwrap(), 0.0);
    assert!(cosine(&v, &Vector(vec![1.0; DIM + 1])).is_err());
}

#[test]
fn fixture_frame_embeddings_match_the_token_walk_oracle() {
    let rec = fixtures::recognizer();
    for f in rec.ontology().frames() {
        let fe = rec.frame_embedding(&f.id).unwrap();
        match frame_vector(&rec, &f.id) {
            Some(expect) => assert!(
                oracle::approx_eq(fe.vector.as_slice(), &expect, 1e-12),
                "{}",
                f.id
            ),
            None => assert!(fe.excluded(), "{}", f.id),
        }
    }
}
