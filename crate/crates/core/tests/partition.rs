mod common;

use place3d::partition::{partition, partition_with, FmOptions, Hypergraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hypergraph(rng: &mut ChaCha8Rng, n: usize, classes: usize) -> (Vec<usize>, Vec<(f64, Vec<usize>)>) {
    let cls: Vec<usize> = (0..n).map(|_| rng.gen_range(0..classes)).collect();
    let m = rng.gen_range(n / 2..=2 * n);
    let edges = (0..m)
        .map(|_| {
            let k = rng.gen_range(2..=4.min(n));
            let mut pins: Vec<usize> = Vec::new();
            while pins.len() < k {
                let v = rng.gen_range(0..n);
                if !pins.contains(&v) {
                    pins.push(v);
                }
            }
            (rng.gen_range(1..=3) as f64, pins)
        })
        .collect();
    (cls, edges)
}

#[test]
fn reported_cut_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let n = rng.gen_range(4..60);
        let (cls, edges) = random_hypergraph(&mut rng, n, 2);
        let h = Hypergraph::new(cls.clone(), edges.clone()).unwrap();
        let a = partition(&h, 0.05, 1).unwrap();
        assert_eq!(a.cut, common::cut_ref(&edges, &a.layer));
        assert!(common::balanced_ref(&cls, &a.layer, 0.05));
        for pair in a.pass_cuts.windows(2) {
            assert!(pair[1] <= pair[0], "pass cuts rose: {:?}", a.pass_cuts);
        }
    }
}

#[test]
fn restarts_never_hurt() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..10 {
        let (cls, edges) = random_hypergraph(&mut rng, 80, 3);
        let h = Hypergraph::new(cls, edges).unwrap();
        let one = partition_with(&h, &FmOptions { restarts: 1, seed, ..FmOptions::default() }).unwrap();
        let four = partition_with(&h, &FmOptions { restarts: 4, seed, ..FmOptions::default() }).unwrap();
        assert!(four.cut <= one.cut);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balanced_local_optimum(seed in any::<u64>(), n in 2usize..13) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (cls, edges) = random_hypergraph(&mut rng, n, 2);
        let h = Hypergraph::new(cls.clone(), edges.clone()).unwrap();
        let a = partition(&h, 0.05, seed).unwrap();
        prop_assert!(common::balanced_ref(&cls, &a.layer, 0.05));
        let cut = common::cut_ref(&edges, &a.layer);
        for v in 0..n {
            let mut s = a.layer.clone();
            s[v] = 1 - s[v];
            if common::balanced_ref(&cls, &s, 0.05) {
                prop_assert!(common::cut_ref(&edges, &s) >= cut);
            }
        }
    }
}
