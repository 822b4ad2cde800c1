use paving::random::uniform_matrix;
use paving::{
    exact_moment, exhaustive_pave, gen_ensemble, pad_to_multiple, partition_count, paving_quality, random_pave,
    DenseMatrix, EnsembleKind, PavingError, ProjectorModel, Seed,
};

fn hollow(n: usize, seed: u64) -> DenseMatrix {
    let a = uniform_matrix(n, n, Seed(seed), 0);
    DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { a.get(i, j) })
}

#[test]
fn exhaustive_optimum_is_global_over_brute_force() {
    // Independent brute force: every 2-coloring of 0..6 with both colors used.
    let a = uniform_matrix(6, 6, Seed(61), 0);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << 6) - 1 {
        let s: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
        let t: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 0).collect();
        let q = a.submatrix(&s, &s).op_norm().max(a.submatrix(&t, &t).op_norm());
        best = best.min(q);
    }
    let r = exhaustive_pave(&a, 2, false).unwrap();
    assert_eq!(r.quality, best);
    assert_eq!(r.trials_used, partition_count(6, 2, false) as u64);
    assert_eq!(r.trials_used, 31);
}

#[test]
fn random_reaches_exhaustive_on_8x8() {
    let a = hollow(8, 808);
    let ex = exhaustive_pave(&a, 2, true).unwrap();
    assert_eq!(ex.trials_used, 35);
    let r = random_pave(&a, 2, 10_000, Seed(1)).unwrap();
    assert!((r.quality - ex.quality).abs() <= 1e-12);
    assert_eq!(paving_quality(&a, &r.partition).unwrap(), r.quality);
    assert!(r.best_trial_index < r.trials_used);
}

#[test]
fn trivial_pavings() {
    let a = gen_ensemble(EnsembleKind::HadamardHollow, 8, Seed(0)).unwrap();
    let one = random_pave(&a, 1, 3, Seed(0)).unwrap();
    assert_eq!(one.quality, a.op_norm());
    let singles = random_pave(&a, 8, 3, Seed(0)).unwrap();
    assert_eq!(singles.quality, 0.0);
    let err = random_pave(&a, 3, 10, Seed(0)).unwrap_err();
    assert!(matches!(err, PavingError::Parameter(_)));
}

#[test]
fn padded_search_maps_back() {
    let a = hollow(7, 77);
    let padded = pad_to_multiple(&a, 2).unwrap();
    let r = random_pave(&padded, 2, 500, Seed(2)).unwrap();
    let back = r.partition.restricted_to(7);
    assert_eq!(back.ambient(), 7);
    assert!((paving_quality(&a, &back).unwrap() - r.quality).abs() < 1e-14);
}

#[test]
fn capacity_limits() {
    let big = DenseMatrix::zeros(14, 14);
    assert!(matches!(exhaustive_pave(&big, 2, true), Err(PavingError::Capacity { .. })));
    let mid = DenseMatrix::zeros(11, 11);
    assert!(matches!(exhaustive_pave(&mid, 2, false), Err(PavingError::Capacity { count: 1023, .. })));
}

/// If the uniform-k moment is at most ε, some balanced paving has quality
/// at most m^{1/p} ε ≤ 3ε.
#[test]
fn moment_bounds_best_paving() {
    let mut checked = 0;
    for (n, m) in [(4, 2), (6, 2), (6, 3), (8, 2), (8, 4)] {
        for p in [2.0f64, 4.0] {
            if p < (n as f64).ln() {
                continue;
            }
            for seed in 0..8u64 {
                let a = if seed % 2 == 0 { hollow(n, seed) } else { uniform_matrix(n, n, Seed(seed), 1) };
                let eps = exact_moment(&a, &ProjectorModel::uniform_k(n, n / m).unwrap(), p).unwrap().value;
                let best = exhaustive_pave(&a, m, true).unwrap().quality;
                assert!(best <= (m as f64).powf(1.0 / p) * eps * (1.0 + 1e-12), "n={n} m={m} p={p}");
                assert!(best <= 3.0 * eps);
                checked += 1;
            }
        }
    }
    assert!(checked >= 60);
}
