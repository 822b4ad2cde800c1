mod common;

use common::trace_poly_bernstein;
use paving::moments::{
    check_polynomial_sandwich, check_trace_markov, exact_trace_moment, trace_moment_polynomial,
};
use paving::moments::suite::{sandwich_grid, sandwich_instances, SizeClass};
use paving::random::{symmetric_unit_matrix, uniform_matrix};
use paving::{DenseMatrix, PavingError, Seed};

#[test]
fn interpolated_coefficients_match_bernstein_expansion() {
    for n in [2, 3, 5, 7] {
        for p in [2u32, 4, 6] {
            let x = uniform_matrix(n, n, Seed(40 + n as u64), p as u64);
            let poly = trace_moment_polynomial(&x, p).unwrap();
            let exact = trace_poly_bernstein(&x, p);
            let scale = exact.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            assert!(exact[0].abs() < 1e-12 * scale, "constant term");
            for (k, c) in exact.iter().enumerate().skip(1) {
                let got = if k <= p as usize { poly.coeff(k) } else { 0.0 };
                assert!((got - c).abs() < 1e-8 * scale, "n={n} p={p} k={k}: {got} vs {c}");
            }
            assert!(poly.constant_term.abs() < 1e-8 * scale);
            assert!(poly.interpolation_residual < 1e-8);
        }
    }
}

#[test]
fn out_of_sample_at_random_rates() {
    for seed in 0..10u64 {
        let x = uniform_matrix(6, 6, Seed(seed), 0);
        for p in [4u32, 6] {
            let poly = trace_moment_polynomial(&x, p).unwrap();
            for i in 0..10u64 {
                let s = ((seed * 7919 + i * 104_729) % 1000) as f64 / 1000.0;
                let exact = exact_trace_moment(&x, p, s).unwrap();
                assert!((poly.eval(s) - exact).abs() < 1e-8 * exact.abs().max(1.0));
            }
        }
    }
}

#[test]
fn value_at_one_is_trace_of_power() {
    let x = uniform_matrix(8, 8, Seed(88), 0);
    for p in [2u32, 4, 8] {
        let poly = trace_moment_polynomial(&x, p).unwrap();
        let full = common::mat_pow(&x, p).trace();
        assert!((poly.eval(1.0) - full).abs() < 1e-8 * full.abs().max(1.0));
    }
}

#[test]
fn sandwich_holds_on_seeded_instances() {
    let grid = sandwich_grid();
    let insts = sandwich_instances(SizeClass::Tiny, Seed(500), 20);
    for (s, x, p) in insts {
        let r = check_polynomial_sandwich(&x, p, &grid).unwrap();
        assert!(r.holds, "seed {s}");
        assert_eq!(r.points.len(), 9);
    }
    let x = symmetric_unit_matrix(6, Seed(6), 0);
    assert!(check_polynomial_sandwich(&x, 4, &grid).unwrap().holds);
}

#[test]
fn sandwich_hypotheses() {
    let grid = [0.5];
    let big = DenseMatrix::identity(3).scale(1.5);
    assert!(matches!(check_polynomial_sandwich(&big, 4, &grid), Err(PavingError::Precondition(_))));
    let x = symmetric_unit_matrix(8, Seed(1), 0);
    assert!(matches!(check_polynomial_sandwich(&x, 2, &grid), Err(PavingError::Precondition(_))));
    assert!(check_polynomial_sandwich(&x, 3, &grid).is_err());
    assert!(matches!(trace_moment_polynomial(&DenseMatrix::zeros(13, 13), 4), Err(PavingError::Capacity { .. })));
}

#[test]
fn coefficients_scaled_by_rate_stay_below_growth_bound() {
    for seed in 0..6u64 {
        let x = symmetric_unit_matrix(5 + seed as usize % 3, Seed(seed), 0);
        for rho in [0.05, 0.2, 0.5] {
            let r = check_trace_markov(&x, 6, rho).unwrap();
            assert!(r.holds, "seed {seed} rho {rho}");
            assert!(r.markov.holds);
        }
    }
}
