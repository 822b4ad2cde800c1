mod common;

use common::{bernoulli_moment, svd_norm, svd_schatten, uniform_k_moment};
use paving::random::uniform_matrix;
use paving::{
    exact_moment, hollow_rescale, max_column_norm, mc_moment, pad_to_multiple, paving_quality, schatten_norm,
    spectral_norm, symmetric_eigenvalues, DenseMatrix, Partition, ProjectorModel, Seed,
};

fn shapes() -> Vec<(usize, usize)> {
    vec![(1, 1), (1, 5), (5, 1), (2, 2), (3, 7), (7, 3), (8, 8), (12, 5), (16, 16), (25, 9)]
}

#[test]
fn spectral_norm_matches_jacobi_svd() {
    for (i, (r, c)) in shapes().into_iter().enumerate() {
        for rep in 0..5 {
            let a = uniform_matrix(r, c, Seed(100 + i as u64), rep);
            let got = spectral_norm(&a).unwrap();
            let want = svd_norm(&a);
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "{r}x{c}: {got} vs {want}");
        }
    }
}

#[test]
fn spectral_norm_on_structured_inputs() {
    // rank one: ‖u vᵀ‖ = ‖u‖‖v‖
    let u = [1.0, -2.0, 2.0];
    let v = [3.0, 4.0];
    let a = DenseMatrix::from_fn(3, 2, |i, j| u[i] * v[j]);
    assert!((spectral_norm(&a).unwrap() - 15.0).abs() < 1e-12);
    // repeated top singular value
    let d = DenseMatrix::diagonal(&[2.0, -2.0, 1.0]);
    assert!((spectral_norm(&d).unwrap() - 2.0).abs() < 1e-14);
    // nearly singular
    let b = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-10]]).unwrap();
    assert!((spectral_norm(&b).unwrap() - svd_norm(&b)).abs() < 1e-12);
}

#[test]
fn schatten_matches_jacobi_svd() {
    for (i, (r, c)) in shapes().into_iter().enumerate() {
        let a = uniform_matrix(r, c, Seed(7), i as u64);
        for p in [1.0, 2.0, 4.0, 7.5] {
            let got = schatten_norm(&a, p).unwrap();
            let want = svd_schatten(&a, p);
            assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{r}x{c} p={p}");
        }
        let fro = a.data().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((schatten_norm(&a, 2.0).unwrap() - fro).abs() < 1e-12 * fro.max(1.0));
    }
}

#[test]
fn column_norm_matches_direct_sum() {
    let a = uniform_matrix(6, 9, Seed(3), 0);
    let want = (0..9)
        .map(|j| (0..6).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    assert_eq!(max_column_norm(&a).unwrap(), want);
}

#[test]
fn eigenvalues_match_svd_for_psd() {
    let b = uniform_matrix(7, 7, Seed(12), 0);
    let g = b.matmul(&b.transpose());
    let eig = symmetric_eigenvalues(&g);
    let sv = common::svd_values(&b);
    for (l, s) in eig.iter().zip(&sv) {
        assert!((l - s * s).abs() < 1e-10 * g.op_norm());
    }
}

/// Quality equals the norm of the assembled block-diagonal compression.
#[test]
fn quality_matches_block_diagonal_assembly() {
    let a = uniform_matrix(9, 9, Seed(21), 0);
    let part = Partition::new(9, vec![vec![0, 4, 8], vec![1, 2], vec![3, 5, 6, 7]]).unwrap();
    let mut block = DenseMatrix::zeros(9, 9);
    for b in part.blocks() {
        for &i in b.indices() {
            for &j in b.indices() {
                block.set(i, j, a.get(i, j));
            }
        }
    }
    let got = paving_quality(&a, &part).unwrap();
    assert!((got - svd_norm(&block)).abs() < 1e-12);
}

#[test]
fn zero_padding_preserves_quality() {
    let a = uniform_matrix(7, 7, Seed(4), 0);
    let padded = pad_to_multiple(&a, 3).unwrap();
    assert_eq!(padded.n_rows(), 9);
    assert!((spectral_norm(&padded).unwrap() - spectral_norm(&a).unwrap()).abs() < 1e-13);
    let part = Partition::new(9, vec![vec![0, 1, 7], vec![2, 3, 8], vec![4, 5, 6]]).unwrap();
    let q_pad = paving_quality(&padded, &part).unwrap();
    let q = paving_quality(&a, &part.restricted_to(7)).unwrap();
    assert!((q_pad - q).abs() < 1e-13);
}

#[test]
fn hollow_rescale_example() {
    let a = DenseMatrix::from_rows(&[vec![5.0, 2.0], vec![-4.0, 1.0]]).unwrap();
    let h = hollow_rescale(&a, 1.0).unwrap();
    assert_eq!(h.data(), &[0.0, 1.0, -2.0, 0.0]);
}

#[test]
fn exact_moment_matches_direct_enumeration() {
    for n in [1, 3, 5, 7] {
        let a = uniform_matrix(n, n, Seed(55), n as u64);
        for delta in [0.0, 0.15, 0.5, 0.9, 1.0] {
            let model = ProjectorModel::bernoulli(n, delta).unwrap();
            for p in [1.0, 2.0, 4.0, 6.0] {
                let got = exact_moment(&a, &model, p).unwrap();
                let want = bernoulli_moment(&a, delta, p);
                assert!((got.value - want).abs() <= 1e-12 * want.max(1.0), "n={n} δ={delta} p={p}");
                assert_eq!((got.trials, got.stderr), (0, 0.0));
            }
        }
        for k in 1..=n {
            let model = ProjectorModel::uniform_k(n, k).unwrap();
            let got = exact_moment(&a, &model, 4.0).unwrap();
            let want = uniform_k_moment(&a, k, 4.0);
            assert!((got.value - want).abs() <= 1e-12 * want.max(1.0), "n={n} k={k}");
        }
    }
}

#[test]
fn exact_moment_spec_examples() {
    let z = DenseMatrix::zeros(4, 4);
    for model in [
        ProjectorModel::bernoulli(4, 0.4).unwrap(),
        ProjectorModel::uniform_k(4, 2).unwrap(),
        ProjectorModel::bernoulli_pair(4, 0.4).unwrap(),
        ProjectorModel::rademacher(4),
    ] {
        assert_eq!(exact_moment(&z, &model, 3.0).unwrap().value, 0.0);
    }
    let one = DenseMatrix::from_rows(&[vec![-2.5]]).unwrap();
    let d2 = DenseMatrix::identity(2);
    for delta in [0.1, 0.5, 0.8] {
        for p in [1.0, 2.0, 5.0] {
            let m1 = ProjectorModel::bernoulli(1, delta).unwrap();
            let got = exact_moment(&one, &m1, p).unwrap().value;
            assert!((got - delta.powf(1.0 / p) * 2.5).abs() < 1e-14);
            let m2 = ProjectorModel::bernoulli(2, delta).unwrap();
            let got = exact_moment(&d2, &m2, p).unwrap().value;
            assert!((got - (delta * (2.0 - delta)).powf(1.0 / p)).abs() < 1e-14);
        }
    }
}

#[test]
fn full_selection_gives_spectral_norm() {
    let a = uniform_matrix(6, 6, Seed(8), 0);
    let norm = spectral_norm(&a).unwrap();
    let full_k = exact_moment(&a, &ProjectorModel::uniform_k(6, 6).unwrap(), 4.0).unwrap();
    let full_b = exact_moment(&a, &ProjectorModel::bernoulli(6, 1.0).unwrap(), 4.0).unwrap();
    assert_eq!(full_k.value, norm);
    assert_eq!(full_b.value, norm);
    let mc = mc_moment(&a, &ProjectorModel::bernoulli(6, 1.0).unwrap(), 4.0, 50, Seed(1)).unwrap();
    assert_eq!((mc.value, mc.stderr), (norm, 0.0));
    let z = mc_moment(&DenseMatrix::zeros(6, 6), &ProjectorModel::bernoulli(6, 0.5).unwrap(), 4.0, 50, Seed(1)).unwrap();
    assert_eq!((z.value, z.stderr), (0.0, 0.0));
}

#[test]
fn mc_moment_agrees_with_exact_n10() {
    let a = uniform_matrix(10, 10, Seed(1010), 0);
    let model = ProjectorModel::bernoulli(10, 0.3).unwrap();
    let exact = exact_moment(&a, &model, 4.0).unwrap();
    let mc = mc_moment(&a, &model, 4.0, 100_000, Seed(99)).unwrap();
    assert!(mc.stderr > 0.0);
    assert!((mc.value - exact.value).abs() <= 3.0 * mc.stderr, "{} vs {} ± {}", mc.value, exact.value, mc.stderr);
    let again = mc_moment(&a, &model, 4.0, 100_000, Seed(99)).unwrap();
    assert_eq!(mc.value.to_bits(), again.value.to_bits());
}
