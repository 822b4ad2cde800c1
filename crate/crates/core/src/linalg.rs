//! Small dense kernels: spectral norm, singular values and symmetric
//! eigenvalues.
//!
//! The spectral norm is the hot path of every enumeration, so it avoids a
//! full SVD. It forms the Gram matrix on the smaller side and runs cyclic
//! Jacobi rotations on it; `‖A‖ = sqrt(λ_max(AᵀA))`. If Jacobi fails to
//! converge the norm falls back to power iteration with three fixed restarts.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::DenseMatrix;

const MAX_SWEEPS: usize = 60;
const OFF_DIAG_TOL: f64 = 1e-15;
const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 20_000;
const POWER_RESTARTS: usize = 3;

/// Largest singular value; zero for empty matrices.
pub(crate) fn spectral_norm(a: &DenseMatrix) -> f64 {
    let (r, c) = (a.n_rows(), a.n_cols());
    if r == 0 || c == 0 {
        return 0.0;
    }
    if r == 1 || c == 1 {
        return euclidean_norm(a.data());
    }
    let gram = if c <= r { gram_cols(a) } else { gram_rows(a) };
    let m = r.min(c);
    let lambda = match jacobi_eigenvalues(gram.clone(), m) {
        Some(eig) => eig.into_iter().fold(0.0, f64::max),
        None => power_max_eigenvalue(&gram, m),
    };
    lambda.max(0.0).sqrt()
}

pub(crate) fn euclidean_norm(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

/// `AᵀA`, row-major `c × c`.
fn gram_cols(a: &DenseMatrix) -> Vec<f64> {
    let c = a.n_cols();
    let mut g = vec![0.0; c * c];
    for i in 0..a.n_rows() {
        let row = a.row(i);
        for p in 0..c {
            let x = row[p];
            if x == 0.0 {
                continue;
            }
            for q in p..c {
                g[p * c + q] += x * row[q];
            }
        }
    }
    mirror_upper(&mut g, c);
    g
}

/// `AAᵀ`, row-major `r × r`.
fn gram_rows(a: &DenseMatrix) -> Vec<f64> {
    let r = a.n_rows();
    let mut g = vec![0.0; r * r];
    for p in 0..r {
        let rp = a.row(p);
        for q in p..r {
            g[p * r + q] = rp.iter().zip(a.row(q)).map(|(x, y)| x * y).sum();
        }
    }
    mirror_upper(&mut g, r);
    g
}

fn mirror_upper(g: &mut [f64], n: usize) {
    for p in 0..n {
        for q in 0..p {
            g[p * n + q] = g[q * n + p];
        }
    }
}

/// Eigenvalues of a symmetric matrix (row-major, `n × n`) by cyclic Jacobi.
/// Returns `None` if the off-diagonal mass does not drop below tolerance.
fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Some(vec![0.0; n]);
    }
    let target = OFF_DIAG_TOL * frob;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= target {
            return Some((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
            }
        }
    }
    None
}

/// Largest eigenvalue of a positive semidefinite matrix by power iteration,
/// best of three deterministic random starts.
fn power_max_eigenvalue(g: &[f64], n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
    let mut best: f64 = 0.0;
    for _ in 0..POWER_RESTARTS {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut lambda = 0.0;
        for _ in 0..POWER_MAX_ITERS {
            let norm = euclidean_norm(&v);
            if norm == 0.0 {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            let w: Vec<f64> = (0..n)
                .map(|i| g[i * n..(i + 1) * n].iter().zip(&v).map(|(a, b)| a * b).sum())
                .collect();
            let next: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
            v = w;
            let done = (next - lambda).abs() <= POWER_TOL * next.abs().max(f64::MIN_POSITIVE);
            lambda = next;
            if done {
                break;
            }
        }
        best = best.max(lambda);
    }
    best
}

/// All singular values in decreasing order (Golub–Kahan via nalgebra).
pub(crate) fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_row_slice(a.n_rows(), a.n_cols(), a.data());
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Eigenvalues of a symmetric matrix, decreasing. Only the upper triangle is read.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    assert!(a.is_square(), "symmetric eigenvalues need a square matrix");
    let n = a.n_rows();
    let mut g = a.data().to_vec();
    mirror_upper(&mut g, n);
    let mut eig = match jacobi_eigenvalues(g.clone(), n) {
        Some(e) => e,
        None => DMatrix::from_row_slice(n, n, &g)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect(),
    };
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}
