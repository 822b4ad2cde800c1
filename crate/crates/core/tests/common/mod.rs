//! Test-only oracles, written independently of the library's numerics.
#![allow(dead_code)]

use paving::DenseMatrix;

/// Singular values by one-sided (Hestenes) Jacobi, decreasing.
pub fn svd_values(a: &DenseMatrix) -> Vec<f64> {
    // Work on the orientation with fewer columns.
    let (rows, cols, get): (usize, usize, Box<dyn Fn(usize, usize) -> f64>) = if a.n_cols() <= a.n_rows() {
        (a.n_rows(), a.n_cols(), Box::new(|i, j| a.get(i, j)))
    } else {
        (a.n_cols(), a.n_rows(), Box::new(|i, j| a.get(j, i)))
    };
    let mut u: Vec<Vec<f64>> = (0..cols).map(|j| (0..rows).map(|i| get(i, j)).collect()).collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = u[p].iter().map(|x| x * x).sum();
                let beta: f64 = u[q].iter().map(|x| x * x).sum();
                let gamma: f64 = u[p].iter().zip(&u[q]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (x, y) = (u[p][i], u[q][i]);
                    u[p][i] = c * x - s * y;
                    u[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = u.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn svd_norm(a: &DenseMatrix) -> f64 {
    if a.is_empty() {
        0.0
    } else {
        svd_values(a)[0]
    }
}

pub fn svd_schatten(a: &DenseMatrix, p: f64) -> f64 {
    svd_values(a).iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn sub(a: &DenseMatrix, rows: &[usize], cols: &[usize]) -> DenseMatrix {
    DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| a.get(rows[i], cols[j]))
}

pub fn mask_indices(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// `(E‖A[S,S]‖^p)^{1/p}` for Bernoulli(δ) selectors, by direct summation.
pub fn bernoulli_moment(a: &DenseMatrix, delta: f64, p: f64) -> f64 {
    let n = a.n_rows();
    let mut acc = 0.0;
    for mask in 0u64..1 << n {
        let idx = mask_indices(n, mask);
        let w = delta.powi(idx.len() as i32) * (1.0 - delta).powi((n - idx.len()) as i32);
        acc += w * svd_norm(&sub(a, &idx, &idx)).powf(p);
    }
    acc.powf(1.0 / p)
}

/// `(E‖A[S,S]‖^p)^{1/p}` for a uniformly random `k`-subset.
pub fn uniform_k_moment(a: &DenseMatrix, k: usize, p: f64) -> f64 {
    let n = a.n_rows();
    let (mut acc, mut count) = (0.0, 0u64);
    for mask in 0u64..1 << n {
        if mask.count_ones() as usize == k {
            let idx = mask_indices(n, mask);
            acc += svd_norm(&sub(a, &idx, &idx)).powf(p);
            count += 1;
        }
    }
    (acc / count as f64).powf(1.0 / p)
}

pub fn mat_pow(a: &DenseMatrix, p: u32) -> DenseMatrix {
    let n = a.n_rows();
    let mut acc = DenseMatrix::identity(n);
    for _ in 0..p {
        acc = DenseMatrix::from_fn(n, n, |i, j| (0..n).map(|k| acc.get(i, k) * a.get(k, j)).sum());
    }
    acc
}

pub fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Monomial coefficients `c_0..c_n` of `Σ_j h_j s^j (1−s)^{n−j}`.
pub fn trace_poly_bernstein(x: &DenseMatrix, p: u32) -> Vec<f64> {
    let n = x.n_rows();
    let mut h = vec![0.0; n + 1];
    for mask in 0u64..1 << n {
        let idx = mask_indices(n, mask);
        let y = sub(x, &idx, &idx);
        let t = if idx.is_empty() { 0.0 } else { mat_pow(&y, p).trace() };
        h[idx.len()] += t;
    }
    let mut c = vec![0.0; n + 1];
    for (j, hj) in h.iter().enumerate() {
        for k in j..=n {
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            c[k] += hj * sign * binom(n - j, k - j);
        }
    }
    c
}
