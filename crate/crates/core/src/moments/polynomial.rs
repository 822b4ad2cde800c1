//! The trace moment `s ↦ E tr (R_s X R_s)^p` as a polynomial in the
//! selection rate, its comparison with `F(s) = E‖R_s X R_s‖^p`, and Markov's
//! coefficient bound.

use std::f64::consts::{E, PI};

use rayon::prelude::*;

use crate::error::{PavingError, Result};
use crate::matrix::DenseMatrix;
use crate::random::ProjectorModel;

use super::{exact_expectation, restricted_norm};

pub const MAX_POLY_N: usize = 12;
pub const MAX_POLY_P: u32 = 12;
/// Interpolation must reproduce out-of-sample exact values to this accuracy.
pub const RESIDUAL_TOL: f64 = 1e-8;
const SANDWICH_SLACK: f64 = 1e-9;
const NORM_SLACK: f64 = 1e-12;
const MARKOV_GRID: usize = 10_000;

/// Coefficients `c_1, …, c_p` of `Σ_k c_k s^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCoefficients {
    pub degree: usize,
    /// `coeffs[k-1] = c_k`.
    pub coeffs: Vec<f64>,
    /// Interpolated `c_0`; zero up to rounding.
    pub constant_term: f64,
    /// Largest deviation from exact values at nodes not used for fitting.
    pub interpolation_residual: f64,
}

impl PolyCoefficients {
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| (acc + c) * s)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.coeffs.get(k - 1).copied().unwrap_or(0.0)
        }
    }
}

fn check_square_small(x: &DenseMatrix) -> Result<usize> {
    if !x.is_square() {
        return Err(PavingError::Dimension(format!(
            "trace moment needs a square matrix, got {}x{}",
            x.n_rows(),
            x.n_cols()
        )));
    }
    let n = x.n_rows();
    if n > MAX_POLY_N {
        return Err(PavingError::Capacity {
            what: format!("trace moment enumeration for n = {n} (supported up to n = {MAX_POLY_N})"),
            count: 1u128 << n,
        });
    }
    Ok(n)
}

fn check_even_p(p: u32) -> Result<()> {
    if p == 0 || !p.is_multiple_of(2) || p > MAX_POLY_P {
        return Err(PavingError::Parameter(format!(
            "trace moment order must be even and in 2..={MAX_POLY_P}, got {p}"
        )));
    }
    Ok(())
}

fn trace_power(y: &DenseMatrix, p: u32) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let mut acc = y.clone();
    for _ in 1..p {
        acc = acc.matmul(y);
    }
    acc.trace()
}

/// `h[j] = Σ_{|S|=j} tr (X[S,S])^p`.
fn trace_sums(x: &DenseMatrix, p: u32) -> Vec<f64> {
    let n = x.n_rows();
    let per_mask: Vec<f64> = (0u64..1 << n)
        .into_par_iter()
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            trace_power(&x.submatrix(&idx, &idx), p)
        })
        .collect();
    let mut h = vec![0.0; n + 1];
    for (mask, t) in per_mask.into_iter().enumerate() {
        h[mask.count_ones() as usize] += t;
    }
    h
}

fn eval_trace_sums(h: &[f64], s: f64) -> f64 {
    let n = h.len() - 1;
    h.iter()
        .enumerate()
        .map(|(j, &hj)| {
            if hj == 0.0 {
                0.0
            } else {
                hj * s.powi(j as i32) * (1.0 - s).powi((n - j) as i32)
            }
        })
        .sum()
}

/// Exact `E tr (R_s X R_s)^p` by enumerating all `2^n` coordinate patterns.
pub fn exact_trace_moment(x: &DenseMatrix, p: u32, s: f64) -> Result<f64> {
    check_square_small(x)?;
    check_even_p(p)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(PavingError::Parameter(format!("selection rate {s} outside [0, 1]")));
    }
    Ok(eval_trace_sums(&trace_sums(x, p), s))
}

/// Chebyshev points of the first kind mapped to `(0, 1)`.
fn chebyshev_nodes(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (1.0 - ((2 * i + 1) as f64 * PI / (2 * count) as f64).cos()) / 2.0)
        .collect()
}

/// Newton divided differences, then expansion into monomial coefficients.
fn interpolate(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let mut dd = values.to_vec();
    for level in 1..m {
        for i in (level..m).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // Horner on the Newton form: poly = dd[m-1]; poly = poly·(s − x_i) + dd[i].
    let mut poly = vec![0.0; m];
    poly[0] = dd[m - 1];
    let mut len = 1;
    for i in (0..m - 1).rev() {
        for k in (0..len).rev() {
            poly[k + 1] += poly[k];
            poly[k] *= -nodes[i];
        }
        len += 1;
        poly[0] += dd[i];
    }
    poly
}

/// Fits `Σ_{k=1}^p c_k s^k` to the exact trace moment at `p+1` Chebyshev
/// nodes in `(0, 1)`.
pub fn trace_moment_polynomial(x: &DenseMatrix, p: u32) -> Result<PolyCoefficients> {
    check_square_small(x)?;
    check_even_p(p)?;
    let h = trace_sums(x, p);
    let nodes = chebyshev_nodes(p as usize + 1);
    let values: Vec<f64> = nodes.iter().map(|&s| eval_trace_sums(&h, s)).collect();
    let poly = interpolate(&nodes, &values);
    let fitted = PolyCoefficients {
        degree: p as usize,
        coeffs: poly[1..].to_vec(),
        constant_term: poly[0],
        interpolation_residual: 0.0,
    };
    let check_points = chebyshev_nodes(2 * p as usize + 3);
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let residual = check_points
        .iter()
        .chain([1.0].iter())
        .map(|&s| (fitted.eval(s) + fitted.constant_term - eval_trace_sums(&h, s)).abs() / scale)
        .fold(fitted.constant_term.abs() / scale, f64::max);
    Ok(PolyCoefficients {
        interpolation_residual: residual,
        ..fitted
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichPoint {
    pub s: f64,
    /// `F(s) = E‖R_s X R_s‖^p`.
    pub f: f64,
    pub trace_exact: f64,
    pub trace_poly: f64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    pub n: usize,
    pub p: u32,
    pub points: Vec<SandwichPoint>,
    pub interpolation_residual: f64,
    /// `F` nondecreasing along the sorted grid.
    pub monotone: bool,
    pub holds: bool,
}

fn sandwich_hypotheses(x: &DenseMatrix, p: u32) -> Result<usize> {
    let n = check_square_small(x)?;
    check_even_p(p)?;
    let pre = |m: String| Err(PavingError::Precondition(m));
    if n == 0 {
        return pre("needs a nonempty matrix".into());
    }
    if !x.is_symmetric(NORM_SLACK) {
        return pre("trace sandwich needs a self-adjoint matrix".into());
    }
    let norm = x.op_norm();
    if norm > 1.0 + NORM_SLACK {
        return pre(format!("needs ‖X‖ <= 1, got {norm}"));
    }
    if (p as f64) < 2.0 * (n as f64).ln() {
        return pre(format!("needs p >= 2 log n; got p = {p}, n = {n}"));
    }
    Ok(n)
}

fn f_moment(x: &DenseMatrix, p: u32, s: f64) -> Result<f64> {
    let model = ProjectorModel::bernoulli(x.n_rows(), s)?;
    exact_expectation(&model, |d| restricted_norm(x, d).powi(p as i32))
}

fn within(lo: f64, hi: f64) -> bool {
    lo <= hi + SANDWICH_SLACK * hi.abs().max(1.0)
}

/// Checks `F(s) ≤ E tr (R_s X R_s)^p ≤ e^p F(s)` on `s_grid`, for both the
/// enumerated trace moment and its fitted polynomial.
pub fn check_polynomial_sandwich(x: &DenseMatrix, p: u32, s_grid: &[f64]) -> Result<SandwichReport> {
    let n = sandwich_hypotheses(x, p)?;
    if s_grid.is_empty() || s_grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(PavingError::Parameter("grid must be nonempty with points in [0, 1]".into()));
    }
    let poly = trace_moment_polynomial(x, p)?;
    let h = trace_sums(x, p);
    let growth = (p as f64).exp();
    let mut points = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let f = f_moment(x, p, s)?;
        let trace_exact = eval_trace_sums(&h, s);
        let trace_poly = poly.eval(s);
        let upper = growth * f;
        let holds = [trace_exact, trace_poly]
            .iter()
            .all(|&t| within(f, t) && within(t, upper));
        points.push(SandwichPoint {
            s,
            f,
            trace_exact,
            trace_poly,
            upper,
            holds,
        });
    }
    let mut sorted: Vec<&SandwichPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.s.total_cmp(&b.s));
    let monotone = sorted.windows(2).all(|w| within(w[0].f, w[1].f));
    let holds = monotone && poly.interpolation_residual < RESIDUAL_TOL && points.iter().all(|pt| pt.holds);
    Ok(SandwichReport {
        n,
        p,
        points,
        interpolation_residual: poly.interpolation_residual,
        monotone,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovRow {
    pub k: usize,
    pub coeff: f64,
    /// `d^k / k! · max|r|`.
    pub markov_bound: f64,
    /// `e^d · max|r|`.
    pub exp_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovReport {
    pub degree: usize,
    pub max_abs: f64,
    pub rows: Vec<MarkovRow>,
    pub holds: bool,
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// `max_{|t| ≤ 1} |r(t)|`: a uniform grid with both endpoints, then a
/// golden-section refinement around the best interior grid point.
fn max_abs_on_unit_interval(coeffs: &[f64]) -> f64 {
    let f = |t: f64| horner(coeffs, t).abs();
    let step = 2.0 / MARKOV_GRID as f64;
    let mut best = f(-1.0).max(f(1.0));
    let mut best_t = 1.0;
    for i in 1..MARKOV_GRID {
        let t = -1.0 + i as f64 * step;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = ((best_t - step).max(-1.0), (best_t + step).min(1.0));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if f(a) >= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    best.max(f((lo + hi) / 2.0))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Checks `|c_k| ≤ (d^k/k!) max_{|t|≤1}|r(t)| ≤ e^d max_{|t|≤1}|r(t)|` for
/// `r(t) = Σ c_k t^k`, given as `c_0, c_1, …`.
pub fn check_markov(coeffs: &[f64], d: usize) -> Result<MarkovReport> {
    let actual = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if actual > d {
        return Err(PavingError::Parameter(format!(
            "polynomial has degree {actual}, larger than d = {d}"
        )));
    }
    let max_abs = max_abs_on_unit_interval(coeffs);
    let exp_bound = E.powi(d as i32) * max_abs;
    let rows: Vec<MarkovRow> = coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let markov_bound = (d as f64).powi(k as i32) / factorial(k) * max_abs;
            let tol = 1e-12 * markov_bound.max(1.0);
            MarkovRow {
                k,
                coeff: c,
                markov_bound,
                exp_bound,
                holds: c.abs() <= markov_bound + tol && markov_bound <= exp_bound + tol,
            }
        })
        .collect();
    let holds = rows.iter().all(|r| r.holds);
    Ok(MarkovReport {
        degree: d,
        max_abs,
        rows,
        holds,
    })
}

/// Monomial coefficients of the Chebyshev polynomial `T_d`, lowest first.
/// Computed in integer arithmetic, so exact for `d ≤ 60`.
pub fn chebyshev_coefficients(d: usize) -> Vec<f64> {
    let mut prev: Vec<i128> = vec![1];
    if d == 0 {
        return vec![1.0];
    }
    let mut cur: Vec<i128> = vec![0, 1];
    for _ in 1..d {
        let mut next = vec![0i128; cur.len() + 1];
        for (k, &c) in cur.iter().enumerate() {
            next[k + 1] += 2 * c;
        }
        for (k, &c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur.into_iter().map(|c| c as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceMarkovReport {
    pub p: u32,
    pub rho: f64,
    /// `F(ϱ)`.
    pub f_rho: f64,
    /// `|c_k| ϱ^k` for `k = 1..=p`.
    pub scaled: Vec<f64>,
    /// `e^{3p} F(ϱ)`.
    pub bound: f64,
    /// Markov's bound applied to `r(t) = Σ c_k ϱ^k t^{2k}` of degree `2p`.
    pub markov: MarkovReport,
    pub holds: bool,
}

/// Substitutes `s = ϱt²` into the trace polynomial and checks
/// `|c_k| ϱ^k ≤ e^{3p} F(ϱ)` through Markov's bound.
pub fn check_trace_markov(x: &DenseMatrix, p: u32, rho: f64) -> Result<TraceMarkovReport> {
    sandwich_hypotheses(x, p)?;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(PavingError::Parameter(format!("rho = {rho} outside (0, 1]")));
    }
    let poly = trace_moment_polynomial(x, p)?;
    let mut r = vec![0.0; 2 * p as usize + 1];
    let mut scaled = Vec::with_capacity(p as usize);
    for k in 1..=p as usize {
        let v = poly.coeff(k) * rho.powi(k as i32);
        r[2 * k] = v;
        scaled.push(v.abs());
    }
    let markov = check_markov(&r, 2 * p as usize)?;
    let f_rho = f_moment(x, p, rho)?;
    let bound = (3.0 * p as f64).exp() * f_rho;
    let tol = SANDWICH_SLACK * bound.max(1.0);
    let holds = markov.holds && scaled.iter().all(|&v| v <= bound + tol);
    Ok(TraceMarkovReport {
        p,
        rho,
        f_rho,
        scaled,
        bound,
        markov,
        holds,
    })
}
