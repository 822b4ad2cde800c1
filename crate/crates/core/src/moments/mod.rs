//! Moments `(E‖·‖^p)^{1/p}` of norms of randomly restricted matrices, by
//! exact enumeration of the selector pattern space or by seeded Monte Carlo.
//!
//! Both routes share one contract: a model, a functional `Draw -> f64`, and
//! an order `p`. Exact enumeration visits patterns in binary-counter order
//! (combination rank order for uniform-k) and sums in that order, so results
//! are bitwise reproducible even though the norms are computed in parallel.

mod inequalities;
mod polynomial;
pub mod suite;

pub use inequalities::{
    check_extrapolation, verify_inequality, InequalityCase, InequalityReport, Instance, Method,
};
pub use polynomial::{
    chebyshev_coefficients, check_markov, check_polynomial_sandwich, check_trace_markov,
    exact_trace_moment, trace_moment_polynomial, MarkovReport, MarkovRow, PolyCoefficients,
    SandwichPoint, SandwichReport, TraceMarkovReport,
};

use rayon::prelude::*;

use crate::error::{PavingError, Result};
use crate::matrix::{CoordinateSet, DenseMatrix};
use crate::paving::binomial;
use crate::random::{sample_subset, Draw, ProjectorModel, Seed};

pub const MAX_BERNOULLI_N: usize = 14;
pub const MAX_PAIR_N: usize = 8;
pub const MAX_SIGNS_N: usize = 14;
pub const MAX_UNIFORM_K_PATTERNS: u128 = 1_000_000;

/// `(E X^p)^{1/p}` for a nonnegative random quantity `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    pub p: f64,
    /// Zero for exact enumeration.
    pub trials: u64,
    /// Delta-method standard error; zero for exact enumeration.
    pub stderr: f64,
    pub seed: Option<Seed>,
    pub model: ProjectorModel,
}

impl MomentEstimate {
    pub fn is_exact(&self) -> bool {
        self.trials == 0
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(PavingError::Parameter(format!("moment order p = {p} must be positive")))
    }
}

/// Size of the exact pattern space, or a capacity error.
pub fn pattern_count(model: &ProjectorModel) -> Result<u64> {
    model.validate()?;
    let too_big = |what: &str, count: u128| PavingError::Capacity {
        what: format!("exact enumeration of {what}"),
        count,
    };
    match *model {
        ProjectorModel::Bernoulli { n, .. } => {
            if n > MAX_BERNOULLI_N {
                return Err(too_big(&model.describe(), 1u128 << n.min(127)));
            }
            Ok(1 << n)
        }
        ProjectorModel::BernoulliPair { n, .. } => {
            if n > MAX_PAIR_N {
                return Err(too_big(&model.describe(), 1u128 << (2 * n).min(127)));
            }
            Ok(1 << (2 * n))
        }
        ProjectorModel::RademacherSigns { n } => {
            if n > MAX_SIGNS_N {
                return Err(too_big(&model.describe(), 1u128 << n.min(127)));
            }
            Ok(1 << n)
        }
        ProjectorModel::UniformK { n, k } => {
            let c = binomial_saturating(n, k);
            if c > MAX_UNIFORM_K_PATTERNS {
                return Err(too_big(&model.describe(), c));
            }
            Ok(c as u64)
        }
    }
}

fn binomial_saturating(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

fn bernoulli_weight(n: usize, count: usize, rate: f64) -> f64 {
    if rate == 0.0 {
        return if count == 0 { 1.0 } else { 0.0 };
    }
    if rate == 1.0 {
        return if count == n { 1.0 } else { 0.0 };
    }
    (count as f64 * rate.ln() + (n - count) as f64 * (-rate).ln_1p()).exp()
}

/// Unranks the `index`-th `k`-subset of `0..n` in colexicographic order.
fn unrank_combination(n: usize, k: usize, mut index: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut upper = n;
    for slot in (1..=k).rev() {
        // Largest c < upper with C(c, slot) <= index.
        let mut c = slot - 1;
        while c + 1 < upper && binomial(c + 1, slot) <= index {
            c += 1;
        }
        index -= binomial(c, slot);
        out.push(c);
        upper = c;
    }
    out.reverse();
    out
}

/// Pattern `index` of the exact space with its probability.
fn pattern(model: &ProjectorModel, index: u64) -> (Draw, f64) {
    match *model {
        ProjectorModel::Bernoulli { n, rate } => {
            let set = CoordinateSet::from_mask(n, index);
            let w = bernoulli_weight(n, set.len(), rate);
            (Draw::Subset(set), w)
        }
        ProjectorModel::BernoulliPair { n, rate } => {
            let lo = CoordinateSet::from_mask(n, index & ((1 << n) - 1));
            let hi = CoordinateSet::from_mask(n, index >> n);
            let w = bernoulli_weight(n, lo.len(), rate) * bernoulli_weight(n, hi.len(), rate);
            (Draw::Pair(lo, hi), w)
        }
        ProjectorModel::RademacherSigns { n } => {
            let signs = (0..n)
                .map(|i| if index >> i & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            (Draw::Signs(signs), 0.5f64.powi(n as i32))
        }
        ProjectorModel::UniformK { n, k } => {
            let idx = unrank_combination(n, k, u128::from(index));
            let w = 1.0 / binomial(n, k) as f64;
            (
                Draw::Subset(CoordinateSet::new(n, idx).expect("increasing")),
                w,
            )
        }
    }
}

/// `(weight, f(draw))` over every pattern with positive probability, in
/// pattern order.
pub fn enumerate_values<F>(model: &ProjectorModel, f: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&Draw) -> f64 + Sync,
{
    let count = pattern_count(model)?;
    Ok((0..count)
        .into_par_iter()
        .filter_map(|i| {
            let (draw, w) = pattern(model, i);
            (w > 0.0).then(|| (w, f(&draw)))
        })
        .collect())
}

/// Exact `E f(draw)`.
pub fn exact_expectation<F>(model: &ProjectorModel, f: F) -> Result<f64>
where
    F: Fn(&Draw) -> f64 + Sync,
{
    Ok(enumerate_values(model, f)?.iter().map(|(w, v)| w * v).sum())
}

/// Weighted `ℓ_p` mean of nonnegative values, rescaled by the maximum so
/// that large `p` cannot overflow. A constant sample returns that constant.
fn weighted_lp_mean(values: &[(f64, f64)], p: f64) -> f64 {
    let scale = values.iter().fold(0.0, |m: f64, &(_, v)| m.max(v));
    if scale == 0.0 {
        return 0.0;
    }
    if values.iter().all(|&(_, v)| v == scale) {
        let total: f64 = values.iter().map(|(w, _)| w).sum();
        if total == 1.0 {
            return scale;
        }
    }
    let s: f64 = values.iter().map(|&(w, v)| w * (v / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

/// Exact `(E f^p)^{1/p}` over the model's full pattern space.
pub fn exact_lp_moment<F>(model: &ProjectorModel, p: f64, f: F) -> Result<MomentEstimate>
where
    F: Fn(&Draw) -> f64 + Sync,
{
    check_p(p)?;
    let values = enumerate_values(model, f)?;
    Ok(MomentEstimate {
        value: weighted_lp_mean(&values, p),
        p,
        trials: 0,
        stderr: 0.0,
        seed: None,
        model: *model,
    })
}

/// `f` evaluated on draws `0..trials` of the model's seeded stream.
pub fn sample_values<F>(model: &ProjectorModel, trials: u64, seed: Seed, f: F) -> Vec<f64>
where
    F: Fn(&Draw) -> f64 + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(&sample_subset(model, seed, i)))
        .collect()
}

/// Sample `ℓ_p` mean with a delta-method standard error:
/// `se(M^{1/p}) ≈ (1/p) M^{1/p − 1} se(M)` where `M` is the sample mean of `f^p`.
pub fn lp_mean_with_stderr(values: &[f64], p: f64) -> (f64, f64) {
    let scale = values.iter().fold(0.0, |m: f64, &v| m.max(v));
    if scale == 0.0 {
        return (0.0, 0.0);
    }
    if values.iter().all(|&v| v == scale) {
        return (scale, 0.0);
    }
    let n = values.len() as f64;
    let powered: Vec<f64> = values.iter().map(|v| (v / scale).powf(p)).collect();
    let mean = powered.iter().sum::<f64>() / n;
    let var = powered.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let se_mean = (var / n).sqrt();
    let value = scale * mean.powf(1.0 / p);
    let stderr = scale * mean.powf(1.0 / p - 1.0) * se_mean / p;
    (value, stderr)
}

pub fn mc_lp_moment<F>(model: &ProjectorModel, p: f64, trials: u64, seed: Seed, f: F) -> Result<MomentEstimate>
where
    F: Fn(&Draw) -> f64 + Sync,
{
    check_p(p)?;
    model.validate()?;
    if trials < 2 {
        return Err(PavingError::Parameter(format!(
            "Monte Carlo needs at least 2 trials, got {trials}"
        )));
    }
    let values = sample_values(model, trials, seed, f);
    let (value, stderr) = lp_mean_with_stderr(&values, p);
    Ok(MomentEstimate {
        value,
        p,
        trials,
        stderr,
        seed: Some(seed),
        model: *model,
    })
}

/// Norm of `A` under one draw:
/// a subset `S` gives `‖A[S,S]‖`, a pair `(S,T)` gives `‖A[S,T]‖`, and signs
/// give the Rademacher column sum `‖Σ_j ε_j a_j a_jᵀ‖`.
pub fn restricted_norm(a: &DenseMatrix, draw: &Draw) -> f64 {
    match draw {
        Draw::Subset(s) => a.submatrix(s.indices(), s.indices()).op_norm(),
        Draw::Pair(s, t) => a.submatrix(s.indices(), t.indices()).op_norm(),
        Draw::Signs(eps) => rademacher_column_sum(a, eps).op_norm(),
    }
}

/// `Σ_j ε_j a_j a_jᵀ = A diag(ε) Aᵀ`.
pub(crate) fn rademacher_column_sum(a: &DenseMatrix, eps: &[f64]) -> DenseMatrix {
    let scaled = DenseMatrix::from_fn(a.n_rows(), a.n_cols(), |i, j| a.get(i, j) * eps[j]);
    scaled.matmul(&a.transpose())
}

fn check_model_fits(a: &DenseMatrix, model: &ProjectorModel) -> Result<()> {
    model.validate()?;
    let ok = match model {
        ProjectorModel::RademacherSigns { n } => a.n_cols() == *n,
        _ => a.is_square() && a.n_rows() == model.dim(),
    };
    if ok {
        Ok(())
    } else {
        Err(PavingError::Dimension(format!(
            "{} does not fit a {}x{} matrix",
            model.describe(),
            a.n_rows(),
            a.n_cols()
        )))
    }
}

/// Exact `(E‖·‖^p)^{1/p}` of the restricted norm (see [`restricted_norm`]).
pub fn exact_moment(a: &DenseMatrix, model: &ProjectorModel, p: f64) -> Result<MomentEstimate> {
    check_model_fits(a, model)?;
    exact_lp_moment(model, p, |d| restricted_norm(a, d))
}

/// Exact moments for several orders from one enumeration.
pub fn exact_moments(a: &DenseMatrix, model: &ProjectorModel, ps: &[f64]) -> Result<Vec<MomentEstimate>> {
    check_model_fits(a, model)?;
    ps.iter().try_for_each(|&p| check_p(p))?;
    let values = enumerate_values(model, |d| restricted_norm(a, d))?;
    Ok(ps
        .iter()
        .map(|&p| MomentEstimate {
            value: weighted_lp_mean(&values, p),
            p,
            trials: 0,
            stderr: 0.0,
            seed: None,
            model: *model,
        })
        .collect())
}

/// Monte Carlo `(E‖·‖^p)^{1/p}`, deterministic given `seed`.
pub fn mc_moment(a: &DenseMatrix, model: &ProjectorModel, p: f64, trials: u64, seed: Seed) -> Result<MomentEstimate> {
    check_model_fits(a, model)?;
    mc_lp_moment(model, p, trials, seed, |d| restricted_norm(a, d))
}

/// Monte Carlo moments for several orders from one set of draws.
pub fn mc_moments(
    a: &DenseMatrix,
    model: &ProjectorModel,
    ps: &[f64],
    trials: u64,
    seed: Seed,
) -> Result<Vec<MomentEstimate>> {
    check_model_fits(a, model)?;
    ps.iter().try_for_each(|&p| check_p(p))?;
    if trials < 2 {
        return Err(PavingError::Parameter(format!(
            "Monte Carlo needs at least 2 trials, got {trials}"
        )));
    }
    let values = sample_values(model, trials, seed, |d| restricted_norm(a, d));
    Ok(ps
        .iter()
        .map(|&p| {
            let (value, stderr) = lp_mean_with_stderr(&values, p);
            MomentEstimate {
                value,
                p,
                trials,
                stderr,
                seed: Some(seed),
                model: *model,
            }
        })
        .collect())
}
