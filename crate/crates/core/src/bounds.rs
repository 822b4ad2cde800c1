//! Closed-form constants and bound chains. All logarithms are natural.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{PavingError, Result};

fn domain(msg: String) -> PavingError {
    PavingError::Domain(msg)
}

/// `(0.01 ε)^{−2(1+γ)/γ}`, the number of blocks that suffices.
pub fn paving_size_bound(gamma: f64, eps: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(domain(format!("gamma = {gamma} must be positive")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("eps = {eps} must lie in (0, 1)")));
    }
    Ok((0.01 * eps).powf(-2.0 * (1.0 + gamma) / gamma))
}

/// `550 μ log n + 250 √(ϱ log n)`, valid for `n ≥ 8`.
pub fn step3_bound(mu: f64, rho: f64, n: usize) -> Result<f64> {
    if n < 8 {
        return Err(domain(format!("step-3 bound needs n >= 8, got {n}")));
    }
    if !(mu >= 0.0) || !(rho >= 0.0) {
        return Err(domain(format!("mu = {mu} and rho = {rho} must be nonnegative")));
    }
    let log_n = (n as f64).ln();
    Ok(550.0 * mu * log_n + 250.0 * (rho * log_n).sqrt())
}

/// Double factorial `(p−1)!! = p! / (2^{p/2} (p/2)!)` for even `p`, exactly.
fn gaussian_moment(p: u32) -> BigUint {
    (1..p).step_by(2).fold(BigUint::from(1u32), |acc, j| acc * j)
}

/// Optimal even-order constant `C_p = ((p)!/(2^{p/2}(p/2)!))^{1/p}` (if `p`
/// is an even integer) together with the upper bound `2^{−1/4}√(π/e)√p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KhintchineConstant {
    pub p: f64,
    pub exact: Option<f64>,
    pub upper_bound: f64,
}

pub fn khintchine_constant(p: f64) -> Result<KhintchineConstant> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(domain(format!("Khintchine constant needs p >= 2, got {p}")));
    }
    let upper_bound = 2f64.powf(-0.25) * (std::f64::consts::PI / std::f64::consts::E).sqrt() * p.sqrt();
    let exact = if p.fract() == 0.0 && (p as u64).is_multiple_of(2) && p <= 340.0 {
        let moment = gaussian_moment(p as u32);
        let value = moment.to_f64().expect("fits in f64 for p <= 340").powf(1.0 / p);
        debug_assert!(value <= upper_bound);
        Some(value)
    } else {
        None
    };
    Ok(KhintchineConstant {
        p,
        exact,
        upper_bound,
    })
}

/// Scalar Khintchine bound `C_q ≤ 2^{1/4} e^{−1/2} √q`.
pub fn haagerup_constant(q: f64) -> Result<f64> {
    if !(q >= 2.0) || !q.is_finite() {
        return Err(domain(format!("scalar Khintchine constant needs q >= 2, got {q}")));
    }
    Ok(2f64.powf(0.25) * (-0.5f64).exp() * q.sqrt())
}

/// `1.5 √p ‖X‖_{1,2} ‖X‖`. The `p ≥ 2 log n` hypothesis is the caller's.
pub fn rudelson_bound(p: f64, col_norm: f64, spec_norm: f64) -> f64 {
    1.5 * p.sqrt() * col_norm * spec_norm
}

/// `(log n)^{−(1+γ)}`, the entry bound under which the theorem applies.
pub fn mu_bound(n: usize, gamma: f64) -> Result<f64> {
    if n <= 2 {
        return Err(domain(format!("entry bound needs n >= 3, got {n}")));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(domain(format!("gamma = {gamma} must be nonnegative")));
    }
    Ok((n as f64).ln().powf(-(1.0 + gamma)))
}

/// `p = 2⌈log n⌉`.
pub fn moment_order(n: usize) -> u32 {
    2 * ((n as f64).ln().ceil() as u32)
}

/// How the extrapolation target `δ` is specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaOrBlocks {
    Delta(f64),
    /// `δ = 1/m`.
    Blocks(f64),
}

/// Every intermediate value of the extrapolation argument for one `(n, γ, δ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainReport {
    pub n: usize,
    pub gamma: f64,
    pub delta: f64,
    pub log_n: f64,
    pub p: u32,
    /// `(log n)^{−(1+γ)}`
    pub mu: f64,
    /// `(log n)^{−1−2γ}`
    pub rho: f64,
    /// `550 μ log n + 250 √(ϱ log n)` at the values above.
    pub step3: f64,
    /// `800 (log n)^{−γ}`, which dominates `step3`.
    pub rho_moment_bound: f64,
    /// `γ / (2 + 2γ)`
    pub lambda: f64,
    /// `λ(1+2γ) − γ`, negative for every `γ > 0`.
    pub log_exponent: f64,
    /// `60 δ^λ + 48000 (log n)^{λ(1+2γ)−γ}`
    pub extrapolated: f64,
    /// `100 δ^λ`
    pub final_bound: f64,
    /// The `ε` certified by the final bound (equal to it).
    pub eps_certified: f64,
    /// Whether `extrapolated ≤ final_bound` already holds at this `n`.
    pub large_n_regime: bool,
    /// `log₂ n` at the smallest dyadic `n` with
    /// `48000 (log n)^{λ(1+2γ)−γ} ≤ 40 δ^λ`. An artifact-defined surrogate
    /// for "sufficiently large n", reported as a base-2 logarithm because
    /// the threshold itself overflows any float.
    pub dyadic_threshold_log2_n: f64,
}

impl ChainReport {
    /// `(0.01ε)^{2(1+γ)/γ}`: the largest `δ` whose final bound is at most `ε`.
    pub fn delta_sufficient_for(&self, eps: f64) -> f64 {
        (0.01 * eps).powf(2.0 * (1.0 + self.gamma) / self.gamma)
    }
}

impl fmt::Display for ChainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "gamma = {}", self.gamma)?;
        writeln!(f, "delta = {}", self.delta)?;
        writeln!(f, "log_n = {}", self.log_n)?;
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "mu = {}", self.mu)?;
        writeln!(f, "rho = {}", self.rho)?;
        writeln!(f, "step3_bound = {}", self.step3)?;
        writeln!(f, "rho_moment_bound = {}", self.rho_moment_bound)?;
        writeln!(f, "lambda = {}", self.lambda)?;
        writeln!(f, "log_exponent = {}", self.log_exponent)?;
        writeln!(f, "extrapolated_bound = {}", self.extrapolated)?;
        writeln!(f, "final_bound = {}", self.final_bound)?;
        writeln!(f, "eps_certified = {}", self.eps_certified)?;
        writeln!(f, "large_n_regime = {}", self.large_n_regime)?;
        writeln!(f, "dyadic_threshold_log2_n = {}", self.dyadic_threshold_log2_n)
    }
}

pub fn theorem_pipeline(n: usize, gamma: f64, target: DeltaOrBlocks) -> Result<ChainReport> {
    if n < 8 {
        return Err(domain(format!("pipeline needs n >= 8, got {n}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(domain(format!("gamma = {gamma} must be positive")));
    }
    let delta = match target {
        DeltaOrBlocks::Delta(d) => d,
        DeltaOrBlocks::Blocks(m) if m >= 1.0 => 1.0 / m,
        DeltaOrBlocks::Blocks(m) => return Err(domain(format!("m = {m} must be at least 1"))),
    };
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(domain(format!("delta = {delta} must lie in (0, 1]")));
    }
    let log_n = (n as f64).ln();
    let mu = mu_bound(n, gamma)?;
    let rho = log_n.powf(-1.0 - 2.0 * gamma);
    let step3 = step3_bound(mu, rho, n)?;
    let rho_moment_bound = 800.0 * log_n.powf(-gamma);
    let lambda = gamma / (2.0 + 2.0 * gamma);
    let log_exponent = lambda * (1.0 + 2.0 * gamma) - gamma;
    let delta_pow = delta.powf(lambda);
    let extrapolated = 60.0 * delta_pow + 48000.0 * log_n.powf(log_exponent);
    let final_bound = 100.0 * delta_pow;
    // 48000 L^e ≤ 40 δ^λ with e < 0  ⇔  L ≥ (1200 / δ^λ)^{1/(−e)}.
    let log_n_needed = (1200.0 / delta_pow).powf(1.0 / -log_exponent);
    let dyadic_threshold_log2_n = (log_n_needed / std::f64::consts::LN_2).ceil().max(3.0);
    Ok(ChainReport {
        n,
        gamma,
        delta,
        log_n,
        p: moment_order(n),
        mu,
        rho,
        step3,
        rho_moment_bound,
        lambda,
        log_exponent,
        extrapolated,
        final_bound,
        eps_certified: final_bound,
        large_n_regime: extrapolated <= final_bound,
        dyadic_threshold_log2_n,
    })
}
