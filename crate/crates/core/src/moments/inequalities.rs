//! Registry of the nine moment inequalities and their evaluation on a
//! concrete instance.
//!
//! Every case is written as `LHS ≤ RHS` where each side is a nonnegative
//! combination of constants and moments. Under [`Method::Exact`] the moments
//! come from full enumeration and the comparison allows only floating-point
//! slack. Under [`Method::MonteCarlo`] each moment gets an independent
//! stream and a violation is reported only when `LHS − RHS` exceeds three
//! combined standard errors.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{haagerup_constant, khintchine_constant, moment_order, step3_bound};
use crate::error::{PavingError, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::matrix::{column_norm_unchecked, lp_norm, max_abs_entry, schatten_norm, DenseMatrix};
use crate::random::{Draw, ProjectorModel, Seed};

use super::{exact_lp_moment, mc_lp_moment, restricted_norm, MomentEstimate};

/// Absolute slack for exact comparisons.
pub const EXACT_SLACK: f64 = 1e-12;
/// Monte Carlo comparisons tolerate this many combined standard errors.
pub const MC_SIGMAS: f64 = 3.0;
const UNIT_NORM_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InequalityCase {
    ModelEquiv,
    Decoupling,
    RestrictRv,
    Colnorm,
    Rudelson,
    NcKhintchine,
    ScalarKhintchine,
    Step3,
    Extrap,
}

impl InequalityCase {
    pub const ALL: [InequalityCase; 9] = [
        Self::ModelEquiv,
        Self::Decoupling,
        Self::RestrictRv,
        Self::Colnorm,
        Self::Rudelson,
        Self::NcKhintchine,
        Self::ScalarKhintchine,
        Self::Step3,
        Self::Extrap,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Self::ModelEquiv => "MODEL_EQUIV",
            Self::Decoupling => "DECOUPLING",
            Self::RestrictRv => "RESTRICT_RV",
            Self::Colnorm => "COLNORM",
            Self::Rudelson => "RUDELSON",
            Self::NcKhintchine => "NC_KHINTCHINE",
            Self::ScalarKhintchine => "SCALAR_KHINTCHINE",
            Self::Step3 => "STEP3",
            Self::Extrap => "EXTRAP",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::ModelEquiv => "(E‖PAP‖^p)^{1/p} ≤ (2 E‖RAR‖^p)^{1/p}, P uniform on k-subsets, R Bernoulli(k/n)",
            Self::Decoupling => "(E‖R B R‖^p)^{1/p} ≤ 20 (E‖R B R'‖^p)^{1/p} for hollow B, R and R' independent",
            Self::RestrictRv => "(E‖X R‖^p)^{1/p} ≤ 3√p (E‖X R‖_{1,2}^p)^{1/p} + √ϱ ‖X‖ for p ≥ 2 log n ≥ 2",
            Self::Colnorm => "(E‖R X‖_{1,2}^p)^{1/p} ≤ 3√p ‖X‖_max + √ϱ ‖X‖_{1,2} for p ≥ 2 log n ≥ 4",
            Self::Rudelson => "(E‖Σ ε_j x_j x_jᵀ‖^p)^{1/p} ≤ 1.5√p ‖X‖_{1,2} ‖X‖ for p ≥ 2 log n",
            Self::NcKhintchine => "(E‖Σ ε_j X_j‖_{S_p}^p)^{1/p} ≤ C_p max(‖(Σ X_j X_jᵀ)^{1/2}‖_{S_p}, ‖(Σ X_jᵀ X_j)^{1/2}‖_{S_p})",
            Self::ScalarKhintchine => "(E|Σ ε_j a_j|^q)^{1/q} ≤ 2^{1/4} e^{-1/2} √q ‖a‖₂ for each column a",
            Self::Step3 => "(E‖R A R‖^p)^{1/p} ≤ 550 μ log n + 250 √(ϱ log n) for unit-norm A, |a_jk| ≤ μ, p = 2⌈log n⌉",
            Self::Extrap => "(E‖R_δ X R_δ‖^p)^{1/p} ≤ c[δ^λ + ϱ^{-λ} (E‖R_ϱ X R_ϱ‖^p)^{1/p}], c = 60 (30 if self-adjoint)",
        }
    }
}

impl fmt::Display for InequalityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for InequalityCase {
    type Err = PavingError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|c| c.id() == norm)
            .ok_or_else(|| PavingError::Parameter(format!("unknown inequality case '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Exact,
    MonteCarlo { trials: u64, seed: Seed },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo { .. } => "mc",
        }
    }
}

/// A matrix (or matrix sequence) with the parameters a case needs.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub matrix: DenseMatrix,
    /// Summands `X_j` for the noncommutative Khintchine case.
    pub summands: Vec<DenseMatrix>,
    pub p: f64,
    /// Selector rate `ϱ`.
    pub rate: Option<f64>,
    /// Subset size for the uniform-k model.
    pub k: Option<usize>,
    /// Entry bound `μ`; defaults to the largest entry.
    pub mu: Option<f64>,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
}

impl Instance {
    pub fn new(matrix: DenseMatrix, p: f64) -> Self {
        Self {
            matrix,
            summands: Vec::new(),
            p,
            rate: None,
            k: None,
            mu: None,
            delta: None,
            lambda: None,
        }
    }

    pub fn with_summands(summands: Vec<DenseMatrix>, p: f64) -> Self {
        let first = summands.first().cloned().unwrap_or_else(|| DenseMatrix::zeros(0, 0));
        Self {
            summands,
            ..Self::new(first, p)
        }
    }

    pub fn rate(mut self, rate: f64) -> Self {
        self.rate = Some(rate);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub case: InequalityCase,
    pub n: usize,
    pub p: f64,
    pub params: Vec<(String, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_stderr: f64,
    pub rhs_stderr: f64,
    pub ratio: f64,
    pub method: &'static str,
    pub trials: u64,
    pub seed: Option<Seed>,
    pub holds: bool,
    /// Side results, e.g. whether a sharper constant also holds.
    pub notes: Vec<(String, String)>,
}

impl InequalityReport {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn note(&self, name: &str) -> Option<&str> {
        self.notes.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(
            f,
            "case={} n={} p={} params={} lhs={:.12e} rhs={:.12e} ratio={:.6} method={} trials={} seed={} holds={}",
            self.case,
            self.n,
            self.p,
            if params.is_empty() { "-".to_string() } else { params.join(";") },
            self.lhs,
            self.rhs,
            self.ratio,
            self.method,
            self.trials,
            self.seed.map_or_else(|| "-".to_string(), |s| s.to_string()),
            self.holds
        )?;
        for (k, v) in &self.notes {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

fn precondition(msg: impl Into<String>) -> PavingError {
    PavingError::Precondition(msg.into())
}

/// One side of an inequality: `constant + Σ coef · moment`.
#[derive(Default)]
struct Side {
    value: f64,
    variance: f64,
}

impl Side {
    fn constant(c: f64) -> Self {
        Self {
            value: c,
            variance: 0.0,
        }
    }

    fn add(mut self, coef: f64, m: &MomentEstimate) -> Self {
        self.value += coef * m.value;
        self.variance += (coef * m.stderr).powi(2);
        self
    }

    fn stderr(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Evaluates moments with the requested method; every call gets its own stream.
struct Evaluator {
    method: Method,
    calls: u64,
}

impl Evaluator {
    fn moment<F>(&mut self, model: ProjectorModel, p: f64, f: F) -> Result<MomentEstimate>
    where
        F: Fn(&Draw) -> f64 + Sync,
    {
        self.calls += 1;
        match self.method {
            Method::Exact => exact_lp_moment(&model, p, f),
            Method::MonteCarlo { trials, seed } => {
                mc_lp_moment(&model, p, trials, seed.derive("inequality_term", self.calls), f)
            }
        }
    }
}

fn require_rate(inst: &Instance, lo_open: bool, hi: f64) -> Result<f64> {
    let r = inst.rate.ok_or_else(|| precondition("selector rate is required"))?;
    let lo_ok = if lo_open { r > 0.0 } else { r >= 0.0 };
    if !lo_ok || !(r <= hi) || (hi < 1.0 && r >= hi) {
        return Err(precondition(format!("selector rate {r} outside the admissible range")));
    }
    Ok(r)
}

fn require_p_log(p: f64, n: usize, factor: f64, floor: f64) -> Result<()> {
    let need = factor * (n as f64).ln();
    if !(p >= need) || !(need >= floor) || !(p > 0.0) {
        return Err(precondition(format!(
            "needs p >= {factor} log n >= {floor}; got p = {p}, n = {n} ({factor} log n = {need:.4})"
        )));
    }
    Ok(())
}

fn require_square(a: &DenseMatrix) -> Result<usize> {
    if a.is_square() && !a.is_empty() {
        Ok(a.n_rows())
    } else {
        Err(precondition(format!(
            "needs a nonempty square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )))
    }
}

fn require_nonempty(a: &DenseMatrix) -> Result<()> {
    if a.is_empty() {
        Err(precondition("needs a nonempty matrix"))
    } else {
        Ok(())
    }
}

fn is_even_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as i64) % 2 == 0 && p >= 2.0
}

/// Evaluates one registry case on one instance.
pub fn verify_inequality(case: InequalityCase, inst: &Instance, method: Method) -> Result<InequalityReport> {
    let mut ev = Evaluator { method, calls: 0 };
    let p = inst.p;
    if !(p > 0.0) || !p.is_finite() {
        return Err(precondition(format!("moment order p = {p} must be positive")));
    }
    let a = &inst.matrix;
    let mut params: Vec<(String, f64)> = Vec::new();
    let mut notes: Vec<(String, String)> = Vec::new();

    let (n, lhs, rhs): (usize, Side, Side) = match case {
        InequalityCase::ModelEquiv => {
            let n = require_square(a)?;
            let k = inst.k.ok_or_else(|| precondition("subset size k is required"))?;
            if k == 0 || k > n || n % k != 0 {
                return Err(precondition(format!("needs n = k·m; got n = {n}, k = {k}")));
            }
            let rate = k as f64 / n as f64;
            params.push(("k".into(), k as f64));
            let dep = ev.moment(ProjectorModel::uniform_k(n, k)?, p, |d| restricted_norm(a, d))?;
            let ind = ev.moment(ProjectorModel::bernoulli(n, rate)?, p, |d| restricted_norm(a, d))?;
            (n, Side::default().add(1.0, &dep), Side::default().add(2f64.powf(1.0 / p), &ind))
        }
        InequalityCase::Decoupling => {
            let n = require_square(a)?;
            if a.max_abs_diagonal() != 0.0 {
                return Err(precondition("decoupling requires a zero diagonal"));
            }
            if p < 1.0 {
                return Err(precondition(format!("decoupling requires p >= 1, got {p}")));
            }
            let rate = require_rate(inst, false, 1.0)?;
            params.push(("rate".into(), rate));
            let same = ev.moment(ProjectorModel::bernoulli(n, rate)?, p, |d| restricted_norm(a, d))?;
            let pair = ev.moment(ProjectorModel::bernoulli_pair(n, rate)?, p, |d| restricted_norm(a, d))?;
            (n, Side::default().add(1.0, &same), Side::default().add(20.0, &pair))
        }
        InequalityCase::RestrictRv => {
            require_nonempty(a)?;
            let n = a.n_cols();
            require_p_log(p, n, 2.0, 2.0)?;
            let rate = require_rate(inst, false, 1.0)?;
            params.push(("rate".into(), rate));
            let model = ProjectorModel::bernoulli(n, rate)?;
            let rows: Vec<usize> = (0..a.n_rows()).collect();
            let cols_of = |d: &Draw| a.submatrix(&rows, d.subset().expect("subset").indices());
            let spec = ev.moment(model, p, |d| cols_of(d).op_norm())?;
            let col = ev.moment(model, p, |d| column_norm_unchecked(&cols_of(d)))?;
            (
                n,
                Side::default().add(1.0, &spec),
                Side::constant(rate.sqrt() * a.op_norm()).add(3.0 * p.sqrt(), &col),
            )
        }
        InequalityCase::Colnorm => {
            require_nonempty(a)?;
            let n = a.n_cols();
            require_p_log(p, n, 2.0, 4.0)?;
            let rate = require_rate(inst, false, 1.0)?;
            params.push(("rate".into(), rate));
            let model = ProjectorModel::bernoulli(a.n_rows(), rate)?;
            let cols: Vec<usize> = (0..n).collect();
            let lhs = ev.moment(model, p, |d| {
                column_norm_unchecked(&a.submatrix(d.subset().expect("subset").indices(), &cols))
            })?;
            let max_entry = max_abs_entry(a)?;
            let col_norm = column_norm_unchecked(a);
            let tail = rate.sqrt() * col_norm;
            let sharp = 2f64.powf(1.5) * p.sqrt() * max_entry + tail;
            let sharp_holds = match method {
                Method::Exact => lhs.value <= sharp + EXACT_SLACK,
                Method::MonteCarlo { .. } => lhs.value - sharp <= MC_SIGMAS * lhs.stderr,
            };
            notes.push(("sharp_constant_rhs".into(), format!("{sharp:.12e}")));
            notes.push(("sharp_constant_holds".into(), sharp_holds.to_string()));
            (
                n,
                Side::default().add(1.0, &lhs),
                Side::constant(3.0 * p.sqrt() * max_entry + tail),
            )
        }
        InequalityCase::Rudelson => {
            require_nonempty(a)?;
            let n = a.n_cols();
            require_p_log(p, n, 2.0, 0.0)?;
            let lhs = ev.moment(ProjectorModel::rademacher(n), p, |d| restricted_norm(a, d))?;
            let rhs = crate::bounds::rudelson_bound(p, column_norm_unchecked(a), a.op_norm());
            (n, Side::default().add(1.0, &lhs), Side::constant(rhs))
        }
        InequalityCase::NcKhintchine => {
            let xs = &inst.summands;
            let first = xs.first().ok_or_else(|| precondition("needs at least one summand"))?;
            let (r, c) = (first.n_rows(), first.n_cols());
            if r == 0 || c == 0 || xs.iter().any(|x| (x.n_rows(), x.n_cols()) != (r, c)) {
                return Err(precondition("summands must be nonempty and share one shape"));
            }
            if p < 2.0 {
                return Err(precondition(format!("noncommutative Khintchine needs p >= 2, got {p}")));
            }
            params.push(("summands".into(), xs.len() as f64));
            let lhs = ev.moment(ProjectorModel::rademacher(xs.len()), p, |d| {
                let Draw::Signs(eps) = d else { unreachable!() };
                let sum = xs
                    .iter()
                    .zip(eps)
                    .fold(DenseMatrix::zeros(r, c), |acc, (x, &e)| acc.add(&x.scale(e)));
                if sum.data().iter().all(|&v| v == 0.0) {
                    0.0
                } else {
                    schatten_norm(&sum, p).expect("p >= 2")
                }
            })?;
            let square_fn = |gram: DenseMatrix| -> f64 {
                let eig: Vec<f64> = symmetric_eigenvalues(&gram).into_iter().map(|l| l.max(0.0)).collect();
                lp_norm(&eig, p / 2.0).sqrt()
            };
            let row_sq = xs
                .iter()
                .fold(DenseMatrix::zeros(r, r), |acc, x| acc.add(&x.matmul(&x.transpose())));
            let col_sq = xs
                .iter()
                .fold(DenseMatrix::zeros(c, c), |acc, x| acc.add(&x.transpose().matmul(x)));
            let square = square_fn(row_sq).max(square_fn(col_sq));
            let constant = khintchine_constant(p)?;
            if let Some(exact) = constant.exact {
                let sharp = exact * square;
                notes.push(("optimal_constant_rhs".into(), format!("{sharp:.12e}")));
                let ok = match method {
                    Method::Exact => lhs.value <= sharp + EXACT_SLACK,
                    Method::MonteCarlo { .. } => lhs.value - sharp <= MC_SIGMAS * lhs.stderr,
                };
                notes.push(("optimal_constant_holds".into(), ok.to_string()));
            }
            (r, Side::default().add(1.0, &lhs), Side::constant(constant.upper_bound * square))
        }
        InequalityCase::ScalarKhintchine => {
            require_nonempty(a)?;
            let q = p;
            let c_q = haagerup_constant(q).map_err(|e| precondition(e.to_string()))?;
            let n = a.n_rows();
            let mut worst: Option<(f64, Side, Side, usize)> = None;
            for j in 0..a.n_cols() {
                let col = a.column(j);
                let lhs = ev.moment(ProjectorModel::rademacher(n), q, |d| {
                    let Draw::Signs(eps) = d else { unreachable!() };
                    col.iter().zip(eps).map(|(x, e)| x * e).sum::<f64>().abs()
                })?;
                let rhs = c_q * crate::linalg::euclidean_norm(&col);
                let lhs = Side::default().add(1.0, &lhs);
                let margin = lhs.value - rhs;
                if worst.as_ref().is_none_or(|(m, ..)| margin > *m) {
                    worst = Some((margin, lhs, Side::constant(rhs), j));
                }
            }
            let (_, lhs, rhs, col) = worst.expect("at least one column");
            params.push(("column".into(), col as f64));
            (n, lhs, rhs)
        }
        InequalityCase::Step3 => {
            let n = require_square(a)?;
            if n < 8 {
                return Err(precondition(format!("step-3 bound needs n >= 8, got {n}")));
            }
            let norm = a.op_norm();
            if !(1.0 - UNIT_NORM_TOL..=1.0 + EXACT_SLACK).contains(&norm) {
                return Err(precondition(format!("step-3 bound needs a unit-norm matrix, got ‖A‖ = {norm}")));
            }
            let order = moment_order(n) as f64;
            if p != order {
                return Err(precondition(format!("step-3 bound uses p = 2⌈log n⌉ = {order}, got {p}")));
            }
            let max_entry = max_abs_entry(a)?;
            let mu = inst.mu.unwrap_or(max_entry);
            if max_entry > mu {
                return Err(precondition(format!("entries bounded by mu = {mu} required, found {max_entry}")));
            }
            let rate = require_rate(inst, false, 1.0)?;
            params.push(("mu".into(), mu));
            params.push(("rate".into(), rate));
            let e_rho = ev.moment(ProjectorModel::bernoulli(n, rate)?, p, |d| restricted_norm(a, d))?;
            (n, Side::default().add(1.0, &e_rho), Side::constant(step3_bound(mu, rate, n)?))
        }
        InequalityCase::Extrap => {
            let n = require_square(a)?;
            let norm = a.op_norm();
            if norm > 1.0 + EXACT_SLACK {
                return Err(precondition(format!("extrapolation needs ‖X‖ <= 1, got {norm}")));
            }
            if !is_even_integer(p) {
                return Err(precondition(format!("extrapolation needs an even integer p, got {p}")));
            }
            require_p_log(p, n, 2.0, 0.0)?;
            let rho = require_rate(inst, true, 0.5)?;
            let delta = inst.delta.ok_or_else(|| precondition("delta is required"))?;
            let lambda = inst.lambda.ok_or_else(|| precondition("lambda is required"))?;
            if !(delta > 0.0 && delta < 1.0) || !(lambda > 0.0 && lambda < 1.0) {
                return Err(precondition(format!(
                    "delta = {delta} and lambda = {lambda} must lie in (0, 1)"
                )));
            }
            let constant = if a.is_symmetric(SYMMETRY_TOL) { 30.0 } else { 60.0 };
            params.extend([
                ("delta".to_string(), delta),
                ("rho".to_string(), rho),
                ("lambda".to_string(), lambda),
                ("constant".to_string(), constant),
            ]);
            let at_delta = ev.moment(ProjectorModel::bernoulli(n, delta)?, p, |d| restricted_norm(a, d))?;
            let at_rho = ev.moment(ProjectorModel::bernoulli(n, rho)?, p, |d| restricted_norm(a, d))?;
            (
                n,
                Side::default().add(1.0, &at_delta),
                Side::constant(constant * delta.powf(lambda)).add(constant * rho.powf(-lambda), &at_rho),
            )
        }
    };

    let (holds, trials, seed) = match method {
        Method::Exact => (lhs.value <= rhs.value + EXACT_SLACK, 0, None),
        Method::MonteCarlo { trials, seed } => {
            let combined = (lhs.variance + rhs.variance).sqrt();
            (lhs.value - rhs.value <= MC_SIGMAS * combined, trials, Some(seed))
        }
    };
    let ratio = if rhs.value > 0.0 {
        lhs.value / rhs.value
    } else if lhs.value == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(InequalityReport {
        case,
        n,
        p,
        params,
        lhs: lhs.value,
        rhs: rhs.value,
        lhs_stderr: lhs.stderr(),
        rhs_stderr: rhs.stderr(),
        ratio,
        method: method.name(),
        trials,
        seed,
        holds,
        notes,
    })
}

/// The extrapolation inequality for `X` at rates `δ` and `ϱ`.
pub fn check_extrapolation(
    x: &DenseMatrix,
    delta: f64,
    rho: f64,
    lambda: f64,
    p: f64,
    method: Method,
) -> Result<InequalityReport> {
    let inst = Instance::new(x.clone(), p).rate(rho).delta(delta).lambda(lambda);
    verify_inequality(InequalityCase::Extrap, &inst, method)
}
