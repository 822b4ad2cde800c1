//! Seeded desk-scale instance sets for every inequality, plus the Markov and
//! sandwich checks. Instance `i` of a suite depends only on `(seed, i)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{PavingError, Result};
use crate::matrix::DenseMatrix;
use crate::random::{symmetric_unit_matrix, uniform_matrix, Seed};

use super::inequalities::{verify_inequality, InequalityCase, InequalityReport, Instance, Method};
use super::pattern_count;
use super::polynomial::{
    check_markov, check_polynomial_sandwich, check_trace_markov, chebyshev_coefficients,
};
use crate::random::ProjectorModel;

/// Trials used when a `small` instance is too large for enumeration.
pub const FALLBACK_TRIALS: u64 = 20_000;
/// Highest Chebyshev degree in the Markov suite.
pub const MARKOV_MAX_DEGREE: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SizeClass {
    /// Zero matrices (identity for STEP3, whose hypotheses exclude zero).
    Smoke,
    /// `n ≤ 8`, exact enumeration throughout.
    Tiny,
    /// `n ≤ 12`; Monte Carlo where enumeration is out of reach.
    Small,
}

impl SizeClass {
    pub fn name(&self) -> &'static str {
        match self {
            SizeClass::Smoke => "smoke",
            SizeClass::Tiny => "tiny",
            SizeClass::Small => "small",
        }
    }
}

impl FromStr for SizeClass {
    type Err = PavingError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "smoke" => Ok(SizeClass::Smoke),
            "tiny" => Ok(SizeClass::Tiny),
            "small" => Ok(SizeClass::Small),
            _ => Err(PavingError::Parameter(format!("unknown size class '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuiteName {
    Case(InequalityCase),
    Markov,
    Sandwich,
}

impl SuiteName {
    pub const ALL: [SuiteName; 11] = [
        SuiteName::Case(InequalityCase::ModelEquiv),
        SuiteName::Case(InequalityCase::Decoupling),
        SuiteName::Case(InequalityCase::RestrictRv),
        SuiteName::Case(InequalityCase::Colnorm),
        SuiteName::Case(InequalityCase::Rudelson),
        SuiteName::Case(InequalityCase::NcKhintchine),
        SuiteName::Case(InequalityCase::ScalarKhintchine),
        SuiteName::Case(InequalityCase::Step3),
        SuiteName::Case(InequalityCase::Extrap),
        SuiteName::Markov,
        SuiteName::Sandwich,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            SuiteName::Case(c) => c.id(),
            SuiteName::Markov => "MARKOV",
            SuiteName::Sandwich => "SANDWICH",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SuiteName {
    type Err = PavingError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "MARKOV" => Ok(SuiteName::Markov),
            "SANDWICH" => Ok(SuiteName::Sandwich),
            _ => s.parse().map(SuiteName::Case),
        }
    }
}

/// A generated instance together with how it should be evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteInstance {
    pub case: InequalityCase,
    pub index: u64,
    pub seed: Seed,
    pub instance: Instance,
    pub method: Method,
}

fn pick<T: Copy, R: Rng>(rng: &mut R, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

fn unit_scaled(a: DenseMatrix) -> DenseMatrix {
    let norm = a.op_norm();
    if norm == 0.0 {
        a
    } else {
        a.scale(1.0 / norm)
    }
}

fn hollow(a: DenseMatrix) -> DenseMatrix {
    let n = a.n_rows();
    DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { a.get(i, j) })
}

/// Largest `n ≤ cap` with `p ≥ 2 log n`.
fn max_n_for(p: f64, cap: usize) -> usize {
    (1..=cap).rev().find(|&n| p >= 2.0 * (n as f64).ln()).unwrap_or(1)
}

fn smoke_instance(case: InequalityCase) -> Instance {
    use InequalityCase::*;
    match case {
        ModelEquiv => Instance::new(DenseMatrix::zeros(6, 6), 4.0).k(3),
        Decoupling => Instance::new(DenseMatrix::zeros(6, 6), 4.0).rate(0.5),
        RestrictRv => Instance::new(DenseMatrix::zeros(6, 6), 4.0).rate(0.5),
        Colnorm => Instance::new(DenseMatrix::zeros(8, 8), 6.0).rate(0.5),
        Rudelson => Instance::new(DenseMatrix::zeros(6, 6), 4.0),
        NcKhintchine => Instance::with_summands(vec![DenseMatrix::zeros(3, 3); 3], 4.0),
        ScalarKhintchine => Instance::new(DenseMatrix::zeros(6, 2), 4.0),
        Step3 => Instance::new(DenseMatrix::identity(8), 6.0).rate(0.25),
        Extrap => Instance::new(DenseMatrix::zeros(6, 6), 4.0).rate(0.25).delta(0.5).lambda(0.5),
    }
}

fn random_instance<R: Rng>(case: InequalityCase, size: SizeClass, seed: Seed, rng: &mut R) -> Instance {
    use InequalityCase::*;
    let cap = if size == SizeClass::Small { 12 } else { 8 };
    let p = pick(rng, &[2.0, 4.0, 6.0]);
    let rate = |rng: &mut R| rng.random_range(0.05..0.95);
    match case {
        ModelEquiv => {
            let shapes: &[(usize, usize)] = if cap == 12 {
                &[(8, 4), (9, 3), (10, 5), (12, 4), (12, 6)]
            } else {
                &[(4, 2), (6, 2), (6, 3), (8, 2), (8, 4)]
            };
            let (n, k) = pick(rng, shapes);
            Instance::new(uniform_matrix(n, n, seed, 0), p).k(k)
        }
        Decoupling => {
            let n = rng.random_range(2..=8);
            Instance::new(hollow(uniform_matrix(n, n, seed, 0)), p).rate(rate(rng))
        }
        RestrictRv => {
            // p ≥ 2 log n ≥ 2 rules out p = 2
            let p = pick(rng, &[4.0, 6.0]);
            let n = rng.random_range(3..=max_n_for(p, cap));
            let rows = rng.random_range(1..=cap);
            Instance::new(uniform_matrix(rows, n, seed, 0), p).rate(rate(rng))
        }
        Colnorm => {
            // p ≥ 2 log n ≥ 4 needs n ≥ 8
            let n = rng.random_range(8..=cap);
            let p = if cap == 12 { pick(rng, &[6.0, 8.0]) } else { 6.0 };
            let a = uniform_matrix(n, n, seed, 0);
            let a = if rng.random::<bool>() { a.scale(rng.random_range(0.01..1.0)) } else { a };
            Instance::new(a, p).rate(rate(rng))
        }
        Rudelson => {
            let n = rng.random_range(1..=max_n_for(p, cap));
            let rows = rng.random_range(1..=cap);
            Instance::new(uniform_matrix(rows, n, seed, 0), p)
        }
        NcKhintchine => {
            let count = rng.random_range(1..=cap) as u64;
            let (r, c) = (rng.random_range(1..=5), rng.random_range(1..=5));
            Instance::with_summands((0..count).map(|i| uniform_matrix(r, c, seed, i)).collect(), p)
        }
        ScalarKhintchine => {
            let rows = rng.random_range(1..=cap);
            let cols = rng.random_range(1..=4);
            Instance::new(uniform_matrix(rows, cols, seed, 0), p)
        }
        Step3 => {
            let n = rng.random_range(8..=cap);
            let a = if rng.random::<bool>() {
                symmetric_unit_matrix(n, seed, 0)
            } else {
                unit_scaled(uniform_matrix(n, n, seed, 0))
            };
            let p = crate::bounds::moment_order(n) as f64;
            Instance::new(a, p).rate(rate(rng))
        }
        Extrap => {
            let n = rng.random_range(2..=max_n_for(p, cap));
            let x = if rng.random::<bool>() {
                symmetric_unit_matrix(n, seed, 0)
            } else {
                unit_scaled(uniform_matrix(n, n, seed, 0))
            };
            let x = x.scale(rng.random_range(0.2..=1.0));
            Instance::new(x, p)
                .rate(rng.random_range(0.01..0.49))
                .delta(rng.random_range(0.01..0.99))
                .lambda(rng.random_range(0.05..0.95))
        }
    }
}

fn models_for(case: InequalityCase, inst: &Instance) -> Vec<ProjectorModel> {
    use InequalityCase::*;
    let a = &inst.matrix;
    let rate = inst.rate.unwrap_or(0.5);
    let models = match case {
        ModelEquiv => vec![
            ProjectorModel::uniform_k(a.n_rows(), inst.k.unwrap_or(1)),
            ProjectorModel::bernoulli(a.n_rows(), rate),
        ],
        Decoupling => vec![ProjectorModel::bernoulli_pair(a.n_rows(), rate)],
        RestrictRv => vec![ProjectorModel::bernoulli(a.n_cols(), rate)],
        Colnorm | Step3 | Extrap => vec![ProjectorModel::bernoulli(a.n_rows(), rate)],
        Rudelson => vec![Ok(ProjectorModel::rademacher(a.n_cols()))],
        NcKhintchine => vec![Ok(ProjectorModel::rademacher(inst.summands.len()))],
        ScalarKhintchine => vec![Ok(ProjectorModel::rademacher(a.n_rows()))],
    };
    models.into_iter().filter_map(|m| m.ok()).collect()
}

fn method_for(case: InequalityCase, inst: &Instance, seed: Seed) -> Method {
    if models_for(case, inst).iter().all(|m| pattern_count(m).is_ok()) {
        Method::Exact
    } else {
        Method::MonteCarlo {
            trials: FALLBACK_TRIALS,
            seed: seed.derive("suite_mc", 0),
        }
    }
}

/// `count` seeded instances of `case` within its hypotheses.
pub fn suite_instances(case: InequalityCase, size: SizeClass, seed: Seed, count: u64) -> Vec<SuiteInstance> {
    (0..count)
        .map(|index| {
            let inst_seed = seed.derive(case.id(), index);
            let instance = match size {
                SizeClass::Smoke => smoke_instance(case),
                _ => random_instance(case, size, inst_seed, &mut inst_seed.rng("suite_params", 0)),
            };
            let method = method_for(case, &instance, inst_seed);
            SuiteInstance {
                case,
                index,
                seed: inst_seed,
                instance,
                method,
            }
        })
        .collect()
}

/// One evaluated suite entry.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRecord {
    pub suite: SuiteName,
    pub index: u64,
    pub seed: Seed,
    pub holds: bool,
    pub line: String,
    pub report: Option<InequalityReport>,
}

impl fmt::Display for SuiteRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} #{} seed={}] {}", self.suite, self.index, self.seed, self.line)
    }
}

/// Symmetric unit-norm instances for the sandwich and trace-Markov checks.
pub fn sandwich_instances(size: SizeClass, seed: Seed, count: u64) -> Vec<(Seed, DenseMatrix, u32)> {
    (0..count)
        .map(|index| {
            let s = seed.derive("SANDWICH", index);
            if size == SizeClass::Smoke {
                return (s, DenseMatrix::zeros(6, 6), 4);
            }
            let mut rng = s.rng("suite_params", 0);
            let p: u32 = pick(&mut rng, &[4, 6]);
            let cap = if size == SizeClass::Small { 10 } else { 8 };
            let n = rng.random_range(2..=max_n_for(p as f64, cap));
            (s, symmetric_unit_matrix(n, s, 0), p)
        })
        .collect()
}

/// The nine-point grid `0.1, 0.2, …, 0.9`.
pub fn sandwich_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// Runs one suite. Errors only on hypothesis violations by the generator
/// itself, which would be a bug.
pub fn run_suite(suite: SuiteName, size: SizeClass, seed: Seed, count: u64) -> Result<Vec<SuiteRecord>> {
    match suite {
        SuiteName::Case(case) => suite_instances(case, size, seed, count)
            .into_iter()
            .map(|si| {
                let report = verify_inequality(case, &si.instance, si.method)?;
                Ok(SuiteRecord {
                    suite,
                    index: si.index,
                    seed: si.seed,
                    holds: report.holds,
                    line: report.to_string(),
                    report: Some(report),
                })
            })
            .collect(),
        SuiteName::Markov => (0..=MARKOV_MAX_DEGREE)
            .map(|d| {
                let r = check_markov(&chebyshev_coefficients(d), d)?;
                let worst = r
                    .rows
                    .iter()
                    .map(|row| if row.markov_bound > 0.0 { row.coeff.abs() / row.markov_bound } else { 0.0 })
                    .fold(0.0, f64::max);
                Ok(SuiteRecord {
                    suite,
                    index: d as u64,
                    seed,
                    holds: r.holds,
                    line: format!(
                        "case=MARKOV poly=chebyshev d={d} max_abs={:.12e} lead={} lead_bound={:.12e} worst_ratio={worst:.6} holds={}",
                        r.max_abs,
                        r.rows[d].coeff,
                        r.rows[d].markov_bound,
                        r.holds
                    ),
                    report: None,
                })
            })
            .collect(),
        SuiteName::Sandwich => {
            let grid = sandwich_grid();
            sandwich_instances(size, seed, count)
                .into_iter()
                .enumerate()
                .map(|(i, (s, x, p))| {
                    let sw = check_polynomial_sandwich(&x, p, &grid)?;
                    let tm = check_trace_markov(&x, p, 0.25)?;
                    let holds = sw.holds && tm.holds;
                    Ok(SuiteRecord {
                        suite,
                        index: i as u64,
                        seed: s,
                        holds,
                        line: format!(
                            "case=SANDWICH n={} p={p} points={} monotone={} residual={:.3e} trace_markov={} holds={holds}",
                            sw.n,
                            sw.points.len(),
                            sw.monotone,
                            sw.interpolation_residual,
                            tm.holds
                        ),
                        report: None,
                    })
                })
                .collect()
        }
    }
}
