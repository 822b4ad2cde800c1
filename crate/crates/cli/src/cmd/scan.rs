use std::fmt::Write as _;

use anyhow::{ensure, Result};
use paving::moments::pattern_count;
use paving::{
    exact_moment, max_abs_entry, mc_moment, moment_order, spectral_norm, step3_bound, DenseMatrix, MomentEstimate,
    ProjectorModel, Seed,
};

use super::{emit, read_matrix};
use crate::cli::{MethodArg, ScanArgs, Vary};
use crate::exit::Outcome;

pub const HEADER: &str = "param,value,p,estimate,stderr,trials,seed,step3_bound,extrap_bound";
const UNIT_NORM_TOL: f64 = 1e-9;
const NORM_SLACK: f64 = 1e-12;

struct Estimator<'a> {
    a: &'a DenseMatrix,
    method: MethodArg,
    trials: u64,
    seed: Seed,
}

impl Estimator<'_> {
    fn moment(&self, rate: f64, p: f64, label: &str, index: u64) -> Result<MomentEstimate> {
        let model = ProjectorModel::bernoulli(self.a.n_rows(), rate)?;
        let exact = match self.method {
            MethodArg::Exact => true,
            MethodArg::Mc => false,
            MethodArg::Auto => pattern_count(&model).is_ok(),
        };
        Ok(if exact {
            exact_moment(self.a, &model, p)?
        } else {
            mc_moment(self.a, &model, p, self.trials, self.seed.derive(label, index))?
        })
    }
}

fn is_even_integer(p: f64) -> bool {
    p >= 2.0 && p.fract() == 0.0 && (p as u64).is_multiple_of(2)
}

fn optional(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn run(args: &ScanArgs) -> Result<Outcome> {
    let a = read_matrix(&args.input)?;
    ensure!(a.is_square() && !a.is_empty(), "scan needs a nonempty square matrix, got {}x{}", a.n_rows(), a.n_cols());
    ensure!(!args.grid.is_empty(), "--grid must have at least one value");
    if args.method != MethodArg::Exact {
        ensure!(args.trials >= 2, "--trials must be at least 2");
    }
    let n = a.n_rows();
    let (name, points): (&str, Vec<(f64, f64)>) = match args.vary {
        Vary::Rho | Vary::Delta => {
            ensure!(args.p > 0.0 && args.p.is_finite(), "--p must be positive, got {}", args.p);
            for &r in &args.grid {
                ensure!((0.0..=1.0).contains(&r), "grid rate {r} outside [0, 1]");
            }
            let name = if args.vary == Vary::Rho { "rho" } else { "delta" };
            (name, args.grid.iter().map(|&r| (r, args.p)).collect())
        }
        Vary::P => {
            ensure!((0.0..=1.0).contains(&args.rate), "--rate {} outside [0, 1]", args.rate);
            for &p in &args.grid {
                ensure!(p > 0.0 && p.is_finite(), "grid order {p} must be positive");
            }
            ("p", args.grid.iter().map(|&p| (args.rate, p)).collect())
        }
    };
    ensure!(args.rho_ref > 0.0 && args.rho_ref < 0.5, "--rho-ref must lie in (0, 0.5), got {}", args.rho_ref);
    ensure!(args.lambda > 0.0 && args.lambda < 1.0, "--lambda must lie in (0, 1), got {}", args.lambda);

    let est = Estimator {
        a: &a,
        method: args.method,
        trials: args.trials,
        seed: args.seed,
    };
    let norm = spectral_norm(&a)?;
    let mu = max_abs_entry(&a)?;
    let unit = (1.0 - UNIT_NORM_TOL..=1.0 + NORM_SLACK).contains(&norm);
    let contraction = norm <= 1.0 + NORM_SLACK;
    let constant = if a.is_symmetric(NORM_SLACK) { 30.0 } else { 60.0 };
    let mut reference: Vec<(f64, f64)> = Vec::new();

    let mut csv = String::from(HEADER);
    csv.push('\n');
    for (i, &(rate, p)) in points.iter().enumerate() {
        let e = est.moment(rate, p, "scan", i as u64)?;
        let step3 = if n >= 8 && unit && p == moment_order(n) as f64 && rate > 0.0 {
            Some(step3_bound(mu, rate, n)?)
        } else {
            None
        };
        let extrap = if contraction && is_even_integer(p) && p >= 2.0 * (n as f64).ln() && rate > 0.0 && rate < 1.0 {
            let e_ref = match reference.iter().find(|(q, _)| *q == p) {
                Some(&(_, v)) => v,
                None => {
                    let v = est.moment(args.rho_ref, p, "scan_reference", p as u64)?.value;
                    reference.push((p, v));
                    v
                }
            };
            Some(constant * (rate.powf(args.lambda) + args.rho_ref.powf(-args.lambda) * e_ref))
        } else {
            None
        };
        writeln!(
            csv,
            "{name},{},{p},{},{},{},{},{},{}",
            if name == "p" { p } else { rate },
            e.value,
            e.stderr,
            e.trials,
            args.seed,
            optional(step3),
            optional(extrap)
        )?;
    }
    emit(args.out.as_deref(), &csv)?;
    Ok(Outcome::Success)
}
