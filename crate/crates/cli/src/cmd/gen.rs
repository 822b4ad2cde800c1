use anyhow::{ensure, Result};
use paving::{gen_ensemble, max_abs_entry, mu_bound, spectral_norm, EnsembleKind};

use super::emit;
use crate::cli::GenArgs;
use crate::exit::Outcome;

const UNIT_NORM_TOL: f64 = 1e-9;

pub fn run(args: &GenArgs) -> Result<Outcome> {
    ensure!(args.gamma > 0.0, "--gamma must be positive, got {}", args.gamma);
    let kind = EnsembleKind::from_name(&args.kind, args.mu)?;
    let a = gen_ensemble(kind, args.n, args.seed)?;
    emit(args.out.as_deref(), &a.to_text())?;

    let norm = spectral_norm(&a)?;
    let entry = max_abs_entry(&a)?;
    let unit = (norm - 1.0).abs() <= UNIT_NORM_TOL;
    let report = |k: &str, v: String| {
        if args.out.is_some() {
            println!("{k} = {v}");
        } else {
            eprintln!("{k} = {v}");
        }
    };
    report("kind", kind.name().to_string());
    report("n", args.n.to_string());
    report("seed", args.seed.to_string());
    report("spectral_norm", format!("{norm}"));
    report("max_abs_entry", format!("{entry}"));
    report("hollow", (a.max_abs_diagonal() == 0.0).to_string());
    match mu_bound(args.n, args.gamma) {
        Ok(mu) => {
            report("entry_bound", format!("{mu} (gamma = {})", args.gamma));
            report("unit_norm", unit.to_string());
            report("hypotheses_hold", (unit && entry <= mu).to_string());
        }
        Err(_) => report("hypotheses_hold", "n/a (needs n >= 3)".to_string()),
    }
    Ok(Outcome::Success)
}
