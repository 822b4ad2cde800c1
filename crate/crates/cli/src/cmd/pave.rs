use anyhow::{ensure, Result};
use paving::{exhaustive_pave, pad_to_multiple, paving_quality, random_pave, spectral_norm};

use super::{emit, read_matrix};
use crate::cli::PaveArgs;
use crate::exit::Outcome;

pub fn run(args: &PaveArgs) -> Result<Outcome> {
    let a = read_matrix(&args.input)?;
    ensure!(a.is_square() && !a.is_empty(), "paving needs a nonempty square matrix, got {}x{}", a.n_rows(), a.n_cols());
    ensure!(args.m >= 1, "--m must be at least 1");
    ensure!(args.trials >= 1, "--trials must be at least 1");
    let n = a.n_rows();
    let padded = pad_to_multiple(&a, args.m)?;
    if padded.n_rows() != n {
        eprintln!(
            "warning: n = {n} is not a multiple of m = {}; padded with {} zero rows and columns",
            args.m,
            padded.n_rows() - n
        );
    }
    let result = if args.exhaustive {
        exhaustive_pave(&padded, args.m, !args.unbalanced)?
    } else {
        random_pave(&padded, args.m, args.trials, args.seed)?
    };
    let partition = result.partition.restricted_to(n);
    let quality = paving_quality(&a, &partition)?;
    let norm = spectral_norm(&a)?;

    println!("n = {n}");
    println!("padded_n = {}", padded.n_rows());
    println!("m = {}", args.m);
    println!("method = {}", if args.exhaustive { "exhaustive" } else { "random" });
    println!("trials_used = {}", result.trials_used);
    println!("best_trial_index = {}", result.best_trial_index);
    match result.seed {
        Some(s) => println!("seed = {s}"),
        None => println!("seed = -"),
    }
    println!("spectral_norm = {norm}");
    println!("quality = {quality}");
    println!("relative_quality = {}", if norm > 0.0 { quality / norm } else { 0.0 });
    println!("blocks = {}", partition.num_blocks());
    if let Some(eps) = args.eps {
        ensure!(eps >= 0.0, "--eps must be nonnegative");
        println!("eps = {eps}");
        println!("within_3eps = {}", quality <= 3.0 * eps);
        println!("within_6eps = {}", quality <= 6.0 * eps);
    }
    if let Some(path) = &args.out {
        emit(Some(path), &partition.to_text())?;
        println!("partition = {}", path.display());
    } else {
        print!("{}", partition.to_text());
    }
    Ok(Outcome::Success)
}
