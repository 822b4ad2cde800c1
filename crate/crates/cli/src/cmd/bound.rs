use anyhow::{Context, Result};
use paving::{
    haagerup_constant, khintchine_constant, mu_bound, paving_size_bound, rudelson_bound, step3_bound,
    theorem_pipeline, DeltaOrBlocks,
};

use crate::cli::{BoundArgs, BoundName};
use crate::exit::Outcome;

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.with_context(|| format!("this bound needs --{flag}"))
}

pub fn run(args: &BoundArgs) -> Result<Outcome> {
    match args.name {
        BoundName::PavingSize => {
            let (gamma, eps) = (need(args.gamma, "gamma")?, need(args.eps, "eps")?);
            println!("paving_size_bound = {}", paving_size_bound(gamma, eps)?);
        }
        BoundName::Step3 => {
            let (mu, rho, n) = (need(args.mu, "mu")?, need(args.rho, "rho")?, need(args.n, "n")?);
            println!("step3_bound = {}", step3_bound(mu, rho, n)?);
        }
        BoundName::Khintchine => {
            let k = khintchine_constant(need(args.p, "p")?)?;
            println!("p = {}", k.p);
            match k.exact {
                Some(v) => println!("exact = {v}"),
                None => println!("exact = -"),
            }
            println!("upper_bound = {}", k.upper_bound);
        }
        BoundName::Haagerup => {
            println!("haagerup_constant = {}", haagerup_constant(need(args.q, "q")?)?);
        }
        BoundName::Rudelson => {
            let p = need(args.p, "p")?;
            let value = rudelson_bound(p, need(args.col_norm, "col-norm")?, need(args.spec_norm, "spec-norm")?);
            println!("rudelson_bound = {value}");
        }
        BoundName::Mu => {
            println!("mu_bound = {}", mu_bound(need(args.n, "n")?, need(args.gamma, "gamma")?)?);
        }
        BoundName::Pipeline => {
            let target = match (args.delta, args.m) {
                (_, Some(m)) => DeltaOrBlocks::Blocks(m),
                (Some(d), None) => DeltaOrBlocks::Delta(d),
                (None, None) => DeltaOrBlocks::Delta(0.5),
            };
            let report = theorem_pipeline(need(args.n, "n")?, need(args.gamma, "gamma")?, target)?;
            print!("{report}");
            if let Some(eps) = args.eps {
                println!("delta_sufficient_for_eps = {}", report.delta_sufficient_for(eps));
            }
        }
    }
    Ok(Outcome::Success)
}
