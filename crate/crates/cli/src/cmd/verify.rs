use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use paving::moments::suite::{run_suite, SizeClass, SuiteName};
use paving::Seed;

use super::emit;
use crate::cli::{Size, VerifyArgs};
use crate::exit::Outcome;

const MANIFEST: &str = include_str!("../../fixtures/verify_manifest.txt");

#[derive(Debug, PartialEq)]
pub struct ManifestEntry {
    pub suite: SuiteName,
    pub size: SizeClass,
    pub seed: Seed,
    pub count: u64,
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [suite, size, seed, count] = fields[..] else {
            bail!("manifest line {}: expected 4 fields", i + 1);
        };
        out.push(ManifestEntry {
            suite: suite.parse().with_context(|| format!("manifest line {}", i + 1))?,
            size: size.parse().with_context(|| format!("manifest line {}", i + 1))?,
            seed: seed.parse().with_context(|| format!("manifest line {}", i + 1))?,
            count: count.parse().with_context(|| format!("manifest line {}", i + 1))?,
        });
    }
    Ok(out)
}

fn size_class(size: Size) -> SizeClass {
    match size {
        Size::Smoke => SizeClass::Smoke,
        Size::Tiny => SizeClass::Tiny,
        Size::Small => SizeClass::Small,
    }
}

pub fn run(args: &VerifyArgs) -> Result<Outcome> {
    let suites: Vec<SuiteName> = if args.suite.eq_ignore_ascii_case("all") {
        SuiteName::ALL.to_vec()
    } else {
        vec![args.suite.parse()?]
    };
    let size = size_class(args.size);
    let manifest = parse_manifest(MANIFEST)?;
    let mut report = String::new();
    let (mut passed, mut total) = (0u64, 0u64);
    let mut violations = Vec::new();
    for suite in suites {
        let entry = manifest
            .iter()
            .find(|e| e.suite == suite && e.size == size)
            .with_context(|| format!("no manifest entry for {suite} at size {}", size.name()))?;
        let seed = args.seed.unwrap_or(entry.seed);
        let count = args.count.unwrap_or(entry.count);
        let records = run_suite(suite, size, seed, count)?;
        let ok = records.iter().filter(|r| r.holds).count() as u64;
        for r in &records {
            writeln!(report, "{r}")?;
            if !r.holds {
                violations.push(format!("{suite} instance {} seed {}", r.index, r.seed));
            }
        }
        writeln!(report, "suite {suite}: {ok}/{} hold", records.len())?;
        passed += ok;
        total += records.len() as u64;
    }
    writeln!(report, "summary: size={} passed={passed} total={total}", size.name())?;
    print!("{report}");
    if let Some(path) = &args.out {
        emit(Some(path), &report)?;
    }
    if violations.is_empty() {
        Ok(Outcome::Success)
    } else {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        Ok(Outcome::Violation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_covers_every_suite_and_size() {
        let m = parse_manifest(MANIFEST).unwrap();
        for suite in SuiteName::ALL {
            for size in [SizeClass::Smoke, SizeClass::Tiny, SizeClass::Small] {
                assert_eq!(m.iter().filter(|e| e.suite == suite && e.size == size).count(), 1, "{suite}");
            }
        }
    }
}
