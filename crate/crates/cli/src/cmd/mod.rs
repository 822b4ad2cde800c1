pub mod bound;
pub mod gen;
pub mod pave;
pub mod scan;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use paving::DenseMatrix;

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DenseMatrix::parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes()).context("writing stdout")?;
            Ok(())
        }
    }
}
