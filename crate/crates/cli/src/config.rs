//! `--config <file>` support. The file holds `key = value` lines; each
//! becomes `--key=value` placed before the command-line flags, so flags
//! given explicitly win.

use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};
use clap::CommandFactory;

use crate::cli::Cli;

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got '{raw}'", i + 1);
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Removes `--config` from `args` and splices the file's settings in right
/// after the subcommand name.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        match arg.to_str() {
            Some("--config") => {
                path = Some(it.next().context("--config needs a file path")?);
            }
            Some(s) if s.starts_with("--config=") => path = Some(OsString::from(&s["--config=".len()..])),
            _ => rest.push(arg),
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let settings = parse_config(&text)?;

    let command = Cli::command();
    let Some((pos, sub)) = rest
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| a.to_str().and_then(|s| command.find_subcommand(s)).map(|c| (i, c)))
    else {
        return Ok(rest);
    };
    let known: Vec<&str> = sub.get_arguments().filter_map(|a| a.get_long()).collect();
    let mut injected = Vec::new();
    for (key, value) in settings {
        if known.contains(&key.as_str()) {
            injected.push(OsString::from(format!("--{key}={value}")));
        } else {
            eprintln!("warning: config key '{key}' does not apply to '{}', ignored", sub.get_name());
        }
    }
    rest.splice(pos + 1..pos + 1, injected);
    Ok(rest)
}
