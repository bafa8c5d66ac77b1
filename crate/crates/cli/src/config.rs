//! Flat `key=value` config files.
//!
//! Each key names a long flag of the chosen subcommand (`fock-dim=6` becomes
//! `--fock-dim 6`). The pairs are spliced in right after the subcommand name,
//! ahead of the user's own flags, so anything given on the command line wins.

use std::ffi::OsString;
use std::fs;

/// Parses config text into flag arguments. Blank lines and `#` comments are
/// skipped; `true`/`false` values toggle switches.
pub fn parse(text: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value, got '{line}'", no + 1))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: invalid key '{key}'", no + 1));
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            v => {
                args.push(format!("--{key}"));
                args.push(v.to_string());
            }
        }
    }
    Ok(args)
}

/// Finds `--config PATH` or `--config=PATH`, removes it from `argv` and splices
/// the file's flags in after the subcommand.
pub fn expand(mut argv: Vec<OsString>, subcommands: &[&str]) -> Result<Vec<OsString>, String> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--config" {
            if i + 1 >= argv.len() {
                return Err("--config needs a file path".into());
            }
            path = Some(argv[i + 1].clone());
            argv.drain(i..i + 2);
            continue;
        }
        if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(OsString::from(p));
            argv.remove(i);
            continue;
        }
        i += 1;
    }
    let Some(path) = path else { return Ok(argv) };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let extra = parse(&text)?;
    let Some(pos) = argv
        .iter()
        .position(|a| subcommands.contains(&a.to_string_lossy().as_ref()))
    else {
        return Err("config file given without a subcommand".into());
    };
    argv.splice(pos + 1..pos + 1, extra.into_iter().map(OsString::from));
    Ok(argv)
}
