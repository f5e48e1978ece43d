//! `key=value` configuration files. Entries become command-line flags of the
//! selected subcommand, inserted before the user's own flags so that the
//! latter win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Command;

/// Parse `key = value` lines; `#` starts a comment line. Keys use the long
/// flag spelling without dashes (`min-comments`; `min_comments` also works).
pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value", i + 1);
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

const GLOBAL_WITH_VALUE: [&str; 2] = ["--config", "--workers"];

/// Rewrite `argv` so that config entries applying to the invoked subcommand
/// appear right after its name. Keys that name no flag of that subcommand
/// are returned as ignored.
pub fn inject(cmd: &Command, argv: &[OsString], entries: &BTreeMap<String, String>) -> (Vec<OsString>, Vec<String>) {
    // Walk to the innermost subcommand named on the command line.
    let mut cur = cmd;
    let mut insert_at = None;
    let mut i = 1;
    while i < argv.len() {
        let tok = argv[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&tok.as_ref()) {
            i += 2;
            continue;
        }
        if tok.starts_with('-') {
            i += 1;
            continue;
        }
        match cur.find_subcommand(tok.as_ref()) {
            Some(sub) => {
                cur = sub;
                insert_at = Some(i + 1);
                i += 1;
            }
            None => break,
        }
    }
    let Some(at) = insert_at else {
        return (argv.to_vec(), entries.keys().cloned().collect());
    };

    let mut extra = Vec::new();
    let mut ignored = Vec::new();
    for (key, value) in entries {
        let arg = cur.get_arguments().find(|a| a.get_long() == Some(key.as_str()));
        match arg {
            Some(a) if a.get_action().takes_values() => {
                // Repeated options take comma-separated values.
                if a.get_num_args().is_some_and(|n| n.max_values() > 1)
                    || matches!(a.get_action(), clap::ArgAction::Append)
                {
                    for v in value.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                        extra.push(OsString::from(format!("--{key}")));
                        extra.push(OsString::from(v));
                    }
                } else {
                    extra.push(OsString::from(format!("--{key}")));
                    extra.push(OsString::from(value));
                }
            }
            Some(_) => {
                if matches!(value.as_str(), "true" | "1" | "yes") {
                    extra.push(OsString::from(format!("--{key}")));
                }
            }
            None => ignored.push(key.clone()),
        }
    }
    let mut out = argv[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at..]);
    (out, ignored)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let m = parse("# thresholds\nmin_comments = 5\n\nseed=7\n").unwrap();
        assert_eq!(m["min-comments"], "5");
        assert_eq!(m["seed"], "7");
        assert!(parse("oops").is_err());
    }
}
