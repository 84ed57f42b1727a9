//! Optional `key = value` configuration files.
//!
//! File entries are exported as `HAA_*` environment variables before the
//! command line is parsed, and only when that variable is not already set.
//! Flags therefore beat the environment, which beats the file.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Command;

use crate::failure::Failure;

pub const ENV_PREFIX: &str = "HAA_";

/// Environment variable carrying the value of flag or file key `key`.
pub fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.trim().replace('-', "_").to_ascii_uppercase())
}

/// `--config PATH`, `--config=PATH`, or `HAA_CONFIG`.
pub fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    std::env::var_os(env_name("config")).map(PathBuf::from)
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, Failure> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Failure::usage(format!("config line {}: expected `key = value`", i + 1)));
        };
        let v = v.trim().trim_matches('"');
        out.push((k.trim().to_string(), v.to_string()));
    }
    Ok(out)
}

/// Long flag names of every subcommand, normalized as environment suffixes.
pub fn known_keys(cmd: &Command) -> BTreeSet<String> {
    let mut keys = BTreeSet::new();
    collect(cmd, &mut keys);
    keys
}

fn collect(cmd: &Command, keys: &mut BTreeSet<String>) {
    for a in cmd.get_arguments() {
        if let Some(l) = a.get_long() {
            keys.insert(env_name(l));
        }
    }
    for sub in cmd.get_subcommands() {
        collect(sub, keys);
    }
}

/// Exports file entries and returns the file bytes for the manifest digest.
pub fn apply(path: &Path, known: &BTreeSet<String>) -> Result<Vec<u8>, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes);
    for (k, v) in parse_config(&text)? {
        let name = env_name(&k);
        if name == env_name("config") || !known.contains(&name) {
            return Err(Failure::usage(format!("unknown config key `{k}`")));
        }
        if std::env::var_os(&name).is_none() {
            std::env::set_var(name, v);
        }
    }
    Ok(bytes)
}
