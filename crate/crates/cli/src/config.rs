//! `--config` files: flat `key = value` lines merged into the argument list.
//!
//! Precedence is defaults < config file < command line. Entries are spliced
//! in right after the subcommand as `--key=value`, and any key already given
//! on the command line (or one exclusive with it) is dropped from the file.

use std::fs;

/// Flags where giving one on the command line silences the others in the file.
const EXCLUSIVE: &[&[&str]] = &[&["target-xi", "epsilon"], &["quick", "full"]];

#[derive(Debug)]
pub struct ConfigError(pub String);

/// Parses `key = value` lines. `#` starts a comment; keys may use `_` or `-`.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError(format!("line {}: expected key = value", lineno + 1)));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key.starts_with('-') {
            return Err(ConfigError(format!("line {}: invalid key {:?}", lineno + 1, k.trim())));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn flag_name(arg: &str) -> Option<&str> {
    let body = arg.strip_prefix("--")?;
    Some(body.split_once('=').map_or(body, |(k, _)| k))
}

/// Removes `--config PATH` / `--config=PATH` from `args` and splices the
/// file's entries in after the subcommand.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| ConfigError("--config needs a path".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| ConfigError(format!("cannot read config {path}: {e}")))?;
    let entries = parse(&text)?;

    // The subcommand is the first argument after the program name that is
    // not a flag.
    let Some(sub) = rest.iter().skip(1).position(|a| !a.starts_with('-')).map(|i| i + 1) else {
        return Ok(rest);
    };
    let given: Vec<&str> = rest[sub + 1..].iter().filter_map(|a| flag_name(a)).collect();
    let silenced = |key: &str| {
        given.contains(&key)
            || EXCLUSIVE
                .iter()
                .any(|group| group.contains(&key) && group.iter().any(|g| given.contains(g)))
    };
    let mut injected = Vec::new();
    for (key, value) in entries {
        if silenced(&key) {
            continue;
        }
        match value.as_str() {
            "true" => injected.push(format!("--{key}")),
            "false" => {}
            _ => injected.push(format!("--{key}={value}")),
        }
    }
    let tail = rest.split_off(sub + 1);
    rest.extend(injected);
    rest.extend(tail);
    Ok(rest)
}
