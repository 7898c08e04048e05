//! `key=value` config files merged ahead of the command line.

use std::fmt::Write as _;
use std::fs;

use serde_json::Value;

/// Reads `path` and returns `--key value` tokens. Blank lines and `#` comments
/// are skipped; keys may be given with or without the leading dashes.
pub fn load(path: &str) -> Result<Vec<String>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "{path}:{}: expected key=value, got {line:?}",
                n + 1
            ));
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(format!("{path}:{}: invalid key {key:?}", n + 1));
        }
        out.push(format!("--{key}"));
        out.push(value.trim().to_string());
    }
    Ok(out)
}

/// Global flags that take a separate value and may precede the subcommand.
const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--seed", "--out", "--output", "--save-config"];

/// Splices config tokens from any `--config <path>` into `argv` right after the
/// subcommand, so explicit flags (which come later) take precedence.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut from_file = Vec::new();
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        if arg == "--config" {
            let path = it.next().ok_or("--config needs a path")?;
            from_file.extend(load(&path)?);
        } else if let Some(path) = arg.strip_prefix("--config=") {
            from_file.extend(load(path)?);
        } else {
            rest.push(arg);
        }
    }
    if from_file.is_empty() {
        return Ok(rest);
    }
    // argv[0], then the subcommand if present, then the file, then the rest.
    let mut split = rest.len().min(1);
    let mut i = 1;
    while i < rest.len() {
        let a = &rest[i];
        if !a.starts_with('-') {
            split = i + 1;
            break;
        }
        i += if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
            2
        } else {
            1
        };
    }
    let mut out: Vec<String> = rest[..split].to_vec();
    out.extend(from_file);
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}

/// Renders a flat JSON object as a config file that [`load`] reads back.
pub fn render(config: &Value) -> String {
    let mut s = String::new();
    if let Value::Object(map) = config {
        for (k, v) in map {
            let v = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(s, "{k}={v}");
        }
    }
    s
}
