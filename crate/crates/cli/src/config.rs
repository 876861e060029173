//! `key = value` files for `simulate`. Each key is a long flag name; the
//! file's settings are spliced in ahead of the command-line flags, so flags
//! given on the command line win.

use std::path::Path;

pub fn tokens_from_file(path: &Path) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    tokens_from_str(&text)
}

pub fn tokens_from_str(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected 'key = value'", k + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.starts_with('-') || key == "config" {
            return Err(format!("config line {}: bad key '{key}'", k + 1));
        }
        out.push(format!("--{key}={value}"));
    }
    Ok(out)
}

/// Splices the file named by `--config` into `args` right after the
/// `simulate` subcommand.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(sub) = args.iter().position(|a| a == "simulate") else {
        return Ok(args);
    };
    let mut path = None;
    for (k, a) in args.iter().enumerate().skip(sub + 1) {
        if a == "--config" {
            path = Some(args.get(k + 1).ok_or("--config needs a file path")?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let file_tokens = tokens_from_file(Path::new(&path))?;
    let mut out = args[..=sub].to_vec();
    out.extend(file_tokens);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}
