//! `--config` files: TOML `key = value` pairs turned into flags.

use std::path::Path;

use crate::{CliError, CliResult};

/// Replaces `--config <path>` with the file's entries, placed before the
/// user's own flags so that those override them.
pub(crate) fn expand(args: &[String]) -> CliResult<Vec<String>> {
    let mut user = Vec::with_capacity(args.len());
    let mut config_path = None;
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            let path = iter
                .next()
                .ok_or_else(|| CliError::Param("--config requires a path".into()))?;
            config_path = Some(path.clone());
        } else if let Some(path) = arg.strip_prefix("--config=") {
            config_path = Some(path.to_string());
        } else {
            user.push(arg.clone());
        }
    }
    let Some(path) = config_path else {
        return Ok(user);
    };
    // Program name and subcommand stay first.
    if user.len() < 2 {
        return Err(CliError::Param("--config must follow a subcommand".into()));
    }
    let flags = read_flags(Path::new(&path))?;
    let mut merged = user[..2].to_vec();
    merged.extend(flags);
    merged.extend_from_slice(&user[2..]);
    Ok(merged)
}

fn read_flags(path: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Param(format!("{}: {e}", path.display())))?;
    let mut flags = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        let rendered = match value {
            toml::Value::String(s) => s,
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            toml::Value::Boolean(true) => {
                flags.push(flag);
                continue;
            }
            toml::Value::Boolean(false) => continue,
            toml::Value::Array(items) => items
                .iter()
                .map(|v| match v {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            other => {
                return Err(CliError::Param(format!(
                    "{}: unsupported value for `{key}`: {other}",
                    path.display()
                )));
            }
        };
        flags.push(format!("{flag}={rendered}"));
    }
    Ok(flags)
}
