//! Config files become extra arguments placed so that flags given on the
//! command line still win.

use std::ffi::OsString;
use std::path::Path;

use crate::args::SUBCOMMANDS;
use crate::CliError;

const GLOBAL_WITH_VALUE: [&str; 5] = ["--config", "--threads", "--output", "-o", "--format"];
const GLOBAL_KEYS: [&str; 3] = ["threads", "output", "format"];

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if s == "--" {
            return None;
        }
        if GLOBAL_WITH_VALUE.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if !s.starts_with('-') {
            return SUBCOMMANDS.contains(&s.as_ref()).then_some(i);
        }
        i += 1;
    }
    None
}

fn value_text(key: &str, v: &toml::Value) -> Result<Option<String>, CliError> {
    Ok(Some(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(x) => x.to_string(),
        toml::Value::Boolean(true) => return Ok(None),
        toml::Value::Array(items) => items
            .iter()
            .map(|x| match x {
                toml::Value::Table(_) | toml::Value::Array(_) | toml::Value::Boolean(_) => {
                    Err(CliError::Usage(format!("config key {key}: unsupported array element")))
                }
                other => Ok(value_text(key, other)?.unwrap_or_default()),
            })
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        other => return Err(CliError::Usage(format!("config key {key}: unsupported value {other}"))),
    }))
}

fn push_pairs(table: &toml::Table, out: &mut Vec<OsString>, allowed: Option<&[&str]>) -> Result<(), CliError> {
    for (key, v) in table {
        if let Some(allowed) = allowed {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown top-level config key {key}")));
            }
        }
        if matches!(v, toml::Value::Boolean(false)) {
            continue;
        }
        out.push(format!("--{}", key.replace('_', "-")).into());
        if let Some(text) = value_text(key, v)? {
            out.push(text.into());
        }
    }
    Ok(())
}

fn load(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

/// Rewrites `args` with the contents of the `--config` file, if any.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let table = load(Path::new(&path))?;
    let mut globals = toml::Table::new();
    let mut sections = toml::Table::new();
    for (k, v) in table {
        if v.is_table() {
            if !SUBCOMMANDS.contains(&k.as_str()) {
                return Err(CliError::Usage(format!("unknown config section [{k}]")));
            }
            sections.insert(k, v);
        } else {
            globals.insert(k, v);
        }
    }
    let mut out = vec![args[0].clone()];
    push_pairs(&globals, &mut out, Some(&GLOBAL_KEYS))?;
    let Some(sub) = subcommand_index(&args) else {
        out.extend(args.into_iter().skip(1));
        return Ok(out);
    };
    out.extend(args[1..=sub].iter().cloned());
    if let Some(toml::Value::Table(t)) = sections.get(args[sub].to_string_lossy().as_ref()) {
        push_pairs(t, &mut out, None)?;
    }
    out.extend(args[sub + 1..].iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn finds_the_subcommand_past_global_values() {
        assert_eq!(subcommand_index(&os(&["w", "--format", "json", "sieve", "--N", "10"])), Some(3));
        assert_eq!(subcommand_index(&os(&["w", "-o", "primes", "primes"])), Some(3));
        assert_eq!(subcommand_index(&os(&["w", "--help"])), None);
    }

    #[test]
    fn config_values_precede_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "format = \"json\"\n[sieve]\nN = 1e4\ndelta = 0.3\ntuple = [0, 2]\nrange_half = true\n[gaps]\nbeta = [0, 0.5]\n",
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let out = expand(os(&["w", "--config", p, "sieve", "--delta", "0.2"])).unwrap();
        let got: Vec<String> = out.iter().map(|s| s.to_string_lossy().into_owned()).collect();
        assert_eq!(
            got,
            [
                "w", "--format", "json", "--config", p, "sieve", "--N", "10000", "--delta", "0.3", "--range-half",
                "--tuple", "0,2", "--delta", "0.2"
            ]
        );
    }
}
