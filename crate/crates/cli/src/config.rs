//! `key = value` configuration files.
//!
//! Each entry becomes a `--key value` pair appended after the command line,
//! so values from the file override flags given on the command line.

use std::path::Path;

use crate::CliError;

/// Reads `path` and returns the extra command-line arguments it implies.
/// Blank lines and lines starting with `#` are ignored. A value of `true`
/// turns the key into a bare switch; `false` drops it.
pub fn config_args(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    parse(&text)
}

fn parse(text: &str) -> Result<Vec<String>, CliError> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key '{key}'", i + 1)));
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => args.push(format!("--{key}={value}")),
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_become_flags() {
        let args = parse("# comment\nt_max = 2.5\n\nthetas=0,pi/8\nverbose = true\nquiet=false\n").unwrap();
        assert_eq!(args, ["--t-max=2.5", "--thetas=0,pi/8", "--verbose"]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse("t_max 2").is_err());
        assert!(parse("= 2").is_err());
        assert!(parse("config = other.cfg").is_err());
    }
}
