//! Flat `key=value` config files.
//!
//! A config file supplies defaults for the flags of the invoked subcommand;
//! explicit flags win. This is implemented by splicing the file-derived
//! flags into the argument list right after the subcommand, before the
//! user's own flags: clap's last-wins assignment then gives exactly
//! file-over-default and flag-over-file precedence.

use std::fs;
use std::path::Path;

/// Parse `key=value` lines (`#` starts a comment) into flag tokens.
/// `key=true` becomes a bare `--key`, `key=false` is dropped.
pub fn config_to_args(text: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(idx) => &raw[..idx],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key=value: {raw:?}", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(format!("config line {} has an empty key", lineno + 1));
        }
        if key == "config" {
            continue; // no recursive includes
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}

/// Locate `--config FILE` (or `--config=FILE`) in `argv`, load it, and
/// splice its flags right after the subcommand token. Keys the user already
/// passed on the command line are dropped from the file, which is what makes
/// explicit flags win.
pub fn splice_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut config_path: Option<String> = None;
    let mut user_keys: Vec<String> = Vec::new();
    let mut i = 0;
    while i < argv.len() {
        let arg = &argv[i];
        if arg == "--config" {
            if let Some(v) = argv.get(i + 1) {
                config_path = Some(v.clone());
            }
            i += 2;
            continue;
        }
        if let Some(v) = arg.strip_prefix("--config=") {
            config_path = Some(v.to_string());
        } else if let Some(rest) = arg.strip_prefix("--") {
            let key = rest.split('=').next().unwrap_or(rest);
            user_keys.push(key.to_string());
        }
        i += 1;
    }
    let Some(path) = config_path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config file {path}: {e}"))?;
    let file_args = config_to_args(&text)?;
    // keep only file flags the user did not set explicitly
    let mut kept = Vec::with_capacity(file_args.len());
    let mut skip_value = false;
    for (idx, token) in file_args.iter().enumerate() {
        if skip_value {
            skip_value = false;
            continue;
        }
        let key = token.trim_start_matches("--");
        let has_value = file_args.get(idx + 1).is_some_and(|v| !v.starts_with("--"));
        if user_keys.iter().any(|k| k == key) {
            skip_value = has_value;
            continue;
        }
        kept.push(token.clone());
        if has_value {
            kept.push(file_args[idx + 1].clone());
            skip_value = true;
        }
    }
    // subcommand = first bare token after the program name
    let sub_idx = argv
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| !a.starts_with('-'))
        .map(|(i, _)| i);
    let Some(sub_idx) = sub_idx else {
        return Ok(argv); // no subcommand; let clap report usage
    };
    let mut spliced = Vec::with_capacity(argv.len() + kept.len());
    spliced.extend_from_slice(&argv[..=sub_idx]);
    spliced.extend(kept);
    spliced.extend_from_slice(&argv[sub_idx + 1..]);
    Ok(spliced)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_comments_and_booleans() {
        let text = "gamma=1.5\n# comment\na = 2 # trailing\nlog=true\nquiet=false\n\n";
        let args = config_to_args(text).unwrap();
        assert_eq!(args, vec!["--gamma", "1.5", "--a", "2", "--log"]);
        assert!(config_to_args("not a pair").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let argv: Vec<String> = ["supmax", "bound", "--config", "/nonexistent", "--gamma", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert!(splice_config(argv).is_err()); // missing file reported
    }

    #[test]
    fn explicit_flags_shadow_file_keys() {
        let dir = std::env::temp_dir().join(format!("supmax-config-{}", std::process::id()));
        fs::write(&dir, "gamma=2\na=5\n").unwrap();
        let argv: Vec<String> = [
            "supmax",
            "bound",
            "--config",
            dir.to_str().unwrap(),
            "--gamma",
            "4",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let spliced = splice_config(argv).unwrap();
        // file's gamma is dropped, file's a survives, user's gamma stays
        let joined = spliced.join(" ");
        assert!(joined.contains("--a 5"), "{joined}");
        assert!(joined.contains("--gamma 4"), "{joined}");
        assert_eq!(joined.matches("--gamma").count(), 1, "{joined}");
        let _ = fs::remove_file(dir);
    }
}
