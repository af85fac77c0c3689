use std::ffi::OsString;
use std::fs;

use crate::{Error, Result};

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got '{line}'", no + 1)))?;
        let key = k.trim();
        if key.is_empty() || key.starts_with('-') {
            return Err(Error::Config(format!("line {}: bad key '{key}'", no + 1)));
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Replaces `--config <path>` (or `--config=<path>`) by the file's entries,
/// rendered as `--key=value` right after the subcommand. Keys also given on
/// the command line are dropped so the command line wins; list flags append
/// in clap, so ordering alone would not do it. A `command=<name>` entry supplies the
/// subcommand when none is given. Unknown keys are left for the parser to
/// reject.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    if let Some(prog) = it.next() {
        rest.push(prog);
    }
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| Error::Config("--config needs a path".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let norm = |k: &str| k.replace('-', "_");
    let given: Vec<String> = rest
        .iter()
        .filter_map(|a| a.to_str()?.strip_prefix("--").map(|f| norm(f.split('=').next().unwrap_or(f))))
        .collect();
    let mut command = None;
    let mut flags = Vec::new();
    for (k, v) in parse_config_text(&text)? {
        if k == "command" {
            command = Some(v);
        } else if !given.contains(&norm(&k)) {
            flags.push(OsString::from(format!("--{k}={v}")));
        }
    }
    // The subcommand is the first token that is neither a flag nor the value
    // of a space-separated global flag.
    let mut sub = None;
    let mut i = 1;
    while i < rest.len() {
        let s = rest[i].to_string_lossy();
        if s == "--out" || s == "--seed" {
            i += 2;
            continue;
        }
        if !s.starts_with('-') {
            sub = Some(i - 1);
            break;
        }
        i += 1;
    }
    let mut out: Vec<OsString> = Vec::with_capacity(rest.len() + flags.len() + 1);
    match sub {
        Some(i) => {
            out.extend(rest[..i + 2].iter().cloned());
            out.extend(flags);
            out.extend(rest[i + 2..].iter().cloned());
        }
        None => {
            let cmd = command.ok_or_else(|| Error::Config("no command given on the command line or in the config".into()))?;
            out.push(rest[0].clone());
            out.push(OsString::from(cmd));
            out.extend(flags);
            out.extend(rest[1..].iter().cloned());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let kv = parse_config_text("# sweep\ntheta_list = 20,10\n\nrefinements=1\n").unwrap();
        assert_eq!(kv, vec![("theta_list".into(), "20,10".into()), ("refinements".into(), "1".into())]);
        assert!(parse_config_text("novalue\n").is_err());
    }

    #[test]
    fn expands_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("speclab-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.txt");
        fs::write(&path, "command=weyl\nk_list=10,20\n").unwrap();
        let os = |v: &[&str]| v.iter().map(OsString::from).collect::<Vec<_>>();
        let got = expand_config(os(&["speclab", "--config", path.to_str().unwrap(), "--out", "o"])).unwrap();
        assert_eq!(got, os(&["speclab", "weyl", "--k_list=10,20", "--out", "o"]));
        let got = expand_config(os(&["speclab", "weyl", "--k-list=5", &format!("--config={}", path.display())])).unwrap();
        assert_eq!(got, os(&["speclab", "weyl", "--k-list=5"]));
        let got = expand_config(os(&["speclab", "--out", "o", "--config", path.to_str().unwrap()])).unwrap();
        assert_eq!(got, os(&["speclab", "weyl", "--k_list=10,20", "--out", "o"]));
        fs::remove_dir_all(&dir).unwrap();
    }
}
