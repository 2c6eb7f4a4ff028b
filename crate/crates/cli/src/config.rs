//! `--config` files: one `key = value` per line, `#` starts a comment.
//!
//! Keys are flag names without dashes (`snr-db`, `N`, `T`). The file is
//! expanded into flags placed ahead of the real command line, and since every
//! subcommand lets a later flag override an earlier one, flags win.

use std::ffi::OsString;
use std::path::Path;

use crate::UsageError;

pub fn parse(text: &str, origin: &Path) -> Result<Vec<OsString>, UsageError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(UsageError(format!(
                "{}:{}: expected key = value",
                origin.display(),
                lineno + 1
            )));
        };
        let key = key.trim().trim_start_matches('-');
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key == "config" {
            return Err(UsageError(format!(
                "{}:{}: invalid key {key:?}",
                origin.display(),
                lineno + 1
            )));
        }
        let flag = if key.chars().count() == 1 {
            format!("-{key}")
        } else {
            format!("--{key}")
        };
        match value {
            "true" => out.push(flag.into()),
            "false" => {}
            v => {
                out.push(flag.into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// Splices the contents of any `--config FILE` into `argv` right after the
/// subcommand name. Keys also given on the command line are dropped, so a
/// list-valued flag is replaced rather than extended.
pub fn expand(argv: Vec<OsString>, cli: &clap::Command) -> Result<Vec<OsString>, UsageError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if s == "--config" {
            path = argv.get(i + 1).map(|p| p.to_string_lossy().into_owned());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text =
        std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let extra = parse(&text, path)?;
    let Some(sub) = argv.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        return Ok(argv);
    };
    let at = sub + 2;
    let name = argv[at - 1].to_string_lossy();
    let Some(sub_cmd) = cli.find_subcommand(name.as_ref()) else {
        return Ok(argv);
    };
    let id_of = |flag: &str| -> Option<String> {
        let flag = flag.split('=').next().unwrap_or(flag);
        sub_cmd.get_arguments().find_map(|a| {
            let long = flag.strip_prefix("--").is_some_and(|l| a.get_long() == Some(l));
            let short = flag.len() == 2 && flag.starts_with('-') && a.get_short().is_some_and(|c| flag.ends_with(c));
            (long || short).then(|| a.get_id().to_string())
        })
    };
    let given: Vec<String> = argv[at..]
        .iter()
        .filter_map(|a| {
            let s = a.to_string_lossy();
            if s.starts_with('-') {
                id_of(&s)
            } else {
                None
            }
        })
        .collect();
    let mut out = argv[..at].to_vec();
    let mut skip = false;
    for tok in extra {
        let s = tok.to_string_lossy().into_owned();
        if s.starts_with('-') && s.parse::<f64>().is_err() {
            skip = id_of(&s).is_some_and(|id| given.contains(&id));
        }
        if !skip {
            out.push(tok);
        }
    }
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: Vec<OsString>) -> Vec<String> {
        v.into_iter().map(|s| s.into_string().unwrap()).collect()
    }

    #[test]
    fn command_line_wins() {
        let dir = std::env::temp_dir().join(format!("pf-config-{}", std::process::id()));
        std::fs::write(&dir, "N = 16\nsnr-db = 1,2\nk=8\n").unwrap();
        let cli = <crate::args::Cli as clap::CommandFactory>::command();
        let argv: Vec<OsString> = [
            "pf",
            "simulate",
            "--config",
            dir.to_str().unwrap(),
            "--snr-db",
            "3",
            "--block-len=32",
        ]
        .iter()
        .map(OsString::from)
        .collect();
        let got = strs(expand(argv, &cli).unwrap());
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(&got[2..4], ["-k", "8"]);
        assert_eq!(&got[6..], ["--snr-db", "3", "--block-len=32"]);
    }

    #[test]
    fn keys_become_flags() {
        let text = "# run\nN = 64\nsnr-db = 1,2 # dB\nreeval = true\nall-zero=false\n\n";
        let got = strs(parse(text, Path::new("c")).unwrap());
        assert_eq!(got, ["-N", "64", "--snr-db", "1,2", "--reeval"]);
        assert!(parse("N 64", Path::new("c")).is_err());
        assert!(parse("config = x", Path::new("c")).is_err());
    }
}
