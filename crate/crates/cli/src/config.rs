//! `key=value` config files, merged into argv before parsing so flags win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::{Arg, ArgAction, Command};

use crate::error::CliError;

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("config line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::input(format!("config line {}: empty key", i + 1)));
        }
        out.push((k.to_owned(), v.to_owned()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

fn matches_key(arg: &Arg, key: &str) -> bool {
    arg.get_long() == Some(key)
        || arg.get_short().map(|c| key.len() == c.len_utf8() && key.starts_with(c)) == Some(true)
        || arg.get_id().as_str() == key
}

fn given_on_command_line(arg: &Arg, args: &[OsString]) -> bool {
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        if let Some(long) = arg.get_long() {
            if s == format!("--{long}") || s.starts_with(&format!("--{long}=")) {
                return true;
            }
        }
        match arg.get_short() {
            Some(c) => !s.starts_with("--") && s.starts_with(&format!("-{c}")),
            None => false,
        }
    })
}

/// Appends config values for every option of the chosen subcommand (or the
/// global options) that the command line leaves unset. Keys belonging only to
/// other subcommands are ignored; unknown keys are an error.
pub fn merge(cmd: &Command, args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
    let entries = parse(&text)?;

    let sub = args
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a.to_string_lossy().as_ref()));
    let mut out = args.clone();
    for (key, value) in entries {
        let own = sub
            .into_iter()
            .flat_map(|s| s.get_arguments())
            .chain(cmd.get_arguments())
            .find(|a| matches_key(a, &key));
        let Some(arg) = own else {
            let elsewhere = cmd
                .get_subcommands()
                .flat_map(|s| s.get_arguments())
                .any(|a| matches_key(a, &key));
            if elsewhere {
                continue;
            }
            return Err(CliError::input(format!("unknown config key '{key}'")));
        };
        if arg.get_id() == "config" || given_on_command_line(arg, &args) {
            continue;
        }
        let flag = match arg.get_long() {
            Some(l) => format!("--{l}"),
            None => format!("-{}", arg.get_short().unwrap_or('?')),
        };
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" | "1" | "yes" => out.push(flag.into()),
                "false" | "0" | "no" => {}
                other => {
                    return Err(CliError::input(format!(
                        "config key '{key}' expects true or false, got '{other}'"
                    )))
                }
            }
        } else {
            out.push(flag.into());
            out.push(value.into());
        }
    }
    Ok(out)
}
