//! Flat key=value config files and flag/file/environment merging.
//!
//! Files hold one `key = value` pair per line with `#` comments. Keys are
//! case-insensitive and `_` and `-` are interchangeable; flags always win
//! over file entries, which win over defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use afl_core::experiments::{InitialCondition, ShapeSuite};

use crate::CliError;

/// Parsed config file: normalized key -> value.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

// Canonical spelling for keys that have aliases.
fn canonical_key(key: &str) -> String {
    match key {
        "n-cells" => "cells".to_string(),
        "t-final" => "tfinal".to_string(),
        "output" | "outputs" => "out".to_string(),
        other => other.to_string(),
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let mut entries = BTreeMap::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    line_no + 1
                ))
            })?;
            let key = canonical_key(&normalize_key(key));
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Config(format!(
                    "{}:{}: duplicate key `{key}`",
                    path.display(),
                    line_no + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

pub fn load_optional(path: &Option<PathBuf>) -> Result<FileConfig, CliError> {
    match path {
        Some(p) => FileConfig::load(p),
        None => Ok(FileConfig::default()),
    }
}

/// Flag value, else file value parsed by `parse`, else None.
pub fn merge<T, F>(
    flag: Option<T>,
    file: &FileConfig,
    key: &str,
    parse: F,
) -> Result<Option<T>, CliError>
where
    F: FnOnce(&str) -> Result<T, String>,
{
    if let Some(v) = flag {
        return Ok(Some(v));
    }
    match file.get(key) {
        Some(text) => parse(text)
            .map(Some)
            .map_err(|e| CliError::Config(format!("invalid value for `{key}`: {e}"))),
        None => Ok(None),
    }
}

pub fn require<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| {
        CliError::Config(format!(
            "missing required setting `{key}` (pass --{key} or put `{key} = ...` in a config file)"
        ))
    })
}

pub fn parse_f64(text: &str) -> Result<f64, String> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{}` is not a number", text.trim()))
}

pub fn parse_usize(text: &str) -> Result<usize, String> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| format!("`{}` is not a nonnegative integer", text.trim()))
}

pub fn parse_bool(text: &str) -> Result<bool, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_f64)
        .collect()
}

pub fn parse_usize_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_usize)
        .collect()
}

/// Output directory: flag, else file `out`, else $AFL_OUTPUT_DIR, else ./afl-out.
pub fn resolve_out_dir(
    flag: Option<PathBuf>,
    file: &FileConfig,
) -> Result<PathBuf, CliError> {
    if let Some(p) = flag {
        return Ok(p);
    }
    if let Some(text) = file.get("out") {
        return Ok(PathBuf::from(text));
    }
    if let Ok(env) = std::env::var("AFL_OUTPUT_DIR") {
        if !env.is_empty() {
            return Ok(PathBuf::from(env));
        }
    }
    Ok(PathBuf::from("afl-out"))
}

fn parse_knobs(body: &str, context: &str) -> Result<BTreeMap<String, f64>, String> {
    let mut knobs = BTreeMap::new();
    for pair in body.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("{context}: expected key=value, got `{pair}`"))?;
        let key = normalize_key(key);
        let value = parse_f64(value)?;
        if knobs.insert(key.clone(), value).is_some() {
            return Err(format!("{context}: duplicate key `{key}`"));
        }
    }
    Ok(knobs)
}

fn take(knobs: &mut BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    knobs.remove(key).unwrap_or(default)
}

/// Parses the initial-condition text form: `sine:m=10`, `square`,
/// `square:left=-1,right=1`, `shapes`, or `shapes:` with placement knobs
/// (gauss-center, gauss-width, square-left, square-right, tri-center,
/// tri-half-width).
pub fn parse_ic(text: &str) -> Result<InitialCondition, String> {
    let trimmed = text.trim();
    let (head, body) = match trimmed.split_once(':') {
        Some((h, b)) => (normalize_key(h), Some(b)),
        None => (normalize_key(trimmed), None),
    };
    match head.as_str() {
        "sine" => {
            let body = body.ok_or("`sine` needs a mode, e.g. sine:m=10")?;
            let mut knobs = parse_knobs(body, "sine")?;
            let m = knobs
                .remove("m")
                .or_else(|| knobs.remove("mode"))
                .ok_or("`sine` needs a mode, e.g. sine:m=10")?;
            if let Some(k) = knobs.keys().next() {
                return Err(format!("sine: unknown key `{k}`"));
            }
            if m < 1.0 || m.fract() != 0.0 {
                return Err(format!("sine mode must be a positive integer, got {m}"));
            }
            Ok(InitialCondition::SineWave { mode: m as usize })
        }
        "square" => match body {
            None => Ok(InitialCondition::square_default()),
            Some(body) => {
                let mut knobs = parse_knobs(body, "square")?;
                let left = take(&mut knobs, "left", -1.0);
                let right = take(&mut knobs, "right", 1.0);
                if let Some(k) = knobs.keys().next() {
                    return Err(format!("square: unknown key `{k}`"));
                }
                Ok(InitialCondition::SquareWave { left, right })
            }
        },
        "shapes" => {
            let defaults = ShapeSuite::default();
            match body {
                None => Ok(InitialCondition::ShapeSuite(defaults)),
                Some(body) => {
                    let mut knobs = parse_knobs(body, "shapes")?;
                    let suite = ShapeSuite {
                        gauss_center: take(&mut knobs, "gauss-center", defaults.gauss_center),
                        gauss_width: take(&mut knobs, "gauss-width", defaults.gauss_width),
                        square_left: take(&mut knobs, "square-left", defaults.square_left),
                        square_right: take(&mut knobs, "square-right", defaults.square_right),
                        tri_center: take(&mut knobs, "tri-center", defaults.tri_center),
                        tri_half_width: take(&mut knobs, "tri-half-width", defaults.tri_half_width),
                    };
                    if let Some(k) = knobs.keys().next() {
                        return Err(format!("shapes: unknown key `{k}`"));
                    }
                    Ok(InitialCondition::ShapeSuite(suite))
                }
            }
        }
        other => Err(format!(
            "unknown initial condition `{other}` (expected sine:m=<int>, square, or shapes)"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn config_file_parsing() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# a comment").unwrap();
        writeln!(f, "family = superduper").unwrap();
        writeln!(f, "NU = 0.7  # trailing comment").unwrap();
        writeln!(f, "t_final = 10").unwrap();
        writeln!(f).unwrap();
        let cfg = FileConfig::load(f.path()).unwrap();
        assert_eq!(cfg.get("family"), Some("superduper"));
        assert_eq!(cfg.get("nu"), Some("0.7"));
        assert_eq!(cfg.get("tfinal"), Some("10"));
        assert_eq!(cfg.get("missing"), None);
    }

    #[test]
    fn config_file_rejects_garbage_and_duplicates() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "just words").unwrap();
        assert!(FileConfig::load(f.path()).is_err());

        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "nu = 0.5").unwrap();
        writeln!(f, "nu = 0.7").unwrap();
        assert!(FileConfig::load(f.path()).is_err());
    }

    #[test]
    fn ic_text_forms() {
        assert!(matches!(
            parse_ic("sine:m=10").unwrap(),
            InitialCondition::SineWave { mode: 10 }
        ));
        assert!(matches!(
            parse_ic("square").unwrap(),
            InitialCondition::SquareWave { .. }
        ));
        match parse_ic("square:left=-2,right=0.5").unwrap() {
            InitialCondition::SquareWave { left, right } => {
                assert_eq!((left, right), (-2.0, 0.5));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_ic("shapes").unwrap(),
            InitialCondition::ShapeSuite(_)
        ));
        match parse_ic("shapes:tri_center=1.5").unwrap() {
            InitialCondition::ShapeSuite(s) => assert_eq!(s.tri_center, 1.5),
            other => panic!("{other:?}"),
        }
        assert!(parse_ic("sine").is_err());
        assert!(parse_ic("sine:m=0").is_err());
        assert!(parse_ic("sine:m=2.5").is_err());
        assert!(parse_ic("blob").is_err());
        assert!(parse_ic("square:middle=1").is_err());
    }
}
