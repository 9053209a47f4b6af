//! Config merging, output headers and file writing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{precondition, Error, Result};
use crate::numeric::DEFAULT_PRECISION;

/// Environment variable holding the default float precision in bits.
pub const PRECISION_ENV: &str = "HARMLAB_PRECISION";

pub fn default_precision() -> Result<u32> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => match v.trim().parse::<u32>() {
            Ok(p) if p >= 2 => Ok(p),
            _ => precondition(format!("{PRECISION_ENV} must be an integer >= 2, got {v:?}")),
        },
        Err(_) => Ok(DEFAULT_PRECISION),
    }
}

fn normalize(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().map(|(k, v)| (k.replace('-', "_"), v)).collect(),
        _ => Map::new(),
    }
}

/// Overlays the flags that were given on the JSON config file, returning
/// the resolved arguments and their JSON echo.
pub fn merge_config<T: Serialize + DeserializeOwned>(args: &T, config: Option<&Path>) -> Result<(T, Value)> {
    let mut merged = match config {
        Some(path) => {
            let text = read_text(path)?;
            let v: Value = serde_json::from_str(&text)?;
            if !v.is_object() {
                return precondition(format!("config {} must hold a JSON object", path.display()));
            }
            normalize(v)
        }
        None => Map::new(),
    };
    for (k, v) in normalize(serde_json::to_value(args)?) {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    let echo = Value::Object(merged);
    let resolved: T = serde_json::from_value(echo.clone())
        .map_err(|e| Error::Precondition(format!("invalid configuration: {e}")))?;
    Ok((resolved, echo))
}

/// Header block carried by every output.
pub fn header(command: &str, config: &Value, seed: Option<u64>, kind: &str) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), Value::from("harmlab"));
    m.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), Value::from(command));
    m.insert("config".into(), config.clone());
    m.insert("seed".into(), seed.map_or(Value::Null, Value::from));
    m.insert("scalar_kind".into(), Value::from(kind));
    Value::Object(m)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_text(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes `body` (an object) with the header under the key `header`.
pub fn write_json(out: Option<&PathBuf>, head: Value, body: Value) -> Result<()> {
    let mut m = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    m.insert("header".into(), head);
    let mut text = serde_json::to_string_pretty(&Value::Object(m))?;
    text.push('\n');
    write_text(out, &text)
}

/// Writes CSV preceded by the header as `#` comment lines.
pub fn write_csv(out: Option<&PathBuf>, head: &Value, csv: &str) -> Result<()> {
    let mut text = String::new();
    if let Value::Object(m) = head {
        for (k, v) in m {
            text.push_str(&format!("# {k}: {v}\n"));
        }
    }
    text.push_str(csv);
    write_text(out, &text)
}

pub fn is_csv(out: Option<&PathBuf>) -> bool {
    out.and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// `"1..100"` (inclusive) or `"1,2,5"`.
pub fn parse_radii(text: &str) -> Result<Vec<i64>> {
    let bad = || Error::Precondition(format!("radii must look like 1..100 or 1,2,5; got {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        text.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| bad())).collect()
    }
}

/// Comma-separated list of values.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::Precondition(format!("bad {what} entry {t:?} in {text:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, Default)]
    #[serde(default)]
    struct A {
        n: Option<i64>,
        sigma: Option<f64>,
        out: Option<PathBuf>,
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        fs::write(&cfg, r#"{"n": 4, "sigma": 0.5}"#).unwrap();
        let (a, echo) = merge_config(&A { n: Some(9), ..A::default() }, Some(&cfg)).unwrap();
        assert_eq!((a.n, a.sigma), (Some(9), Some(0.5)));
        assert_eq!(echo["n"], 9);
        fs::write(&cfg, r#"{"n": "x"}"#).unwrap();
        assert!(matches!(merge_config(&A::default(), Some(&cfg)), Err(Error::Precondition(_))));
        assert!(matches!(merge_config(&A::default(), Some(&dir.path().join("missing.json"))), Err(Error::Io(_))));
    }

    #[test]
    fn radii_forms() {
        assert_eq!(parse_radii("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_radii("3, 5").unwrap(), vec![3, 5]);
        assert!(parse_radii("5..1").is_err());
        assert!(parse_radii("a").is_err());
    }
}
