//! Run configuration files: flat TOML whose keys are the `SimConfig` field
//! names (PHY constants under `phy.`), plus `--set key=value` overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use muagg_core::SimConfig;
use toml::{Table, Value};

/// A configuration file that does not exist. Reported with exit code 2.
#[derive(Debug)]
pub struct MissingFile(pub PathBuf);

impl fmt::Display for MissingFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot read configuration file {}", self.0.display())
    }
}

impl std::error::Error for MissingFile {}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|_| MissingFile(path.to_path_buf()))?;
    parse_table(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_table(text: &str) -> Result<Table> {
    Ok(text.parse::<Table>()?)
}

/// Parses the right-hand side of `key=value`. Bare words that are not TOML
/// literals are taken as strings, so `scheduler=ideal` works unquoted.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Sets a dotted `key` in `table`.
pub fn set_path(table: &mut Table, key: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|k| !k.is_empty())
        .ok_or_else(|| anyhow!("empty key in override"))?;
    let mut node = table;
    for part in parts {
        node = node
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .ok_or_else(|| anyhow!("`{part}` in `{key}` is not a table"))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

pub fn apply_overrides(table: &mut Table, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let Some((key, raw)) = item.split_once('=') else {
            bail!("override `{item}` is not of the form key=value");
        };
        let key = key.trim();
        check_known_key(key)?;
        set_path(table, key, parse_value(raw.trim()))?;
    }
    Ok(())
}

/// Keys accepted in run configurations.
pub fn known_keys() -> Vec<String> {
    let defaults = Value::try_from(SimConfig::default()).expect("default config serializes");
    let mut keys = vec![
        "offered_load".to_string(),
        "lambda".to_string(),
        "warmup".to_string(),
    ];
    if let Value::Table(t) = defaults {
        for (k, v) in t {
            match v {
                Value::Table(inner) => keys.extend(inner.keys().map(|ik| format!("{k}.{ik}"))),
                _ => keys.push(k),
            }
        }
    }
    keys
}

fn check_known_key(key: &str) -> Result<()> {
    if known_keys().iter().any(|k| k == key) {
        Ok(())
    } else {
        bail!("unknown configuration key `{key}`")
    }
}

/// Converts a configuration table into a validated [`SimConfig`].
pub fn to_config(table: Table) -> Result<SimConfig> {
    for (key, value) in &table {
        match value {
            Value::Table(inner) => {
                for inner_key in inner.keys() {
                    check_known_key(&format!("{key}.{inner_key}"))?;
                }
            }
            _ => check_known_key(key)?,
        }
    }
    let config: SimConfig = match Value::Table(table.clone()).try_into() {
        Ok(c) => c,
        Err(e) => {
            let e: toml::de::Error = e;
            let key = offending_key(&table).unwrap_or_else(|| "<unknown>".into());
            bail!("invalid value for `{key}`: {}", e.message());
        }
    };
    config.validate()?;
    Ok(config)
}

/// Finds the first key that fails to deserialize on its own.
fn offending_key(table: &Table) -> Option<String> {
    let fails = |single: Table| Value::Table(single).try_into::<SimConfig>().is_err();
    for (key, value) in table {
        match value {
            Value::Table(inner) => {
                for (inner_key, inner_value) in inner {
                    let mut single = Table::new();
                    set_path(
                        &mut single,
                        &format!("{key}.{inner_key}"),
                        inner_value.clone(),
                    )
                    .ok()?;
                    if fails(single) {
                        return Some(format!("{key}.{inner_key}"));
                    }
                }
            }
            _ => {
                if fails(Table::from_iter([(key.clone(), value.clone())])) {
                    return Some(key.clone());
                }
            }
        }
    }
    None
}
