//! Run configuration: built-in defaults, overridden by a TOML file, overridden
//! by `section.key=value` assignments from the command line.

use std::path::Path;

use anyhow::{bail, Context};
use edgebasis_core::{EdgeExtractionConfig, HypothesisConfig, VerifyConfig};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub extract: EdgeExtractionConfig,
    pub hypothesis: HypothesisConfig,
    pub verify: VerifyConfig,
}

impl Config {
    pub fn load(file: Option<&Path>, assignments: &[String]) -> anyhow::Result<Self> {
        let mut table = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                text.parse::<Table>().with_context(|| format!("parsing {}", path.display()))?
            }
            None => Table::new(),
        };
        for a in assignments {
            apply(&mut table, a)?;
        }
        let cfg: Config = Value::Table(table).try_into().context("invalid configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.extract.validate()?;
        self.hypothesis.validate()?;
        self.verify.validate()?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Applies `section.key=value`; the value is read as a TOML value, falling
/// back to a plain string.
fn apply(table: &mut Table, assignment: &str) -> anyhow::Result<()> {
    let Some((path, raw)) = assignment.split_once('=') else {
        bail!("expected section.key=value, got `{assignment}`");
    };
    let Some((section, key)) = path.trim().split_once('.') else {
        bail!("expected section.key=value, got `{assignment}`");
    };
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(raw.trim().to_owned()),
    };
    let entry = table.entry(section.to_owned()).or_insert_with(|| Value::Table(Table::new()));
    let Value::Table(section_table) = entry else {
        bail!("`{section}` is not a section");
    };
    section_table.insert(key.to_owned(), value);
    Ok(())
}
