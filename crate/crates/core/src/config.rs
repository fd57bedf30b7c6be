//! TOML run configuration.
//!
//! ```toml
//! horizon = 20
//! F = "x^2 - 17"
//!
//! [family]
//! kind = "padic_approx"
//! p = 2
//! radicand = 17
//! ```

use serde::Deserialize;

use crate::error::{param, Error, Result};
use crate::field::Field;
use crate::limitfam::{Catalog, DriftMode, Family, Plant, DEFAULT_HORIZON};
use crate::ordgroup::GroupElement;
use crate::parse::{parse_elem, parse_poly};
use crate::poly::Poly;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub horizon: Option<usize>,
    #[serde(rename = "F")]
    pub f: Option<String>,
    pub family: RawFamily,
    pub plant: Option<RawPlant>,
    #[serde(default)]
    pub pipelines: Pipelines,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawFamily {
    PadicApprox { p: u64, radicand: i64 },
    MonomialTelescope { p: u64 },
    Rank2Drift { p: u64, radicand: i64, mode: String },
    ArtinSchreierUnbounded { p: u64 },
    ExplicitList { field: String, base_gamma: Option<String>, entries: Vec<RawEntry> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEntry {
    pub q: String,
    pub gamma: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPlant {
    pub index: usize,
    pub power: usize,
    pub coeff: String,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pipelines {
    #[serde(default = "yes")]
    pub theorems: bool,
    #[serde(default = "yes")]
    pub minimality: bool,
}

fn yes() -> bool {
    true
}

impl Default for Pipelines {
    fn default() -> Self {
        Pipelines { theorems: true, minimality: true }
    }
}

/// A validated configuration.
#[derive(Debug)]
pub struct Config {
    pub family: Family,
    pub f: Poly,
    pub horizon: usize,
    pub plant: Option<Plant>,
    pub pipelines: Pipelines,
}

fn group(s: &str, key: &str) -> Result<GroupElement> {
    s.parse().map_err(|e: Error| param(key, e.to_string()))
}

impl RawFamily {
    fn catalog(&self) -> Result<Catalog> {
        Ok(match self {
            RawFamily::PadicApprox { p, radicand } => Catalog::PadicApprox { p: *p, radicand: *radicand },
            RawFamily::MonomialTelescope { p } => Catalog::MonomialTelescope { p: *p },
            RawFamily::ArtinSchreierUnbounded { p } => Catalog::ArtinSchreierUnbounded { p: *p },
            RawFamily::Rank2Drift { p, radicand, mode } => {
                let mode = match mode.as_str() {
                    "in_h" => DriftMode::InH,
                    "above_h" => DriftMode::AboveH,
                    other => return Err(param("family.mode", format!("expected in_h or above_h, got `{other}`"))),
                };
                Catalog::Rank2Drift { p: *p, radicand: *radicand, mode }
            }
            RawFamily::ExplicitList { field, base_gamma, entries } => {
                let k: Field = field.parse().map_err(|e: Error| param("family.field", e.to_string()))?;
                let entries = entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let q = parse_poly(k, &e.q).map_err(|err| param(&format!("family.entries[{i}].q"), err.to_string()))?;
                        Ok((q, group(&e.gamma, &format!("family.entries[{i}].gamma"))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let base_gamma = base_gamma.as_deref().map(|s| group(s, "family.base_gamma")).transpose()?;
                Catalog::ExplicitList { field: k, entries, base_gamma }
            }
        })
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
        let family = Family::new(raw.family.catalog()?).map_err(|e| match e {
            Error::Param { key, msg } if !key.starts_with("plant") => param(&format!("family.{key}"), msg),
            e => e,
        })?;
        let horizon = raw.horizon.unwrap_or(DEFAULT_HORIZON);
        if horizon == 0 {
            return Err(param("horizon", "must be positive"));
        }
        let k = family.field();
        let base = match &raw.f {
            Some(s) => parse_poly(k, s).map_err(|e| param("F", e.to_string()))?,
            None => family.default_candidate().ok_or_else(|| param("F", "required for explicit lists"))?,
        };
        if !base.is_monic() {
            return Err(param("F", "must be monic"));
        }
        let plant = raw
            .plant
            .map(|p| -> Result<Plant> {
                let coeff = parse_elem(&k, &p.coeff).map_err(|e| param("plant.coeff", e.to_string()))?;
                Ok(Plant { index: p.index, power: p.power, coeff })
            })
            .transpose()?;
        let f = match &plant {
            Some(p) => family.plant(&base, p)?,
            None => base,
        };
        Ok(Config { family, f, horizon, plant, pipelines: raw.pipelines })
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Config::from_toml(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_config() {
        let c = Config::from_toml("horizon = 12\n[family]\nkind = \"monomial_telescope\"\np = 2\n").unwrap();
        assert_eq!(c.horizon, 12);
        assert_eq!(c.f.degree(), 2);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = Config::from_toml("horizn = 3\n[family]\nkind = \"monomial_telescope\"\np = 2\n").unwrap_err();
        assert!(e.to_string().contains("horizn"), "{e}");
        let e = Config::from_toml("[family]\nkind = \"padic_approx\"\np = 2\nradix = 17\n").unwrap_err();
        assert!(e.to_string().contains("radix"), "{e}");
    }

    #[test]
    fn bad_values_are_named() {
        let e = Config::from_toml("F = \"2*x^2\"\n[family]\nkind = \"padic_approx\"\np = 2\nradicand = 17\n").unwrap_err();
        assert!(e.to_string().contains("`F`"), "{e}");
        let e = Config::from_toml("[family]\nkind = \"rank2_drift\"\np = 2\nradicand = 17\nmode = \"up\"\n").unwrap_err();
        assert!(e.to_string().contains("family.mode"), "{e}");
    }

    #[test]
    fn explicit_list() {
        let text = r#"
            F = "x^2 - 17"
            [family]
            kind = "explicit_list"
            field = "padic(2)"
            entries = [
              { q = "x - 1", gamma = "(3)" },
              { q = "x - 9", gamma = "(5)" },
              { q = "x - 41", gamma = "(6)" },
            ]
        "#;
        let c = Config::from_toml(text).unwrap();
        assert_eq!(c.family.len(), Some(3));
        let bad = text.replace("(6)", "(4)");
        assert!(Config::from_toml(&bad).unwrap_err().to_string().contains("gamma"));
    }
}
