//! Plain-text symbol definitions.
//!
//! One `key = value` pair per line, `#` starts a comment. The `kind` key
//! selects the representation:
//!
//! ```text
//! kind = cosine-thermal      # beta, mu, hopping = 1, dim = 1
//! kind = constant            # value, dim = 1
//! kind = fourier-table       # dim = 1, coefficients = j:re:im, ... or table = file.csv
//! kind = grid                # dim = 1, samples = v0, v1, ...
//! ```
//!
//! Optional keys for every kind: `label`, and `rearrange` (for example
//! `translation:0.25`, `reflection`, `permutation:1,0`). Multi-indices in
//! inline coefficients are written `1;0:0.1:0`. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbol::{self, parse_f64, parse_index, FourierTable, GridSamples, Rearrangement, Symbol};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymbolSpec {
    Constant {
        dim: usize,
        value: f64,
    },
    CosineThermal {
        dim: usize,
        beta: f64,
        mu: f64,
        hopping: f64,
    },
    FourierTable {
        dim: usize,
        /// Inline entries, or entries read from `table`.
        coefficients: Vec<(Vec<i64>, f64, f64)>,
        #[serde(skip_serializing_if = "Option::is_none")]
        table: Option<PathBuf>,
    },
    Grid {
        dim: usize,
        samples: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolConfig {
    #[serde(flatten)]
    pub spec: SymbolSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rearrange: Option<String>,
}

const COMMON_KEYS: &[&str] = &["kind", "label", "rearrange", "dim"];

fn allowed_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "constant" => &["value"],
        "cosine-thermal" => &["beta", "mu", "hopping"],
        "fourier-table" => &["coefficients", "table"],
        "grid" => &["samples"],
        _ => return None,
    })
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = k.trim().to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key {key:?}", lineno + 1)));
        }
    }
    Ok(map)
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    map.get(key)
        .map(|v| parse_f64(v).map_err(|_| Error::Config(format!("key {key:?}: bad number {v:?}"))))
        .transpose()
}

fn required(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    number(map, key)?.ok_or_else(|| Error::Config(format!("missing required key {key:?}")))
}

impl SymbolConfig {
    /// Parses config text; relative `table` paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let map = parse_pairs(text)?;
        let kind = map
            .get("kind")
            .ok_or_else(|| Error::Config("missing required key \"kind\"".into()))?
            .as_str();
        let extra = allowed_keys(kind).ok_or_else(|| Error::Config(format!("unknown symbol kind {kind:?}")))?;
        if let Some(bad) = map
            .keys()
            .find(|k| !COMMON_KEYS.contains(&k.as_str()) && !extra.contains(&k.as_str()))
        {
            return Err(Error::Config(format!("unknown key {bad:?} for kind {kind:?}")));
        }
        let dim = match map.get("dim") {
            None => 1,
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("key \"dim\": bad integer {v:?}")))?,
        };
        let spec = match kind {
            "constant" => SymbolSpec::Constant {
                dim,
                value: required(&map, "value")?,
            },
            "cosine-thermal" => SymbolSpec::CosineThermal {
                dim,
                beta: required(&map, "beta")?,
                mu: required(&map, "mu")?,
                hopping: number(&map, "hopping")?.unwrap_or(1.0),
            },
            "fourier-table" => match (map.get("coefficients"), map.get("table")) {
                (Some(list), None) => SymbolSpec::FourierTable {
                    dim,
                    coefficients: list
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(parse_coefficient)
                        .collect::<Result<_>>()?,
                    table: None,
                },
                (None, Some(file)) => {
                    let path = base_dir.join(file);
                    let reader = std::fs::File::open(&path)
                        .map_err(|e| Error::Config(format!("cannot open coefficient table {}: {e}", path.display())))?;
                    let table = FourierTable::read_csv(reader, dim)?;
                    SymbolSpec::FourierTable {
                        dim,
                        coefficients: table.iter().map(|(j, c)| (j.clone(), c.re, c.im)).collect(),
                        table: Some(path),
                    }
                }
                _ => {
                    return Err(Error::Config(
                        "fourier-table needs exactly one of \"coefficients\" or \"table\"".into(),
                    ))
                }
            },
            "grid" => SymbolSpec::Grid {
                dim,
                samples: map
                    .get("samples")
                    .ok_or_else(|| Error::Config("missing required key \"samples\"".into()))?
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(parse_f64)
                    .collect::<Result<_>>()?,
            },
            _ => unreachable!(),
        };
        Ok(Self {
            spec,
            label: map.get("label").cloned(),
            rearrange: map.get("rearrange").cloned(),
        })
    }

    pub fn build(&self) -> Result<Symbol> {
        let q = match &self.spec {
            SymbolSpec::Constant { dim, value } => Symbol::constant(*dim, *value)?,
            SymbolSpec::CosineThermal { dim, beta, mu, hopping } => symbol::cosine_thermal(*dim, *beta, *mu, *hopping)?,
            SymbolSpec::FourierTable { dim, coefficients, .. } => {
                let table = FourierTable::new(
                    *dim,
                    coefficients.iter().map(|(j, re, im)| (j.clone(), Complex64::new(*re, *im))),
                    1e-12,
                )?;
                Symbol::from_fourier(table, "fourier-table")?
            }
            SymbolSpec::Grid { dim, samples } => Symbol::from_grid(GridSamples::new(*dim, samples.clone())?, "grid")?,
        };
        let q = match &self.rearrange {
            Some(m) => symbol::rearrange(&q, Rearrangement::parse(m)?)?,
            None => q,
        };
        Ok(match &self.label {
            Some(l) => q.with_label(l.clone()),
            None => q,
        })
    }
}

fn parse_coefficient(s: &str) -> Result<(Vec<i64>, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [j, re] => Ok((parse_index(j)?, parse_f64(re)?, 0.0)),
        [j, re, im] => Ok((parse_index(j)?, parse_f64(re)?, parse_f64(im)?)),
        _ => Err(Error::Config(format!("coefficient {s:?} is not j:re[:im]"))),
    }
}

/// Reads and parses a symbol file. Errors name the path.
pub fn load_config(path: &Path) -> Result<SymbolConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read symbol file {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    SymbolConfig::parse(&text, base).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        Error::InvalidArgument(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn load_symbol(path: &Path) -> Result<Symbol> {
    let config = load_config(path)?;
    config.build().map_err(|e| match e {
        Error::InvalidArgument(m) | Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<SymbolConfig> {
        SymbolConfig::parse(text, Path::new("."))
    }

    #[test]
    fn thermal_defaults() {
        let c = parse("kind = cosine-thermal\nbeta = 2 # inverse temperature\nmu = 0\n").unwrap();
        assert_eq!(
            c.spec,
            SymbolSpec::CosineThermal {
                dim: 1,
                beta: 2.0,
                mu: 0.0,
                hopping: 1.0
            }
        );
        let q = c.build().unwrap();
        assert!((q.eval(&[0.25]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inline_coefficients() {
        let q = parse("kind = fourier-table\ncoefficients = 0:0.5, 1:0.25:0, -1:0.25\n")
            .unwrap()
            .build()
            .unwrap();
        assert!((q.eval(&[0.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        assert!(matches!(parse("kind = constant\nvalue = 0.5\nbeta = 1\n"), Err(Error::Config(_))));
        assert!(matches!(parse("kind = wavelet\n"), Err(Error::Config(_))));
        assert!(matches!(parse("value = 0.5\n"), Err(Error::Config(_))));
        assert!(matches!(parse("kind constant\n"), Err(Error::Config(_))));
    }

    #[test]
    fn rearranged_grid() {
        let q = parse("kind = grid\nsamples = 0.1, 0.9\nrearrange = translation:0.5\nlabel = two\n")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(q.label(), "two");
        assert!((q.eval(&[0.0]).unwrap() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_symbol(Path::new("/nonexistent/sym.conf")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/sym.conf"));
        assert!(err.is_config());
    }
}
