//! Parameter sweeps and the named figure recipes.

use toml::{Table, Value};

use dqc_core::{ArchitectureKind, ArchitectureSpec, ProtocolName};

use crate::config::{KindTag, RawConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Distance,
    NoiseP,
    PLink,
    MultiplexM,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance",
            SweepVariable::NoiseP => "noise_p",
            SweepVariable::PLink => "p_link",
            SweepVariable::MultiplexM => "multiplex_M",
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "distance" | "d" => Ok(SweepVariable::Distance),
            "noise_p" | "p" => Ok(SweepVariable::NoiseP),
            "p_link" => Ok(SweepVariable::PLink),
            "multiplex_M" | "multiplex_m" | "M" => Ok(SweepVariable::MultiplexM),
            other => Err(format!(
                "unknown sweep variable {other:?} (expected distance, noise_p, p_link or multiplex_M)"
            )),
        }
    }
}

/// A validated sweep over one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Type I only; one series per protocol.
    pub protocols: Vec<ProtocolName>,
    /// Optional extra series over the link probability.
    pub p_link_series: Vec<f64>,
}

impl SweepSpec {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let section = raw
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::config("sweep", "no [sweep] section and no --recipe given"))?;
        let variable: SweepVariable = section
            .variable
            .as_deref()
            .ok_or_else(|| CliError::missing("variable", "sweep"))?
            .parse()
            .map_err(|m| CliError::config("variable", m))?;
        let values = section
            .values
            .clone()
            .ok_or_else(|| CliError::missing("values", "sweep"))?;
        if values.is_empty() {
            return Err(CliError::config("values", "sweep values must not be empty"));
        }
        if !values.windows(2).all(|w| w[0] < w[1]) {
            return Err(CliError::config(
                "values",
                "sweep values must be strictly increasing",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("values", "sweep values must be finite"));
        }

        let kind = raw.kind_tag()?;
        match variable {
            SweepVariable::NoiseP if kind != KindTag::Type1 => {
                return Err(CliError::config(
                    "variable",
                    "noise_p sweeps need kind = \"type1\"",
                ))
            }
            SweepVariable::Distance | SweepVariable::MultiplexM => {
                if let Some(bad) = values.iter().find(|v| v.fract() != 0.0 || **v < 1.0) {
                    return Err(CliError::config(
                        "values",
                        format!(
                            "{} values must be positive integers, got {bad}",
                            variable.as_str()
                        ),
                    ));
                }
            }
            _ => {}
        }

        let protocols = match (&section.protocols, kind) {
            (Some(names), KindTag::Type1) => {
                if names.is_empty() {
                    return Err(CliError::config(
                        "protocols",
                        "protocol list must not be empty",
                    ));
                }
                names
                    .iter()
                    .map(|n| n.parse().map_err(|m| CliError::config("protocols", m)))
                    .collect::<Result<Vec<ProtocolName>>>()?
            }
            (Some(_), _) => {
                return Err(CliError::config(
                    "protocols",
                    "protocols only apply to type1 sweeps",
                ))
            }
            (None, _) => Vec::new(),
        };

        let p_link_series = section.p_link_series.clone().unwrap_or_default();
        if !p_link_series.is_empty() && variable == SweepVariable::PLink {
            return Err(CliError::config(
                "p_link_series",
                "cannot add a p_link series to a p_link sweep",
            ));
        }

        Ok(SweepSpec {
            variable,
            values,
            protocols,
            p_link_series,
        })
    }

    /// Expands into one validated architecture per output row.
    ///
    /// Order: protocol, then link-probability series, then swept value.
    pub fn points(&self, base: &RawConfig) -> Result<Vec<SweepPoint>> {
        let protocols: Vec<Option<ProtocolName>> = if self.protocols.is_empty() {
            vec![None]
        } else {
            self.protocols.iter().copied().map(Some).collect()
        };
        let series: Vec<Option<f64>> = if self.p_link_series.is_empty() {
            vec![None]
        } else {
            self.p_link_series.iter().copied().map(Some).collect()
        };

        let mut out = Vec::with_capacity(protocols.len() * series.len() * self.values.len());
        for protocol in &protocols {
            for p_link in &series {
                for &value in &self.values {
                    let mut raw = base.clone();
                    if let Some(name) = protocol {
                        raw.architecture.protocol = Some(name.as_str().to_owned());
                    }
                    if let Some(p) = p_link {
                        raw.probabilities.p_link = Some(*p);
                    }
                    match self.variable {
                        SweepVariable::Distance => raw.architecture.d = Some(value as i64),
                        SweepVariable::NoiseP => raw.architecture.symmetric_noise_p = Some(value),
                        SweepVariable::PLink => raw.probabilities.p_link = Some(value),
                        SweepVariable::MultiplexM => {
                            raw.probabilities.multiplex_m = Some(value as i64)
                        }
                    }
                    let spec = raw.architecture_spec()?;
                    out.push(SweepPoint { value, spec });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub spec: ArchitectureSpec,
}

impl SweepPoint {
    pub fn is_type1(&self) -> bool {
        matches!(self.spec.kind, ArchitectureKind::TypeI { .. })
    }
}

/// Figure reproductions with their caption parameters preloaded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Recipe {
    /// Type I attempts per round versus distance, all four protocols.
    Fig3,
    /// Type I attempts per round versus noise at d = 100, all four protocols.
    Fig4,
    /// Type II seam attempts versus distance for p_link 0.1 to 0.5.
    Fig6,
    /// Type III transversal CNOT attempts versus distance for p_link 0.1 to 0.5.
    Fig8,
}

pub const FIG4_NOISE_VALUES: &[f64] = &[
    0.0, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25,
];

pub const LINK_SERIES: &[f64] = &[0.1, 0.2, 0.3, 0.4, 0.5];

fn floats(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&v| Value::Float(v)).collect())
}

fn strings(values: &[&str]) -> Value {
    Value::Array(
        values
            .iter()
            .map(|&v| Value::String(v.to_owned()))
            .collect(),
    )
}

fn table(entries: Vec<(&str, Value)>) -> Value {
    Value::Table(
        entries
            .into_iter()
            .map(|(k, v)| (k.to_owned(), v))
            .collect(),
    )
}

impl Recipe {
    /// Recipe defaults as a config table; file and `--set` values override it.
    pub fn defaults(self) -> Table {
        let all_protocols = strings(&["plain", "basic", "medium", "refined"]);
        let odd_distances: Vec<f64> = (1..=12).map(|k| f64::from(2 * k + 1)).collect();
        let mut out = Table::new();
        match self {
            Recipe::Fig3 => {
                let distances: Vec<f64> = (1..=20).map(|k| f64::from(5 * k)).collect();
                out.insert(
                    "architecture".into(),
                    table(vec![
                        ("kind", Value::String("type1".into())),
                        ("symmetric_noise_p", Value::Float(0.01)),
                    ]),
                );
                out.insert(
                    "probabilities".into(),
                    table(vec![
                        ("p_link", Value::Float(0.5)),
                        ("p_distill", Value::Float(0.5)),
                    ]),
                );
                out.insert(
                    "sweep".into(),
                    table(vec![
                        ("variable", Value::String("distance".into())),
                        ("values", floats(&distances)),
                        ("protocols", all_protocols),
                    ]),
                );
            }
            Recipe::Fig4 => {
                out.insert(
                    "architecture".into(),
                    table(vec![
                        ("kind", Value::String("type1".into())),
                        ("d", Value::Integer(100)),
                    ]),
                );
                out.insert(
                    "probabilities".into(),
                    table(vec![
                        ("p_link", Value::Float(0.5)),
                        ("p_distill", Value::Float(0.5)),
                    ]),
                );
                out.insert(
                    "sweep".into(),
                    table(vec![
                        ("variable", Value::String("noise_p".into())),
                        ("values", floats(FIG4_NOISE_VALUES)),
                        ("protocols", all_protocols),
                    ]),
                );
            }
            Recipe::Fig6 | Recipe::Fig8 => {
                let arch = if self == Recipe::Fig6 {
                    table(vec![("kind", Value::String("type2".into()))])
                } else {
                    table(vec![
                        ("kind", Value::String("type3".into())),
                        ("type3_mode", Value::String("transversal_cnot".into())),
                    ])
                };
                out.insert("architecture".into(), arch);
                out.insert(
                    "sweep".into(),
                    table(vec![
                        ("variable", Value::String("distance".into())),
                        ("values", floats(&odd_distances)),
                        ("p_link_series", floats(LINK_SERIES)),
                    ]),
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{apply_override, RawConfig};

    fn recipe_config(recipe: Recipe, overrides: &[&str]) -> RawConfig {
        let mut t = recipe.defaults();
        for o in overrides {
            apply_override(&mut t, o).unwrap();
        }
        RawConfig::from_table(t).unwrap()
    }

    #[test]
    fn recipes_validate() {
        for recipe in [Recipe::Fig3, Recipe::Fig4, Recipe::Fig6, Recipe::Fig8] {
            let raw = recipe_config(recipe, &[]);
            let sweep = SweepSpec::from_raw(&raw).unwrap();
            let points = sweep.points(&raw).unwrap();
            assert!(!points.is_empty(), "{recipe:?}");
        }
    }

    #[test]
    fn fig3_covers_four_protocols() {
        let raw = recipe_config(Recipe::Fig3, &[]);
        let sweep = SweepSpec::from_raw(&raw).unwrap();
        assert_eq!(sweep.protocols, ProtocolName::NAMED.to_vec());
        assert_eq!(sweep.points(&raw).unwrap().len(), 4 * 20);
    }

    #[test]
    fn fig6_series_expand() {
        let raw = recipe_config(Recipe::Fig6, &["sweep.values=[3, 5]"]);
        let points = SweepSpec::from_raw(&raw).unwrap().points(&raw).unwrap();
        assert_eq!(points.len(), 2 * LINK_SERIES.len());
        assert_eq!(points[0].spec.probs.p_link, 0.1);
        assert_eq!(points[1].spec.d.get(), 5);
    }

    #[test]
    fn empty_or_unsorted_values_rejected() {
        let raw = recipe_config(Recipe::Fig6, &["values=[]"]);
        let err = SweepSpec::from_raw(&raw).unwrap_err();
        assert!(
            matches!(err, CliError::Config { ref field, .. } if field == "values"),
            "{err}"
        );
        let raw = recipe_config(Recipe::Fig6, &["values=[5, 3]"]);
        assert!(SweepSpec::from_raw(&raw).is_err());
        let raw = recipe_config(Recipe::Fig6, &["values=[2.5]"]);
        assert!(SweepSpec::from_raw(&raw).is_err());
    }

    #[test]
    fn noise_sweep_needs_type1() {
        let raw = recipe_config(Recipe::Fig6, &["variable=noise_p", "values=[0.01]"]);
        let err = SweepSpec::from_raw(&raw).unwrap_err();
        assert!(matches!(err, CliError::Config { ref field, .. } if field == "variable"));
    }

    #[test]
    fn multiplex_sweep_uses_effective_link() {
        let raw = recipe_config(
            Recipe::Fig6,
            &[
                "variable=multiplex_M",
                "values=[1, 2]",
                "p_link_series=[0.5]",
                "d=3",
            ],
        );
        let points = SweepSpec::from_raw(&raw).unwrap().points(&raw).unwrap();
        assert_eq!(points[0].spec.probs.p_link, 0.5);
        assert_eq!(points[1].spec.probs.p_link, 0.75);
    }
}
