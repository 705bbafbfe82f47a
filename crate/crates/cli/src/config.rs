//! TOML run configuration.
//!
//! Four sections, `[architecture]`, `[probabilities]`, `[sweep]` and
//! `[simulation]`, layered as recipe defaults, then the config file, then
//! `--set key=value` overrides. Physically meaningful parameters (`d`,
//! `p_link`, `protocol`, ...) have no defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use dqc_core::{
    effective_link_probability, ArchitectureSpec, CodeDistance, GhzProtocol, PipelineProbabilities,
    ProtocolName, Type3Mode,
};

use crate::error::{CliError, Result};

pub const ARCHITECTURE_KEYS: &[&str] = &[
    "kind",
    "d",
    "protocol",
    "bell_pairs_per_copy",
    "uses_distillation",
    "symmetric_noise_p",
    "independent_generators_only",
    "type3_mode",
    "attempt_rate",
];
pub const PROBABILITY_KEYS: &[&str] = &["p_link", "p_distill", "p_parity", "multiplex_M"];
pub const SWEEP_KEYS: &[&str] = &["variable", "values", "protocols", "p_link_series"];
pub const SIMULATION_KEYS: &[&str] = &["trials", "seed", "confidence_level"];

pub const SECTIONS: &[(&str, &[&str])] = &[
    ("architecture", ARCHITECTURE_KEYS),
    ("probabilities", PROBABILITY_KEYS),
    ("sweep", SWEEP_KEYS),
    ("simulation", SIMULATION_KEYS),
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bell_pairs_per_copy: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uses_distillation: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetric_noise_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub independent_generators_only: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type3_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attempt_rate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilitiesSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_link: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_distill: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_parity: Option<f64>,
    #[serde(rename = "multiplex_M", skip_serializing_if = "Option::is_none")]
    pub multiplex_m: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocols: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_link_series: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence_level: Option<f64>,
}

/// The merged configuration, before validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub architecture: ArchitectureSection,
    #[serde(default)]
    pub probabilities: ProbabilitiesSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub simulation: SimulationSection,
}

impl RawConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn from_table(table: Table) -> Result<Self> {
        check_known_keys(&table)?;
        Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config(field_of(&e), e.message().to_owned()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_table(parse_table(text)?)
    }
}

fn field_of(err: &toml::de::Error) -> String {
    let msg = err.message();
    // serde reports unknown or mistyped keys as "... `name` ...".
    msg.split('`')
        .nth(1)
        .map(str::to_owned)
        .unwrap_or_else(|| "config".to_owned())
}

pub fn parse_table(text: &str) -> Result<Table> {
    text.parse::<Table>()
        .map_err(|e| CliError::config("config", e.message().to_owned()))
}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_table(&text)
}

fn check_known_keys(table: &Table) -> Result<()> {
    for (section, value) in table {
        let Some((_, keys)) = SECTIONS.iter().find(|(name, _)| name == section) else {
            return Err(CliError::config(
                section.clone(),
                format!("unknown section [{section}]"),
            ));
        };
        let Value::Table(inner) = value else {
            return Err(CliError::config(section.clone(), "expected a table"));
        };
        for key in inner.keys() {
            if !keys.contains(&key.as_str()) {
                return Err(CliError::config(
                    key.clone(),
                    format!("unknown key `{key}` in [{section}]"),
                ));
            }
        }
    }
    Ok(())
}

/// Overlays `top` onto `base` key by key within each section.
pub fn merge_tables(base: &mut Table, top: Table) {
    for (section, value) in top {
        match (base.get_mut(&section), value) {
            (Some(Value::Table(dst)), Value::Table(src)) => {
                for (k, v) in src {
                    dst.insert(k, v);
                }
            }
            (_, value) => {
                base.insert(section, value);
            }
        }
    }
}

/// Finds the section of a `--set` key, accepting `section.key` or a bare key.
fn locate_key(key: &str) -> Result<(&'static str, String)> {
    if let Some((section, name)) = key.split_once('.') {
        let Some((sec, keys)) = SECTIONS.iter().find(|(s, _)| *s == section) else {
            return Err(CliError::config(
                key,
                format!("unknown section `{section}` in --set"),
            ));
        };
        if !keys.contains(&name) {
            return Err(CliError::config(
                name,
                format!("unknown key `{name}` in [{section}]"),
            ));
        }
        return Ok((sec, name.to_owned()));
    }
    SECTIONS
        .iter()
        .find(|(_, keys)| keys.contains(&key))
        .map(|(sec, _)| (*sec, key.to_owned()))
        .ok_or_else(|| CliError::config(key, format!("unknown key `{key}` in --set")))
}

/// Applies one `key=value` override; the value is read as TOML, falling back to a string.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let Some((key, raw_value)) = assignment.split_once('=') else {
        return Err(CliError::Usage(format!(
            "--set expects key=value, got {assignment:?}"
        )));
    };
    let (section, name) = locate_key(key.trim())?;
    let raw_value = raw_value.trim();
    let value = format!("v = {raw_value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw_value.to_owned()));
    let entry = table
        .entry(section.to_owned())
        .or_insert_with(|| Value::Table(Table::new()));
    match entry {
        Value::Table(inner) => {
            inner.insert(name, value);
            Ok(())
        }
        _ => Err(CliError::config(section, "expected a table")),
    }
}

/// Builds the merged raw config from optional recipe defaults, file and overrides.
pub fn load(recipe: Option<Table>, path: Option<&Path>, overrides: &[String]) -> Result<RawConfig> {
    let mut table = recipe.unwrap_or_default();
    if let Some(path) = path {
        let file = read_table(path)?;
        check_known_keys(&file)?;
        merge_tables(&mut table, file);
    }
    for assignment in overrides {
        apply_override(&mut table, assignment)?;
    }
    RawConfig::from_table(table)
}

/// Which architecture family a config selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindTag {
    Type1,
    Type2,
    Type3,
}

impl std::str::FromStr for KindTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "type1" | "typei" | "type_i" => Ok(KindTag::Type1),
            "type2" | "typeii" | "type_ii" => Ok(KindTag::Type2),
            "type3" | "typeiii" | "type_iii" => Ok(KindTag::Type3),
            other => Err(format!(
                "unknown kind {other:?} (expected type1, type2 or type3)"
            )),
        }
    }
}

impl RawConfig {
    pub fn kind_tag(&self) -> Result<KindTag> {
        let kind = self
            .architecture
            .kind
            .as_deref()
            .ok_or_else(|| CliError::missing("kind", "architecture"))?;
        kind.parse().map_err(|m| CliError::config("kind", m))
    }

    pub fn protocol(&self) -> Result<GhzProtocol> {
        let name = self
            .architecture
            .protocol
            .as_deref()
            .ok_or_else(|| CliError::missing("protocol", "architecture"))?;
        let name: ProtocolName = name.parse().map_err(|m| CliError::config("protocol", m))?;
        protocol_from_name(self, name)
    }

    /// The link probability fed to the formulas, after multiplexing.
    pub fn effective_p_link(&self) -> Result<f64> {
        let p_link = self
            .probabilities
            .p_link
            .ok_or_else(|| CliError::missing("p_link", "probabilities"))?;
        let m = match self.probabilities.multiplex_m {
            None => return Ok(p_link),
            Some(m) => u32::try_from(m).map_err(|_| {
                CliError::config(
                    "multiplex_M",
                    format!("must be a positive integer, got {m}"),
                )
            })?,
        };
        Ok(effective_link_probability(p_link, m)?)
    }

    pub fn distance(&self) -> Result<CodeDistance> {
        let d = self
            .architecture
            .d
            .ok_or_else(|| CliError::missing("d", "architecture"))?;
        let d = u32::try_from(d)
            .map_err(|_| CliError::config("d", format!("must be a positive integer, got {d}")))?;
        Ok(CodeDistance::new(d)?)
    }

    /// Validates the architecture and probability sections.
    pub fn architecture_spec(&self) -> Result<ArchitectureSpec> {
        let d = self.distance()?;
        let p_link = self.effective_p_link()?;
        let arch = &self.architecture;
        let mut spec = match self.kind_tag()? {
            KindTag::Type1 => {
                let protocol = self.protocol()?;
                let p_distill = if protocol.uses_distillation() {
                    self.probabilities
                        .p_distill
                        .ok_or_else(|| CliError::missing("p_distill", "probabilities"))?
                } else {
                    1.0
                };
                let p_parity = match (arch.symmetric_noise_p, self.probabilities.p_parity) {
                    (Some(_), _) => 1.0,
                    (None, Some(p)) => p,
                    (None, None) => {
                        return Err(CliError::config(
                            "p_parity",
                            "type1 needs p_parity in [probabilities] or symmetric_noise_p in [architecture]",
                        ))
                    }
                };
                let probs = PipelineProbabilities::new(p_link, p_distill, p_parity)?;
                let mut spec = ArchitectureSpec::type1(d, protocol, probs)
                    .with_independent_generators_only(
                        arch.independent_generators_only.unwrap_or(false),
                    );
                if let Some(p) = arch.symmetric_noise_p {
                    spec = spec.with_symmetric_noise(p);
                }
                spec
            }
            KindTag::Type2 => ArchitectureSpec::type2(d, p_link)?,
            KindTag::Type3 => {
                let mode = arch
                    .type3_mode
                    .as_deref()
                    .ok_or_else(|| CliError::missing("type3_mode", "architecture"))?;
                let mode: Type3Mode = mode
                    .parse()
                    .map_err(|m| CliError::config("type3_mode", m))?;
                ArchitectureSpec::type3(d, mode, p_link)?
            }
        };
        if let Some(rate) = arch.attempt_rate {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(CliError::config(
                    "attempt_rate",
                    format!("must be positive, got {rate}"),
                ));
            }
            spec = spec.with_attempt_rate(rate);
        }
        // Surfaces noise-range and probability errors now rather than at estimate time.
        spec.resolved_probabilities()?;
        Ok(spec)
    }
}

pub fn protocol_from_name(raw: &RawConfig, name: ProtocolName) -> Result<GhzProtocol> {
    if let Some(named) = GhzProtocol::named(name) {
        return Ok(named);
    }
    let n = raw
        .architecture
        .bell_pairs_per_copy
        .ok_or_else(|| CliError::missing("bell_pairs_per_copy", "architecture"))?;
    let n = u32::try_from(n).map_err(|_| {
        CliError::config(
            "bell_pairs_per_copy",
            format!("must be a positive integer, got {n}"),
        )
    })?;
    let distill = raw
        .architecture
        .uses_distillation
        .ok_or_else(|| CliError::missing("uses_distillation", "architecture"))?;
    Ok(GhzProtocol::custom(n, distill)?)
}

/// Resolved `[simulation]` settings with flag overrides applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    pub trials: u64,
    pub seed: u64,
    pub confidence_level: f64,
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;

impl RawConfig {
    pub fn simulation_settings(&self) -> Result<SimulationSettings> {
        let sim = &self.simulation;
        let trials = match sim.trials {
            None => DEFAULT_TRIALS,
            Some(t) if t >= 1 => t as u64,
            Some(t) => {
                return Err(CliError::config(
                    "trials",
                    format!("must be at least 1, got {t}"),
                ))
            }
        };
        let seed = match sim.seed {
            None => DEFAULT_SEED,
            Some(s) => u64::try_from(s)
                .map_err(|_| CliError::config("seed", format!("must be non-negative, got {s}")))?,
        };
        let confidence_level = sim
            .confidence_level
            .unwrap_or(dqc_core::montecarlo::DEFAULT_CONFIDENCE_LEVEL);
        let config = dqc_core::SimulationConfig::with_confidence(trials, seed, confidence_level)?;
        Ok(SimulationSettings {
            trials: config.trials,
            seed: config.seed,
            confidence_level: config.confidence_level,
        })
    }

    /// Applies `--trials` and `--seed`, which take precedence over the file.
    pub fn apply_simulation_flags(&mut self, trials: Option<u64>, seed: Option<u64>) -> Result<()> {
        if let Some(t) = trials {
            self.simulation.trials =
                Some(i64::try_from(t).map_err(|_| CliError::config("trials", "too large"))?);
        }
        if let Some(s) = seed {
            // TOML integers are signed 64-bit; larger seeds are rejected.
            self.simulation.seed =
                Some(i64::try_from(s).map_err(|_| {
                    CliError::config("seed", format!("must be below 2^63, got {s}"))
                })?);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dqc_core::ArchitectureKind;

    const TYPE2: &str = r#"
[architecture]
kind = "type2"
d = 3

[probabilities]
p_link = 0.5
"#;

    fn field(err: CliError) -> String {
        match err {
            CliError::Config { field, .. } => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_type2() {
        let raw = RawConfig::parse(TYPE2).unwrap();
        let spec = raw.architecture_spec().unwrap();
        assert_eq!(spec.d.get(), 3);
        assert_eq!(spec.probs.p_link, 0.5);
    }

    #[test]
    fn missing_distance_names_d() {
        let raw =
            RawConfig::parse("[architecture]\nkind = \"type2\"\n[probabilities]\np_link = 0.5\n")
                .unwrap();
        assert_eq!(field(raw.architecture_spec().unwrap_err()), "d");
    }

    #[test]
    fn missing_protocol_and_link_named() {
        let raw = RawConfig::parse("[architecture]\nkind = \"type1\"\nd = 3\n[probabilities]\np_link = 0.5\np_parity = 1.0\n").unwrap();
        assert_eq!(field(raw.architecture_spec().unwrap_err()), "protocol");
        let raw = RawConfig::parse("[architecture]\nkind = \"type2\"\nd = 3\n").unwrap();
        assert_eq!(field(raw.architecture_spec().unwrap_err()), "p_link");
    }

    #[test]
    fn distilled_protocol_requires_p_distill() {
        let raw = RawConfig::parse(
            "[architecture]\nkind = \"type1\"\nd = 3\nprotocol = \"basic\"\nsymmetric_noise_p = 0.0\n[probabilities]\np_link = 0.5\n",
        )
        .unwrap();
        assert_eq!(field(raw.architecture_spec().unwrap_err()), "p_distill");
    }

    #[test]
    fn unknown_keys_rejected_with_name() {
        let err = RawConfig::parse("[architecture]\nkind = \"type2\"\ndistance = 3\n").unwrap_err();
        assert_eq!(field(err), "distance");
        let err = RawConfig::parse("[extras]\nx = 1\n").unwrap_err();
        assert_eq!(field(err), "extras");
    }

    #[test]
    fn invalid_values_named() {
        let raw = RawConfig::parse(
            "[architecture]\nkind = \"type2\"\nd = 0\n[probabilities]\np_link = 0.5\n",
        )
        .unwrap();
        assert_eq!(field(raw.architecture_spec().unwrap_err()), "d");
        let raw = RawConfig::parse(
            "[architecture]\nkind = \"type2\"\nd = 3\n[probabilities]\np_link = 0.0\n",
        )
        .unwrap();
        assert_eq!(field(raw.architecture_spec().unwrap_err()), "p_link");
        let raw = RawConfig::parse("[architecture]\nkind = \"type2\"\nd = 3\n[probabilities]\np_link = 0.5\nmultiplex_M = 0\n").unwrap();
        assert_eq!(field(raw.architecture_spec().unwrap_err()), "multiplex_M");
        let err =
            RawConfig::parse("[architecture]\nkind = \"type2\"\nd = \"three\"\n").unwrap_err();
        assert!(matches!(err, CliError::Config { .. }));
    }

    #[test]
    fn overrides_accept_bare_and_dotted_keys() {
        let mut table = parse_table(TYPE2).unwrap();
        apply_override(&mut table, "d=5").unwrap();
        apply_override(&mut table, "probabilities.p_link=0.25").unwrap();
        apply_override(&mut table, "kind=type3").unwrap();
        apply_override(&mut table, "type3_mode = transversal_cnot").unwrap();
        let raw = RawConfig::from_table(table).unwrap();
        let spec = raw.architecture_spec().unwrap();
        assert_eq!(spec.d.get(), 5);
        assert_eq!(spec.probs.p_link, 0.25);
        assert_eq!(
            spec.kind,
            ArchitectureKind::TypeIII {
                mode: Type3Mode::TransversalCnot
            }
        );

        let mut table = Table::new();
        assert_eq!(
            field(apply_override(&mut table, "bogus=1").unwrap_err()),
            "bogus"
        );
        assert!(matches!(
            apply_override(&mut table, "no-equals"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn multiplexing_substitutes_effective_link() {
        let raw = RawConfig::parse(
            "[architecture]\nkind = \"type2\"\nd = 3\n[probabilities]\np_link = 0.5\nmultiplex_M = 2\n",
        )
        .unwrap();
        assert_eq!(raw.effective_p_link().unwrap(), 0.75);
    }

    #[test]
    fn toml_round_trip_preserves_config() {
        let text = r#"
[architecture]
kind = "type1"
d = 7
protocol = "refined"
symmetric_noise_p = 0.013
independent_generators_only = true
attempt_rate = 1e6

[probabilities]
p_link = 0.123456789012345
p_distill = 0.5

[sweep]
variable = "noise_p"
values = [0.0, 0.001, 0.1]
protocols = ["plain", "refined"]

[simulation]
trials = 1000
seed = 42
"#;
        let raw = RawConfig::parse(text).unwrap();
        let again = RawConfig::parse(&raw.to_toml().unwrap()).unwrap();
        assert_eq!(raw, again);
        assert_eq!(
            raw.architecture_spec().unwrap(),
            again.architecture_spec().unwrap()
        );
    }

    #[test]
    fn simulation_defaults_and_flags() {
        let mut raw = RawConfig::parse(TYPE2).unwrap();
        let s = raw.simulation_settings().unwrap();
        assert_eq!((s.trials, s.seed), (DEFAULT_TRIALS, DEFAULT_SEED));
        raw.apply_simulation_flags(Some(10), Some(7)).unwrap();
        let s = raw.simulation_settings().unwrap();
        assert_eq!((s.trials, s.seed), (10, 7));
        assert_eq!(
            field(
                raw.apply_simulation_flags(None, Some(u64::MAX))
                    .unwrap_err()
            ),
            "seed"
        );
    }
}
