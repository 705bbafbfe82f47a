//! Closed-form expected link-attempt counts for the three distributed layouts.
//!
//! * Type I: toric code, every weight-4 stabilizer measured through a GHZ
//!   state shared by four nodes.
//! * Type II: planar patches stitched along a seam of `2d − 1` qubits.
//! * Type III: whole logical blocks per node, joined by transversal CNOT,
//!   logical teleportation or lattice surgery.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive_probability, Error, Result};
use crate::geometry::{seam_qubit_count, CodeDistance};
use crate::parity::symmetric_accept_probability;
use crate::pipeline::{expected_attempts_per_ghz, GhzProtocol, PipelineProbabilities};

/// How a Type III node pair spends entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Type3Mode {
    TransversalCnot,
    Teleportation,
    LatticeSurgery,
}

impl Type3Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Type3Mode::TransversalCnot => "transversal_cnot",
            Type3Mode::Teleportation => "teleportation",
            Type3Mode::LatticeSurgery => "lattice_surgery",
        }
    }
}

impl std::str::FromStr for Type3Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "transversal_cnot" | "transversal" => Ok(Type3Mode::TransversalCnot),
            "teleportation" => Ok(Type3Mode::Teleportation),
            "lattice_surgery" => Ok(Type3Mode::LatticeSurgery),
            other => Err(format!(
                "unknown type3_mode {other:?} (expected transversal_cnot, teleportation or lattice_surgery)"
            )),
        }
    }
}

/// Architecture-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArchitectureKind {
    TypeI {
        protocol: GhzProtocol,
        /// Common depolarizing rate; when set, it replaces the stored `p_parity`.
        symmetric_noise_p: Option<f64>,
        /// Count `d² − 1` generators per type instead of `d²`.
        independent_generators_only: bool,
    },
    TypeII,
    TypeIII {
        mode: Type3Mode,
    },
}

impl ArchitectureKind {
    pub fn label(&self) -> &'static str {
        match self {
            ArchitectureKind::TypeI { .. } => "type1",
            ArchitectureKind::TypeII => "type2",
            ArchitectureKind::TypeIII { .. } => "type3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureSpec {
    pub kind: ArchitectureKind,
    pub d: CodeDistance,
    /// Types II and III read only `p_link`.
    pub probs: PipelineProbabilities,
    /// Link attempts per second, for wall-clock conversion.
    pub attempt_rate: Option<f64>,
}

impl ArchitectureSpec {
    pub fn type1(d: CodeDistance, protocol: GhzProtocol, probs: PipelineProbabilities) -> Self {
        Self {
            kind: ArchitectureKind::TypeI {
                protocol,
                symmetric_noise_p: None,
                independent_generators_only: false,
            },
            d,
            probs,
            attempt_rate: None,
        }
    }

    pub fn type2(d: CodeDistance, p_link: f64) -> Result<Self> {
        Ok(Self {
            kind: ArchitectureKind::TypeII,
            d,
            probs: PipelineProbabilities::link_only(p_link)?,
            attempt_rate: None,
        })
    }

    pub fn type3(d: CodeDistance, mode: Type3Mode, p_link: f64) -> Result<Self> {
        Ok(Self {
            kind: ArchitectureKind::TypeIII { mode },
            d,
            probs: PipelineProbabilities::link_only(p_link)?,
            attempt_rate: None,
        })
    }

    /// Sets the symmetric noise rate on a Type I spec; ignored for other kinds.
    pub fn with_symmetric_noise(mut self, p: f64) -> Self {
        if let ArchitectureKind::TypeI {
            symmetric_noise_p, ..
        } = &mut self.kind
        {
            *symmetric_noise_p = Some(p);
        }
        self
    }

    pub fn with_independent_generators_only(mut self, flag: bool) -> Self {
        if let ArchitectureKind::TypeI {
            independent_generators_only,
            ..
        } = &mut self.kind
        {
            *independent_generators_only = flag;
        }
        self
    }

    pub fn with_attempt_rate(mut self, rate: f64) -> Self {
        self.attempt_rate = Some(rate);
        self
    }

    pub fn protocol(&self) -> Option<GhzProtocol> {
        match self.kind {
            ArchitectureKind::TypeI { protocol, .. } => Some(protocol),
            _ => None,
        }
    }

    /// Probabilities as the formulas see them.
    ///
    /// Type I derives `p_parity` from the symmetric noise rate when one is
    /// set and forces `p_distill = 1` for protocols without distillation.
    /// Types II and III keep only `p_link`.
    pub fn resolved_probabilities(&self) -> Result<PipelineProbabilities> {
        match self.kind {
            ArchitectureKind::TypeI {
                protocol,
                symmetric_noise_p,
                ..
            } => {
                let mut probs = self.probs;
                if let Some(p) = symmetric_noise_p {
                    probs.p_parity = symmetric_accept_probability(p)?;
                }
                probs.resolve_for(&protocol)
            }
            ArchitectureKind::TypeII | ArchitectureKind::TypeIII { .. } => {
                PipelineProbabilities::link_only(self.probs.p_link)
            }
        }
    }

    /// GHZ states measured per stabilizer type per round (`d²` or `d² − 1`).
    pub fn ghz_states_per_type(&self) -> u64 {
        let d2 = self.d.squared();
        match self.kind {
            ArchitectureKind::TypeI {
                independent_generators_only: true,
                ..
            } => d2 - 1,
            _ => d2,
        }
    }

    /// Raw link successes one trial of the architecture's operation consumes
    /// (Types II and III).
    pub fn link_pairs_needed(&self) -> Option<u64> {
        match self.kind {
            ArchitectureKind::TypeI { .. } => None,
            ArchitectureKind::TypeII => Some(seam_qubit_count(self.d)),
            ArchitectureKind::TypeIII { mode } => Some(match mode {
                Type3Mode::TransversalCnot | Type3Mode::Teleportation => self.d.squared(),
                Type3Mode::LatticeSurgery => u64::from(self.d.get()) * seam_qubit_count(self.d),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub expected_attempts: f64,
    /// GHZ states (Type I) or Bell pairs (Types II/III) consumed when every attempt succeeds.
    pub ghz_states_or_bell_pairs_needed: u64,
    pub formula_tag: String,
    pub wall_clock_seconds: Option<f64>,
}

impl EstimateResult {
    fn new(expected_attempts: f64, needed: u64, tag: &str, attempt_rate: Option<f64>) -> Self {
        Self {
            expected_attempts,
            ghz_states_or_bell_pairs_needed: needed,
            formula_tag: tag.to_owned(),
            wall_clock_seconds: attempt_rate.map(|rate| expected_attempts / rate),
        }
    }
}

pub const TAG_TYPE1_PER_TYPE: &str = "N_type = d^2 * R(n)";
pub const TAG_TYPE1_PER_TYPE_INDEPENDENT: &str = "N_type = (d^2 - 1) * R(n)";
pub const TAG_TYPE1_PER_ROUND: &str = "N_round = 4 n d^2 / (p_link p_distill p_parity)";
pub const TAG_TYPE1_PER_ROUND_INDEPENDENT: &str =
    "N_round = 4 n (d^2 - 1) / (p_link p_distill p_parity)";
pub const TAG_TYPE2: &str = "(2d - 1) / p_link";
pub const TAG_TYPE3_TRANSVERSAL: &str = "d^2 / p_link";
pub const TAG_TYPE3_TELEPORTATION: &str = "d^2 / p_link (teleportation)";
pub const TAG_TYPE3_LATTICE_SURGERY: &str =
    "d (2d - 1) / p_link (modeling choice: seam cost over d merge rounds)";

fn check_attempt_rate(rate: Option<f64>) -> Result<()> {
    match rate {
        Some(r) if !(r > 0.0 && r.is_finite()) => Err(Error::OutOfRange {
            field: "attempt_rate",
            value: r,
            range: "(0, inf)",
        }),
        _ => Ok(()),
    }
}

fn type1_parts(spec: &ArchitectureSpec) -> Result<(GhzProtocol, bool, f64)> {
    let ArchitectureKind::TypeI {
        protocol,
        independent_generators_only,
        ..
    } = spec.kind
    else {
        return Err(Error::WrongArchitecture {
            expected: "type1",
            found: spec.kind.label(),
        });
    };
    check_attempt_rate(spec.attempt_rate)?;
    let r = expected_attempts_per_ghz(&protocol, &spec.resolved_probabilities()?)?;
    Ok((protocol, independent_generators_only, r))
}

/// Expected attempts for one round of a single stabilizer type (X or Z).
pub fn type1_attempts_per_type_round(spec: &ArchitectureSpec) -> Result<EstimateResult> {
    let (_, independent, r) = type1_parts(spec)?;
    let ghz = spec.ghz_states_per_type();
    let tag = if independent {
        TAG_TYPE1_PER_TYPE_INDEPENDENT
    } else {
        TAG_TYPE1_PER_TYPE
    };
    Ok(EstimateResult::new(
        ghz as f64 * r,
        ghz,
        tag,
        spec.attempt_rate,
    ))
}

/// Expected attempts for a full round covering both stabilizer types.
pub fn type1_attempts_per_round(spec: &ArchitectureSpec) -> Result<EstimateResult> {
    let (_, independent, r) = type1_parts(spec)?;
    let ghz = 2 * spec.ghz_states_per_type();
    let tag = if independent {
        TAG_TYPE1_PER_ROUND_INDEPENDENT
    } else {
        TAG_TYPE1_PER_ROUND
    };
    Ok(EstimateResult::new(
        ghz as f64 * r,
        ghz,
        tag,
        spec.attempt_rate,
    ))
}

/// Seam cost between two planar patches for one syndrome round.
pub fn type2_attempts_per_type_round(d: CodeDistance, p_link: f64) -> Result<EstimateResult> {
    let p_link = check_positive_probability("p_link", p_link)?;
    let pairs = seam_qubit_count(d);
    Ok(EstimateResult::new(
        pairs as f64 / p_link,
        pairs,
        TAG_TYPE2,
        None,
    ))
}

/// Cost of one nonlocal logical operation between two blocks.
///
/// Lattice surgery charges the Type II seam once per merge round, for `d`
/// rounds.
pub fn type3_attempts(spec: &ArchitectureSpec) -> Result<EstimateResult> {
    let ArchitectureKind::TypeIII { mode } = spec.kind else {
        return Err(Error::WrongArchitecture {
            expected: "type3",
            found: spec.kind.label(),
        });
    };
    check_attempt_rate(spec.attempt_rate)?;
    let p_link = check_positive_probability("p_link", spec.probs.p_link)?;
    let pairs = spec.link_pairs_needed().expect("type3 has a pair count");
    let tag = match mode {
        Type3Mode::TransversalCnot => TAG_TYPE3_TRANSVERSAL,
        Type3Mode::Teleportation => TAG_TYPE3_TELEPORTATION,
        Type3Mode::LatticeSurgery => TAG_TYPE3_LATTICE_SURGERY,
    };
    Ok(EstimateResult::new(
        pairs as f64 / p_link,
        pairs,
        tag,
        spec.attempt_rate,
    ))
}

/// Which Type I quantity an estimate reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Type1Quantity {
    /// Both stabilizer types, `N_round`.
    #[default]
    PerRound,
    /// One stabilizer type, `N_type`.
    PerType,
}

/// Dispatches to the estimator matching `spec.kind`.
pub fn estimate(spec: &ArchitectureSpec, quantity: Type1Quantity) -> Result<EstimateResult> {
    match spec.kind {
        ArchitectureKind::TypeI { .. } => match quantity {
            Type1Quantity::PerRound => type1_attempts_per_round(spec),
            Type1Quantity::PerType => type1_attempts_per_type_round(spec),
        },
        ArchitectureKind::TypeII => {
            check_attempt_rate(spec.attempt_rate)?;
            let mut out = type2_attempts_per_type_round(spec.d, spec.probs.p_link)?;
            out.wall_clock_seconds = spec.attempt_rate.map(|r| out.expected_attempts / r);
            Ok(out)
        }
        ArchitectureKind::TypeIII { .. } => type3_attempts(spec),
    }
}
