//! Expected link-generation cost of one accepted GHZ state.
//!
//! The pipeline is: heralded link generation, optional 2→1 distillation,
//! fusion into two GHZ copies, then a parity projection of one copy onto the
//! other. Every stage is an independent Bernoulli trial retried until it
//! succeeds, and successful intermediates wait in memory without decay.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive_probability, check_unit_interval, Error, Result};

/// Named GHZ preparation recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolName {
    Plain,
    Basic,
    Medium,
    Refined,
    Custom,
}

impl ProtocolName {
    pub const NAMED: [ProtocolName; 4] = [
        ProtocolName::Plain,
        ProtocolName::Basic,
        ProtocolName::Medium,
        ProtocolName::Refined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolName::Plain => "plain",
            ProtocolName::Basic => "basic",
            ProtocolName::Medium => "medium",
            ProtocolName::Refined => "refined",
            ProtocolName::Custom => "custom",
        }
    }
}

impl std::fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProtocolName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(ProtocolName::Plain),
            "basic" => Ok(ProtocolName::Basic),
            "medium" => Ok(ProtocolName::Medium),
            "refined" => Ok(ProtocolName::Refined),
            "custom" => Ok(ProtocolName::Custom),
            other => Err(format!(
                "unknown protocol {other:?} (expected plain, basic, medium, refined or custom)"
            )),
        }
    }
}

/// A GHZ recipe: how many Bell pairs one GHZ copy consumes (`n`) and whether
/// each pair used in fusion comes out of a 2→1 distillation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GhzProtocol {
    name: ProtocolName,
    bell_pairs_per_copy: u32,
    uses_distillation: bool,
}

impl GhzProtocol {
    pub const PLAIN: GhzProtocol = GhzProtocol::named_unchecked(ProtocolName::Plain, 3, false);
    pub const BASIC: GhzProtocol = GhzProtocol::named_unchecked(ProtocolName::Basic, 8, true);
    pub const MEDIUM: GhzProtocol = GhzProtocol::named_unchecked(ProtocolName::Medium, 16, true);
    pub const REFINED: GhzProtocol = GhzProtocol::named_unchecked(ProtocolName::Refined, 40, true);

    const fn named_unchecked(name: ProtocolName, n: u32, distill: bool) -> Self {
        Self {
            name,
            bell_pairs_per_copy: n,
            uses_distillation: distill,
        }
    }

    /// Returns the fixed recipe for a named protocol, `None` for `Custom`.
    pub fn named(name: ProtocolName) -> Option<Self> {
        match name {
            ProtocolName::Plain => Some(Self::PLAIN),
            ProtocolName::Basic => Some(Self::BASIC),
            ProtocolName::Medium => Some(Self::MEDIUM),
            ProtocolName::Refined => Some(Self::REFINED),
            ProtocolName::Custom => None,
        }
    }

    /// A user-defined recipe.
    ///
    /// With distillation, the `n` raw pairs of a copy are consumed two at a
    /// time to make `n/2` distilled pairs, so `n` must be even.
    pub fn custom(bell_pairs_per_copy: u32, uses_distillation: bool) -> Result<Self> {
        if bell_pairs_per_copy == 0 {
            return Err(Error::EmptyProtocol);
        }
        if uses_distillation && bell_pairs_per_copy % 2 == 1 {
            return Err(Error::OddDistilledProtocol(bell_pairs_per_copy));
        }
        Ok(Self {
            name: ProtocolName::Custom,
            bell_pairs_per_copy,
            uses_distillation,
        })
    }

    pub fn name(&self) -> ProtocolName {
        self.name
    }

    /// Bell pairs per GHZ copy, `n`.
    pub fn bell_pairs_per_copy(&self) -> u32 {
        self.bell_pairs_per_copy
    }

    pub fn uses_distillation(&self) -> bool {
        self.uses_distillation
    }

    /// Distilled pairs fused into one copy (`n/2`), or `None` without distillation.
    pub fn distilled_pairs_per_copy(&self) -> Option<u32> {
        self.uses_distillation
            .then_some(self.bell_pairs_per_copy / 2)
    }
}

/// Per-stage success probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineProbabilities {
    pub p_link: f64,
    pub p_distill: f64,
    pub p_parity: f64,
}

impl PipelineProbabilities {
    pub fn new(p_link: f64, p_distill: f64, p_parity: f64) -> Result<Self> {
        let probs = Self {
            p_link,
            p_distill,
            p_parity,
        };
        probs.validate()?;
        Ok(probs)
    }

    /// Link-only probabilities, for architectures without distillation or parity checks.
    pub fn link_only(p_link: f64) -> Result<Self> {
        Self::new(p_link, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive_probability("p_link", self.p_link)?;
        check_positive_probability("p_distill", self.p_distill)?;
        check_positive_probability("p_parity", self.p_parity)?;
        Ok(())
    }

    /// The distillation success probability the protocol actually sees.
    pub fn effective_distill(&self, protocol: &GhzProtocol) -> f64 {
        if protocol.uses_distillation() {
            self.p_distill
        } else {
            1.0
        }
    }

    /// Validates and coerces `p_distill` to 1 for protocols without distillation.
    pub fn resolve_for(&self, protocol: &GhzProtocol) -> Result<Self> {
        let resolved = Self {
            p_distill: self.effective_distill(protocol),
            ..*self
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

/// Raw Bell pairs consumed by one final GHZ when every stage succeeds first time (`2n`).
pub fn bell_pairs_per_accepted_ghz(protocol: &GhzProtocol) -> u64 {
    2 * u64::from(protocol.bell_pairs_per_copy())
}

/// Expected link attempts per accepted GHZ, `R(n) = 2n / (p_link · p_distill · p_parity)`.
///
/// A distilled pair costs `2 / (p_link · p_distill)` attempts; a copy holds
/// `n/2` of them, two copies are made, and the parity projection repeats
/// until acceptance. Without distillation `p_distill` is taken as 1.
pub fn expected_attempts_per_ghz(
    protocol: &GhzProtocol,
    probs: &PipelineProbabilities,
) -> Result<f64> {
    let probs = probs.resolve_for(protocol)?;
    let numerator = bell_pairs_per_accepted_ghz(protocol) as f64;
    Ok(numerator / (probs.p_link * probs.p_distill * probs.p_parity))
}

/// EPL distillation succeeds with probability `p_R² / 2`.
pub fn epl_distill_success(p_r: f64) -> Result<f64> {
    let p_r = check_unit_interval("p_R", p_r)?;
    Ok(0.5 * p_r * p_r)
}

/// Success probability of `m` parallel link attempts in one slot, `1 − (1 − p)^M`.
pub fn effective_link_probability(p_link: f64, m: u32) -> Result<f64> {
    let p_link = check_unit_interval("p_link", p_link)?;
    if m == 0 {
        return Err(Error::ZeroMultiplex);
    }
    // ln_1p keeps precision for small p_link; p_link = 1 gives -inf and a result of exactly 1.
    let log_miss = f64::ln_1p(-p_link);
    Ok((-f64::exp_m1(f64::from(m) * log_miss)).clamp(0.0, 1.0))
}
