//! Self-checks: exhaustive oracle against the closed-form acceptance, and
//! Monte Carlo against every closed-form cost.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dqc_core::parity::MAX_DEPOLARIZING_RATE;
use dqc_core::{
    estimate, exhaustive_parity_accept, expected_attempts_per_ghz, parity_accept_probability,
    simulate_architecture_round, simulate_ghz_pipeline, simulate_type1_per_type, ArchitectureKind,
    ArchitectureSpec, CodeDistance, DepolarizingRates, GhzProtocol, PipelineProbabilities,
    SimulationConfig, Type1Quantity, Type3Mode,
};

use crate::error::Result;

/// Largest allowed |oracle − formula| for the acceptance probability.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// Allowed Monte Carlo deviation, in standard errors.
pub const MC_TOLERANCE_STD_ERRORS: f64 = 4.0;

pub const SYMMETRIC_GRID: [f64; 8] = [0.0, 0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75];

pub const RANDOM_RATE_VECTORS: usize = 50;

/// Seed of the asymmetric rate vectors; fixed so the grid is the same on every run.
pub const RATE_GRID_SEED: u64 = 0x005e_ed0f_0a7e;

/// The closed forms under test. Swapping one out simulates a broken build.
#[derive(Clone, Copy)]
pub struct Formulas {
    pub parity_accept: fn(&DepolarizingRates) -> f64,
    pub ghz_attempts: fn(&GhzProtocol, &PipelineProbabilities) -> dqc_core::Result<f64>,
    pub architecture_attempts: fn(&ArchitectureSpec, Type1Quantity) -> dqc_core::Result<f64>,
}

impl Default for Formulas {
    fn default() -> Self {
        Self {
            parity_accept: |rates| parity_accept_probability(rates).accept_probability,
            ghz_attempts: expected_attempts_per_ghz,
            architecture_attempts: |spec, q| estimate(spec, q).map(|e| e.expected_attempts),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub expected: f64,
    pub observed: f64,
    /// Absolute deviation, or deviation in standard errors for stochastic checks.
    pub deviation: f64,
    pub tolerance: f64,
    pub unit: &'static str,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: expected={} observed={} deviation={:e}{} tolerance={}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.expected,
            self.observed,
            self.deviation,
            self.unit,
            self.tolerance,
            self.unit,
        )
    }
}

/// Symmetric grid followed by seeded random asymmetric rate vectors.
pub fn oracle_rate_grid() -> Vec<(String, DepolarizingRates)> {
    let mut grid: Vec<(String, DepolarizingRates)> = SYMMETRIC_GRID
        .iter()
        .map(|&p| {
            (
                format!("symmetric p={p}"),
                DepolarizingRates::symmetric(p).expect("grid inside physical range"),
            )
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(RATE_GRID_SEED);
    for i in 0..RANDOM_RATE_VECTORS {
        let mut flat = [0.0; dqc_core::parity::NOISY_QUBITS];
        for r in flat.iter_mut() {
            *r = rng.random_range(0.0..=MAX_DEPOLARIZING_RATE);
        }
        grid.push((
            format!("random rates #{i}"),
            DepolarizingRates::from_flat(flat).expect("sampled inside physical range"),
        ));
    }
    grid
}

pub fn oracle_checks(formulas: &Formulas) -> Vec<CheckResult> {
    oracle_rate_grid()
        .into_iter()
        .map(|(label, rates)| {
            let oracle = exhaustive_parity_accept(&rates);
            let formula = (formulas.parity_accept)(&rates);
            let deviation = (oracle - formula).abs();
            CheckResult {
                name: format!("parity oracle vs formula, {label}"),
                passed: deviation <= ORACLE_TOLERANCE,
                expected: oracle,
                observed: formula,
                deviation,
                tolerance: ORACLE_TOLERANCE,
                unit: "",
            }
        })
        .collect()
}

/// One stochastic cell of the validation matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum McCase {
    Ghz {
        protocol: GhzProtocol,
        probs: PipelineProbabilities,
        noise_p: f64,
    },
    Architecture {
        spec: ArchitectureSpec,
        quantity: Type1Quantity,
    },
}

impl McCase {
    pub fn label(&self) -> String {
        match self {
            McCase::Ghz {
                protocol,
                probs,
                noise_p,
            } => format!(
                "GHZ pipeline {} p_link={} p_distill={} p={}",
                protocol.name(),
                probs.p_link,
                probs.p_distill,
                noise_p
            ),
            McCase::Architecture { spec, quantity } => {
                let extra = match spec.kind {
                    ArchitectureKind::TypeI { protocol, .. } => {
                        format!(" {} {:?}", protocol.name(), quantity)
                    }
                    ArchitectureKind::TypeII => String::new(),
                    ArchitectureKind::TypeIII { mode } => format!(" {}", mode.as_str()),
                };
                format!(
                    "{}{} d={} p_link={}",
                    spec.kind.label(),
                    extra,
                    spec.d,
                    spec.probs.p_link
                )
            }
        }
    }
}

/// Distillation success used throughout the GHZ matrix.
pub const MATRIX_P_DISTILL: f64 = 0.5;

/// {4 protocols} × {p_link 0.3, 0.5} × {p 0, 0.01}, Type II d ∈ {3, 11} ×
/// p_link ∈ {0.1, 0.5}, Type III transversal d ∈ {3, 7} × p_link ∈ {0.25, 0.5}.
pub fn mc_matrix() -> Vec<McCase> {
    let mut cases = Vec::new();
    for protocol in [
        GhzProtocol::PLAIN,
        GhzProtocol::BASIC,
        GhzProtocol::MEDIUM,
        GhzProtocol::REFINED,
    ] {
        for p_link in [0.3, 0.5] {
            for noise_p in [0.0, 0.01] {
                let p_parity = parity_accept_probability(
                    &DepolarizingRates::symmetric(noise_p).expect("valid noise"),
                )
                .accept_probability;
                let probs = PipelineProbabilities::new(p_link, MATRIX_P_DISTILL, p_parity)
                    .expect("valid probabilities");
                cases.push(McCase::Ghz {
                    protocol,
                    probs,
                    noise_p,
                });
            }
        }
    }
    for d in [3, 11] {
        for p_link in [0.1, 0.5] {
            cases.push(McCase::Architecture {
                spec: ArchitectureSpec::type2(CodeDistance::new(d).unwrap(), p_link).unwrap(),
                quantity: Type1Quantity::PerRound,
            });
        }
    }
    for d in [3, 7] {
        for p_link in [0.25, 0.5] {
            cases.push(McCase::Architecture {
                spec: ArchitectureSpec::type3(
                    CodeDistance::new(d).unwrap(),
                    Type3Mode::TransversalCnot,
                    p_link,
                )
                .unwrap(),
                quantity: Type1Quantity::PerRound,
            });
        }
    }
    cases
}

/// Simulates one case and compares with the closed form.
pub fn run_mc_case(
    case: &McCase,
    formulas: &Formulas,
    config: &SimulationConfig,
) -> Result<CheckResult> {
    let (analytic, stats) = match case {
        McCase::Ghz {
            protocol, probs, ..
        } => (
            (formulas.ghz_attempts)(protocol, probs)?,
            simulate_ghz_pipeline(protocol, probs, config)?,
        ),
        McCase::Architecture { spec, quantity } => {
            let stats = match (spec.kind, quantity) {
                (ArchitectureKind::TypeI { .. }, Type1Quantity::PerType) => {
                    simulate_type1_per_type(spec, config)?
                }
                _ => simulate_architecture_round(spec, config)?,
            };
            ((formulas.architecture_attempts)(spec, *quantity)?, stats)
        }
    };
    let z = stats.z_score(analytic);
    Ok(CheckResult {
        name: format!("monte carlo vs analytic, {}", case.label()),
        passed: z <= MC_TOLERANCE_STD_ERRORS,
        expected: analytic,
        observed: stats.mean,
        deviation: z,
        tolerance: MC_TOLERANCE_STD_ERRORS,
        unit: " se",
    })
}

/// Runs the full suite. Case `i` of the matrix uses seed `seed + i`; the
/// optional extra point uses `seed + matrix length`.
pub fn run_all(
    formulas: &Formulas,
    trials: u64,
    seed: u64,
    extra: Option<McCase>,
) -> Result<Vec<CheckResult>> {
    let mut results = oracle_checks(formulas);
    let cases = mc_matrix().into_iter().chain(extra);
    for (i, case) in cases.enumerate() {
        let config = SimulationConfig::new(trials, seed.wrapping_add(i as u64))?;
        results.push(run_mc_case(&case, formulas, &config)?);
    }
    Ok(results)
}
