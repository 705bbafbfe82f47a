//! Entanglement overhead of distributed surface- and toric-code architectures.
//!
//! Closed-form expected link-attempt counts ([`estimate`]), the GHZ factory
//! cost model they build on ([`pipeline`]), the parity-projection acceptance
//! under depolarizing noise together with an exhaustive oracle ([`parity`]),
//! code counting ([`geometry`]) and seeded Monte Carlo checks
//! ([`montecarlo`]).

pub mod error;
pub mod estimate;
pub mod geometry;
pub mod montecarlo;
pub mod parity;
pub mod pipeline;

pub use error::{Error, Result};
pub use estimate::{
    estimate, type1_attempts_per_round, type1_attempts_per_type_round,
    type2_attempts_per_type_round, type3_attempts, ArchitectureKind, ArchitectureSpec,
    EstimateResult, Type1Quantity, Type3Mode,
};
pub use geometry::{planar_counts, seam_qubit_count, toric_counts, CodeCounts, CodeDistance};
pub use montecarlo::{
    sample_parity_projection, simulate_architecture_round, simulate_ghz_pipeline,
    simulate_single_link, simulate_type1_per_type, AttemptStatistics, SimulationConfig,
};
pub use parity::{
    cnot_conjugate, exhaustive_parity_accept, parity_accept_probability, parity_moment,
    series_approx_accept, symmetric_accept_probability, teleported_cnot_error_map,
    DepolarizingRates, ParityOutcome, Pauli,
};
pub use pipeline::{
    bell_pairs_per_accepted_ghz, effective_link_probability, epl_distill_success,
    expected_attempts_per_ghz, GhzProtocol, PipelineProbabilities, ProtocolName,
};
