use thiserror::Error;

/// Errors raised by the estimators and the simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("d: code distance must be at least 1")]
    ZeroDistance,

    #[error("d: rotated planar layout requires odd distance, got d = {0}")]
    EvenPlanarDistance(u32),

    /// A success probability of exactly zero makes every expectation infinite.
    #[error("{field} is zero, expected attempts would be infinite")]
    ZeroProbability { field: &'static str },

    #[error("{field} = {value} is outside {range}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("bell_pairs_per_copy: custom protocol needs at least one Bell pair per copy")]
    EmptyProtocol,

    #[error("bell_pairs_per_copy: custom protocol with 2->1 distillation needs an even count, got n = {0}")]
    OddDistilledProtocol(u32),

    #[error("multiplex_M: multiplexing factor must be at least 1")]
    ZeroMultiplex,

    #[error("estimator expects a {expected} architecture, got {found}")]
    WrongArchitecture {
        expected: &'static str,
        found: &'static str,
    },

    #[error("trials: simulation needs at least one trial")]
    ZeroTrials,
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `value` lies in `(0, 1]`, reporting zero separately.
pub(crate) fn check_positive_probability(field: &'static str, value: f64) -> Result<f64> {
    if value == 0.0 {
        return Err(Error::ZeroProbability { field });
    }
    if !(value > 0.0 && value <= 1.0) {
        return Err(Error::OutOfRange {
            field,
            value,
            range: "(0, 1]",
        });
    }
    Ok(value)
}

pub(crate) fn check_unit_interval(field: &'static str, value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            field,
            value,
            range: "[0, 1]",
        });
    }
    Ok(value)
}
