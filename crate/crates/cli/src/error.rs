use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration value is missing or invalid; `field` names it.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("output error: {0}")]
    Output(String),

    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn missing(field: &str, section: &str) -> Self {
        CliError::config(
            field,
            format!("missing required key `{field}` in [{section}]"),
        )
    }

    /// 1 for failed checks, 2 for usage and configuration problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            _ => 2,
        }
    }
}

impl From<dqc_core::Error> for CliError {
    fn from(err: dqc_core::Error) -> Self {
        use dqc_core::Error as E;
        let field = match &err {
            E::ZeroDistance | E::EvenPlanarDistance(_) => "d".to_owned(),
            E::ZeroProbability { field } | E::OutOfRange { field, .. } => (*field).to_owned(),
            E::EmptyProtocol | E::OddDistilledProtocol(_) => "bell_pairs_per_copy".to_owned(),
            E::ZeroMultiplex => "multiplex_M".to_owned(),
            E::WrongArchitecture { .. } => "kind".to_owned(),
            E::ZeroTrials => "trials".to_owned(),
        };
        CliError::Config {
            field,
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
