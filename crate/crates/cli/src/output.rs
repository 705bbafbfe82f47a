//! CSV and JSON-lines rows.

use std::io::Write;

use serde::Serialize;

use dqc_core::{ArchitectureKind, ArchitectureSpec, AttemptStatistics, EstimateResult};

use crate::error::{CliError, Result};

/// One output record. Missing simulation or noise values serialize as empty
/// CSV cells and JSON nulls; floats use the shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub kind: &'static str,
    pub protocol: Option<String>,
    pub d: u32,
    pub p: Option<f64>,
    pub p_link: f64,
    pub p_distill: Option<f64>,
    pub p_parity: Option<f64>,
    pub analytic_attempts: f64,
    pub simulated_mean: Option<f64>,
    pub simulated_stderr: Option<f64>,
}

pub const CSV_HEADER: [&str; 10] = [
    "kind",
    "protocol",
    "d",
    "p",
    "p_link",
    "p_distill",
    "p_parity",
    "analytic_attempts",
    "simulated_mean",
    "simulated_stderr",
];

impl CsvRow {
    /// Builds a row from the spec, its resolved probabilities and the estimate.
    pub fn new(spec: &ArchitectureSpec, estimate: &EstimateResult) -> Result<Self> {
        let resolved = spec.resolved_probabilities()?;
        let (protocol, p, p_distill, p_parity) = match spec.kind {
            ArchitectureKind::TypeI {
                protocol,
                symmetric_noise_p,
                ..
            } => (
                Some(protocol.name().as_str().to_owned()),
                symmetric_noise_p,
                Some(resolved.p_distill),
                Some(resolved.p_parity),
            ),
            ArchitectureKind::TypeII => (None, None, None, None),
            ArchitectureKind::TypeIII { mode } => {
                (Some(mode.as_str().to_owned()), None, None, None)
            }
        };
        Ok(Self {
            kind: spec.kind.label(),
            protocol,
            d: spec.d.get(),
            p,
            p_link: resolved.p_link,
            p_distill,
            p_parity,
            analytic_attempts: estimate.expected_attempts,
            simulated_mean: None,
            simulated_stderr: None,
        })
    }

    pub fn with_simulation(mut self, stats: &AttemptStatistics) -> Self {
        self.simulated_mean = Some(stats.mean);
        self.simulated_stderr = Some(stats.std_error);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Writes rows with a header (CSV) or one JSON object per line.
pub fn write_rows<W: Write>(rows: &[CsvRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(out);
            writer
                .write_record(CSV_HEADER)
                .map_err(|e| CliError::Output(e.to_string()))?;
            for row in rows {
                writer
                    .serialize(row)
                    .map_err(|e| CliError::Output(e.to_string()))?;
            }
            writer.flush().map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Json => {
            let mut out = out;
            for row in rows {
                serde_json::to_writer(&mut out, row)
                    .map_err(|e| CliError::Output(e.to_string()))?;
                writeln!(out).map_err(|e| CliError::Output(e.to_string()))?;
            }
            out.flush().map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

pub fn render_rows(rows: &[CsvRow], format: Format) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, format, &mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Output(e.to_string()))
}
