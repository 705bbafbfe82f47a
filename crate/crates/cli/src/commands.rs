use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use dqc_core::{
    estimate, simulate_architecture_round, simulate_type1_per_type, ArchitectureKind,
    ArchitectureSpec, AttemptStatistics, SimulationConfig, Type1Quantity,
};

use crate::config::{self, RawConfig};
use crate::error::{CliError, Result};
use crate::output::{write_rows, CsvRow, Format};
use crate::sweep::{Recipe, SweepSpec};
use crate::validate::{self, Formulas, McCase};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "dqc",
    version,
    about = "Entanglement cost of distributed surface/toric-code architectures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML config with [architecture], [probabilities], [sweep] and [simulation] sections.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Base RNG seed for Monte Carlo runs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo trials per point.
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Write rows here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,

    /// Override a config key, e.g. `--set d=5` or `--set probabilities.p_link=0.3`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads for simulation (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Report Type I cost per stabilizer type (N_type) instead of per full round.
    #[arg(long, global = true)]
    pub per_type: bool,

    /// Save the merged configuration as TOML.
    #[arg(long, global = true, value_name = "PATH")]
    pub save_config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Closed-form estimate for a single configuration.
    Estimate,
    /// Closed-form values over a parameter sweep.
    Sweep {
        #[arg(long, value_enum)]
        recipe: Option<Recipe>,
    },
    /// Monte Carlo estimates next to the closed form, for one point or a sweep.
    Simulate {
        #[arg(long, value_enum)]
        recipe: Option<Recipe>,
    },
    /// Oracle and Monte Carlo self-checks; exits 1 if any check fails.
    Validate,
}

impl Cli {
    fn quantity(&self) -> Type1Quantity {
        if self.per_type {
            Type1Quantity::PerType
        } else {
            Type1Quantity::PerRound
        }
    }

    fn recipe(&self) -> Option<Recipe> {
        match self.command {
            Command::Sweep { recipe } | Command::Simulate { recipe } => recipe,
            _ => None,
        }
    }

    pub fn load_config(&self) -> Result<RawConfig> {
        let mut raw = config::load(
            self.recipe().map(Recipe::defaults),
            self.config.as_deref(),
            &self.overrides,
        )?;
        raw.apply_simulation_flags(self.trials, self.seed)?;
        Ok(raw)
    }
}

/// Runs one CLI invocation, writing human-readable output to `stdout`.
pub fn run(cli: &Cli, stdout: &mut (dyn Write + Send)) -> Result<()> {
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| dispatch(cli, stdout)),
        None => dispatch(cli, stdout),
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let raw = cli.load_config()?;
    if let Some(path) = &cli.save_config {
        let text = raw.to_toml()?;
        write_file(path, cli.force, |w| {
            w.write_all(text.as_bytes())
                .map_err(|e| CliError::Output(e.to_string()))
        })?;
    }
    match cli.command {
        Command::Estimate => cmd_estimate(cli, &raw, stdout),
        Command::Sweep { .. } => cmd_sweep(cli, &raw, stdout),
        Command::Simulate { .. } => cmd_simulate(cli, &raw, stdout),
        Command::Validate => cmd_validate(cli, &raw, &Formulas::default(), stdout),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Output(e.to_string())
}

/// Opens `path` for writing, refusing to replace an existing file unless `force`.
fn write_file<F>(path: &Path, force: bool, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let mut options = OpenOptions::new();
    options.write(true);
    if force {
        options.create(true).truncate(true);
    } else {
        options.create_new(true);
    }
    let file = options.open(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::AlreadyExists {
            CliError::Usage(format!(
                "refusing to overwrite {} (pass --force)",
                path.display()
            ))
        } else {
            CliError::Io {
                path: path.to_owned(),
                source,
            }
        }
    })?;
    let mut writer = std::io::BufWriter::new(file);
    body(&mut writer)?;
    writer.flush().map_err(io_err)
}

fn emit_rows(cli: &Cli, rows: &[CsvRow], stdout: &mut dyn Write) -> Result<()> {
    match &cli.out {
        Some(path) => write_file(path, cli.force, |w| write_rows(rows, cli.format, w)),
        None => write_rows(rows, cli.format, stdout),
    }
}

pub fn cmd_estimate(cli: &Cli, raw: &RawConfig, stdout: &mut dyn Write) -> Result<()> {
    let spec = raw.architecture_spec()?;
    let result = estimate(&spec, cli.quantity())?;
    let row = CsvRow::new(&spec, &result)?;

    let mut lines = vec![format!("kind: {}", row.kind)];
    if let Some(protocol) = spec.protocol() {
        lines.push(format!("protocol: {}", protocol.name()));
        lines.push(format!(
            "bell_pairs_per_copy: {}",
            protocol.bell_pairs_per_copy()
        ));
        lines.push(format!(
            "uses_distillation: {}",
            protocol.uses_distillation()
        ));
    }
    if let Some(ref p) = row.protocol {
        if spec.protocol().is_none() {
            lines.push(format!("type3_mode: {p}"));
        }
    }
    lines.push(format!("d: {}", row.d));
    if let ArchitectureKind::TypeI {
        symmetric_noise_p: Some(p),
        ..
    } = spec.kind
    {
        lines.push(format!("symmetric_noise_p: {p}"));
    }
    lines.push(format!("p_link: {}", row.p_link));
    if let Some(p) = row.p_distill {
        lines.push(format!("p_distill: {p}"));
    }
    if let Some(p) = row.p_parity {
        lines.push(format!("p_parity: {p}"));
    }
    lines.push(format!("formula: {}", result.formula_tag));
    lines.push(format!("expected_attempts: {}", result.expected_attempts));
    lines.push(format!(
        "ghz_states_or_bell_pairs_needed: {}",
        result.ghz_states_or_bell_pairs_needed
    ));
    if let Some(t) = result.wall_clock_seconds {
        lines.push(format!("wall_clock_seconds: {t}"));
    }
    for line in lines {
        writeln!(stdout, "{line}").map_err(io_err)?;
    }
    if let Some(path) = &cli.out {
        write_file(path, cli.force, |w| write_rows(&[row], cli.format, w))?;
    }
    Ok(())
}

/// Closed-form rows for every point of the sweep.
pub fn sweep_rows(raw: &RawConfig, quantity: Type1Quantity) -> Result<Vec<CsvRow>> {
    let sweep = SweepSpec::from_raw(raw)?;
    sweep
        .points(raw)?
        .iter()
        .map(|point| {
            let result = estimate(&point.spec, quantity)?;
            CsvRow::new(&point.spec, &result)
        })
        .collect()
}

pub fn cmd_sweep(cli: &Cli, raw: &RawConfig, stdout: &mut dyn Write) -> Result<()> {
    let rows = sweep_rows(raw, cli.quantity())?;
    emit_rows(cli, &rows, stdout)
}

fn simulate_point(
    spec: &ArchitectureSpec,
    quantity: Type1Quantity,
    config: &SimulationConfig,
) -> Result<AttemptStatistics> {
    Ok(match (spec.kind, quantity) {
        (ArchitectureKind::TypeI { .. }, Type1Quantity::PerType) => {
            simulate_type1_per_type(spec, config)?
        }
        _ => simulate_architecture_round(spec, config)?,
    })
}

/// Rows with both closed-form and simulated columns. Point `i` uses seed `seed + i`.
pub fn simulate_rows(raw: &RawConfig, quantity: Type1Quantity) -> Result<Vec<CsvRow>> {
    let settings = raw.simulation_settings()?;
    let specs: Vec<ArchitectureSpec> = if raw.sweep.is_some() {
        SweepSpec::from_raw(raw)?
            .points(raw)?
            .into_iter()
            .map(|p| p.spec)
            .collect()
    } else {
        vec![raw.architecture_spec()?]
    };
    specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let config = SimulationConfig::with_confidence(
                settings.trials,
                settings.seed.wrapping_add(i as u64),
                settings.confidence_level,
            )?;
            let stats = simulate_point(spec, quantity, &config)?;
            let result = estimate(spec, quantity)?;
            Ok(CsvRow::new(spec, &result)?.with_simulation(&stats))
        })
        .collect()
}

pub fn cmd_simulate(cli: &Cli, raw: &RawConfig, stdout: &mut dyn Write) -> Result<()> {
    let rows = simulate_rows(raw, cli.quantity())?;
    emit_rows(cli, &rows, stdout)
}

/// Runs every self-check and prints one line per check.
pub fn cmd_validate(
    cli: &Cli,
    raw: &RawConfig,
    formulas: &Formulas,
    stdout: &mut dyn Write,
) -> Result<()> {
    let settings = raw.simulation_settings()?;
    // The configured architecture, when there is one, is checked too.
    let extra = if raw.architecture.kind.is_some() {
        Some(McCase::Architecture {
            spec: raw.architecture_spec()?,
            quantity: cli.quantity(),
        })
    } else {
        None
    };
    let results = validate::run_all(formulas, settings.trials, settings.seed, extra)?;
    for check in &results {
        writeln!(stdout, "{check}").map_err(io_err)?;
    }
    let failed = results.iter().filter(|c| !c.passed).count();
    writeln!(stdout, "{} checks, {} failed", results.len(), failed).map_err(io_err)?;
    if failed > 0 {
        return Err(CliError::ChecksFailed {
            failed,
            total: results.len(),
        });
    }
    Ok(())
}
