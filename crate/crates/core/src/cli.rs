//! `fluxpulse` command-line front end.
//!
//! Every subcommand reads a config file, runs one experiment, writes its CSV
//! files plus `resolved_config.ini` to the output directory, and prints a
//! one-line summary.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, ExperimentConfig};
use crate::envelope::{fit_decoherence, OscillationSeries};
use crate::error::Error;
use crate::grid::Grid;
use crate::model::tau_to_picoseconds;
use crate::observables::density_profile;
use crate::output::{self, write_file};
use crate::protocols::{run_single_pulse, run_sweep, run_two_pulse, snapshot_run};
use crate::solver::{relax_ground, RelaxOptions};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_FIT: i32 = 4;

/// Profile snapshots are taken at `center + k * duration` for these `k`.
pub const PROFILE_OFFSETS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

#[derive(Debug, Parser)]
#[command(name = "fluxpulse", version, about = "Pulsed barrier modulation in a SQUID flux qubit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Experiment configuration (INI).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `[output] directory`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relax to the ground state of the unperturbed double well.
    Relax(CommonArgs),
    /// Single Gaussian pulse from the left-well state.
    Pulse(CommonArgs),
    /// Final left-well probability over an amplitude x duration grid.
    Sweep(CommonArgs),
    /// Two identical pulses at a range of separations.
    Twopulse(CommonArgs),
    /// Density snapshots across a single pulse.
    Profile(CommonArgs),
    /// Fit an exponential envelope to (t, y) data.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// CSV with two columns, t and y; a header line is allowed.
        #[arg(long)]
        data: PathBuf,
    },
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Relax(c)
            | Command::Pulse(c)
            | Command::Sweep(c)
            | Command::Twopulse(c)
            | Command::Profile(c)
            | Command::Fit { common: c, .. } => c,
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ConfigSyntax { .. } | Error::UnknownKey(_) | Error::InvalidParameter { .. } | Error::Io { .. } => {
            EXIT_CONFIG
        }
        Error::FitUnderdetermined(_) => EXIT_FIT,
        Error::RelaxationDiverged { .. } | Error::NormDrift { .. } | Error::SingularSystem { .. } => EXIT_NUMERICAL,
    }
}

/// Runs a parsed command, printing the summary line to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut impl Write) -> Result<(), Error> {
    let common = cli.command.common();
    let mut config = parse_config(&common.config)?;
    if let Some(out) = &common.out {
        config.directory = out.clone();
    }
    let jobs = common.jobs;
    let (files, summary) = match &cli.command {
        Command::Relax(_) => relax(&config)?,
        Command::Pulse(_) => pulse(&config)?,
        Command::Sweep(_) => sweep(&config, jobs)?,
        Command::Twopulse(_) => twopulse(&config, jobs)?,
        Command::Profile(_) => profile(&config)?,
        Command::Fit { data, .. } => fit(data)?,
    };
    let dir = &config.directory;
    for (name, contents) in files {
        write_file(dir, name, &contents)?;
    }
    write_file(dir, "resolved_config.ini", &config.echo())?;
    let _ = writeln!(stdout, "{summary}");
    Ok(())
}

type Outputs = (Vec<(&'static str, String)>, String);

fn relax(config: &ExperimentConfig) -> Result<Outputs, Error> {
    let grid = Arc::new(Grid::new(config.x_max, config.n_points)?);
    let (psi, energy) = relax_ground(grid, &config.params, config.params.e_0, &RelaxOptions::default())?;
    let files = vec![("profiles.csv", output::profiles_csv(&[density_profile(&psi, 0.0)]))];
    Ok((files, format!("relax: E_g = {energy:.6} K")))
}

fn pulse(config: &ExperimentConfig) -> Result<Outputs, Error> {
    let run = run_single_pulse(&config.run_config()?)?;
    let summary = format!(
        "pulse: A = {} tau0 = {} ({:.2} ps): P_L = {:.6} E = {:.6} K F = {:.3}",
        config.amplitude,
        config.duration,
        tau_to_picoseconds(config.duration),
        run.final_p_left,
        run.final_energy,
        run.fidelity
    );
    Ok((vec![("timeseries.csv", output::timeseries_csv(&run.samples))], summary))
}

fn sweep(config: &ExperimentConfig, jobs: usize) -> Result<Outputs, Error> {
    let base = config.run_config()?;
    let result = run_sweep(&base, &config.sweep_a.values(), &config.sweep_tau0.values(), jobs)?;
    let summary = format!(
        "sweep: {} x {} cells, {} failed",
        result.rows(),
        result.cols(),
        result.failures.len()
    );
    let files = vec![
        ("sweep.csv", output::sweep_csv(&result)),
        ("sweep_matrix.csv", output::sweep_matrix_csv(&result)),
    ];
    Ok((files, summary))
}

fn twopulse(config: &ExperimentConfig, jobs: usize) -> Result<Outputs, Error> {
    let base = config.run_config()?;
    let result = run_two_pulse(&base, &config.pulse()?, &config.delta.values(), jobs)?;
    let (lo, hi) = result
        .p_left_prime
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let summary = format!(
        "twopulse: {} separations, P'_L in [{lo:.6}, {hi:.6}], omega = {:.6} K{}",
        result.delta_tau_values.len(),
        result.omega_reference,
        if result.overlap_warning { " (warning: pulses overlap)" } else { "" }
    );
    Ok((vec![("twopulse.csv", output::twopulse_csv(&result))], summary))
}

fn profile(config: &ExperimentConfig) -> Result<Outputs, Error> {
    let mut run_config = config.run_config()?;
    run_config.profile_times = PROFILE_OFFSETS
        .iter()
        .map(|k| config.center + k * config.duration)
        .collect();
    let run = snapshot_run(&run_config)?;
    let peaks: Vec<String> = run
        .profiles
        .iter()
        .map(|p| format!("{:.4}", p.peak_position()))
        .collect();
    let summary = format!("profile: {} snapshots, density peaks at x = [{}]", run.profiles.len(), peaks.join(", "));
    let files = vec![
        ("profiles.csv", output::profiles_csv(&run.profiles)),
        ("timeseries.csv", output::timeseries_csv(&run.samples)),
    ];
    Ok((files, summary))
}

fn fit(data: &PathBuf) -> Result<Outputs, Error> {
    let text = std::fs::read_to_string(data).map_err(|source| Error::Io {
        path: data.clone(),
        source,
    })?;
    let (t, y) = output::parse_xy_csv(&text)?;
    let fit = fit_decoherence(&OscillationSeries::new(t, y)?)?;
    let summary = format!(
        "fit: t_d = {:.6} a1 = {:.6} a2 = {:.6} rms = {:.3e} from {} extrema{}",
        fit.t_d,
        fit.a1,
        fit.a2,
        fit.rms_residual,
        fit.n_extrema_used,
        if fit.identifiable { "" } else { " (t_d unidentifiable)" }
    );
    Ok((vec![("fit.csv", output::fit_csv(&fit))], summary))
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fluxpulse: {e}");
            exit_code(&e)
        }
    }
}
