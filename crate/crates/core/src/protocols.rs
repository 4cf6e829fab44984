//! End-to-end experiments: state preparation, single-pulse runs, the
//! amplitude/duration sweep, density snapshots and two-pulse interferometry.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::model::{ej_at, PhysicalParams, PulseSchedule, PulseSpec, DEFAULT_CENTER_IN_DURATIONS};
use crate::observables::{density_profile, energy_unperturbed, fidelity, prob_left, DensityProfile, ObservableSample};
use crate::solver::{relax_ground, Propagator, RelaxOptions, DEFAULT_D_TAU};
use crate::spectrum::lowest_eigenpairs;

/// Runs abort once `|norm - 1|` exceeds this.
pub const MAX_NORM_DRIFT: f64 = 1e-4;

/// Pulse separations below this many durations raise the overlap warning.
pub const MIN_SEPARATION_IN_DURATIONS: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub grid: Arc<Grid>,
    pub d_tau: f64,
    pub schedule: PulseSchedule,
    /// Steps between recorded samples.
    pub sample_every: usize,
    /// Times at which density profiles are captured (snapshot runs).
    pub profile_times: Vec<f64>,
    pub relax: RelaxOptions,
}

impl RunConfig {
    /// Default SQUID, grid and time step for a single pulse.
    pub fn single_pulse(amplitude: f64, duration: f64) -> Result<Self> {
        let pulse = PulseSpec::with_default_center(amplitude, duration)?;
        Ok(Self {
            params: PhysicalParams::default(),
            grid: Arc::new(Grid::default()),
            d_tau: DEFAULT_D_TAU,
            schedule: PulseSchedule::single(pulse)?,
            sample_every: 100,
            profile_times: Vec::new(),
            relax: RelaxOptions::default(),
        })
    }

    pub fn with_schedule(&self, schedule: PulseSchedule) -> Self {
        Self {
            schedule,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.d_tau.is_finite() && self.d_tau > 0.0) {
            return Err(Error::invalid("d_tau", format!("must be > 0, got {}", self.d_tau)));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every", "must be >= 1"));
        }
        let end = self.schedule.total_time();
        if let Some(t) = self.profile_times.iter().find(|t| !(0.0..=end).contains(*t)) {
            return Err(Error::invalid(
                "profile_times",
                format!("{t} lies outside [0, {end}]"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub samples: Vec<ObservableSample>,
    pub final_p_left: f64,
    /// Final `<H>` against the unperturbed barrier.
    pub final_energy: f64,
    /// Ground energy from the relaxation that seeded the run.
    pub e_ground: f64,
    pub fidelity: f64,
    pub profiles: Vec<DensityProfile>,
}

/// Relaxed ground state at `E_J = E_0` restricted to `x < 0` and renormalized.
/// Returns the state and the ground energy before truncation.
pub fn prepare_left_state(grid: Arc<Grid>, params: &PhysicalParams) -> Result<(WaveFunction, f64)> {
    prepare_left_state_with(grid, params, &RelaxOptions::default())
}

pub fn prepare_left_state_with(
    grid: Arc<Grid>,
    params: &PhysicalParams,
    relax: &RelaxOptions,
) -> Result<(WaveFunction, f64)> {
    let (ground, e_ground) = relax_ground(Arc::clone(&grid), params, params.e_0, relax)?;
    let center = grid.center();
    let mut amps = ground.into_amplitudes();
    for c in &mut amps[center..] {
        *c = Complex64::new(0.0, 0.0);
    }
    let psi = WaveFunction::new(grid, amps)?.normalized();
    Ok((psi, e_ground))
}

/// Propagates a prepared state through `config.schedule`.
pub fn run_from_state(config: &RunConfig, initial: &WaveFunction, e_ground: f64) -> Result<RunResult> {
    config.validate()?;
    let end = config.schedule.total_time();
    let n_steps = ((end / config.d_tau).round() as usize).max(1);
    let dt = end / n_steps as f64;

    let mut prop = Propagator::new(Arc::clone(&config.grid), config.params);
    let mut psi = initial.clone();
    let mut samples = Vec::with_capacity(n_steps / config.sample_every + 2);

    let mut profile_steps: Vec<(usize, f64)> = config
        .profile_times
        .iter()
        .map(|&t| ((t / dt).round() as usize, t))
        .collect();
    profile_steps.sort_by_key(|&(s, _)| s);
    let mut pending = profile_steps.into_iter().peekable();
    let mut profiles = Vec::new();

    let measure = |psi: &WaveFunction, step: usize, prop: &Propagator| {
        let tau = step as f64 * dt;
        let ej = ej_at(&config.schedule, tau, &config.params);
        ObservableSample::measure(psi, tau, prop.hamiltonian(), ej)
    };

    for step in 0..=n_steps {
        while let Some(&(s, _)) = pending.peek() {
            if s != step {
                break;
            }
            profiles.push(density_profile(&psi, step as f64 * dt));
            pending.next();
        }
        if step % config.sample_every == 0 || step == n_steps {
            let sample = measure(&psi, step, &prop);
            if (sample.norm - 1.0).abs() > MAX_NORM_DRIFT {
                return Err(Error::NormDrift {
                    tau: sample.tau,
                    norm: sample.norm,
                });
            }
            samples.push(sample);
        }
        if step < n_steps {
            prop.step_real(psi.amplitudes_mut(), step as f64 * dt, dt, &config.schedule)?;
        }
    }

    let final_energy = energy_unperturbed(&psi, &config.params);
    Ok(RunResult {
        samples,
        final_p_left: prob_left(&psi).clamp(0.0, 1.0),
        final_energy,
        e_ground,
        fidelity: fidelity(final_energy, e_ground)?,
        profiles,
    })
}

fn require_single(config: &RunConfig) -> Result<()> {
    match config.schedule.pulses().len() {
        1 => Ok(()),
        n => Err(Error::invalid(
            "schedule",
            format!("single-pulse run needs exactly one pulse, got {n}"),
        )),
    }
}

/// Relax, cut to the left well, and follow the evolution through one pulse.
pub fn run_single_pulse(config: &RunConfig) -> Result<RunResult> {
    require_single(config)?;
    let (psi, e_ground) = prepare_left_state_with(Arc::clone(&config.grid), &config.params, &config.relax)?;
    run_from_state(config, &psi, e_ground)
}

/// Single-pulse run that also captures density profiles at
/// `config.profile_times`.
pub fn snapshot_run(config: &RunConfig) -> Result<RunResult> {
    if config.profile_times.is_empty() {
        return Err(Error::invalid("profile_times", "snapshot run needs at least one time"));
    }
    run_single_pulse(config)
}

/// Final observables over an amplitude x duration grid. Failed cells are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub a_values: Vec<f64>,
    pub tau0_values: Vec<f64>,
    /// Row-major, `a_values.len()` rows by `tau0_values.len()` columns.
    pub p_left: Vec<f64>,
    pub energy: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// `(row, column, message)` for each failed cell.
    pub failures: Vec<(usize, usize, String)>,
}

impl SweepResult {
    pub fn rows(&self) -> usize {
        self.a_values.len()
    }

    pub fn cols(&self) -> usize {
        self.tau0_values.len()
    }

    pub fn p_left_at(&self, row: usize, col: usize) -> f64 {
        self.p_left[row * self.cols() + col]
    }

    pub fn p_left_row(&self, row: usize) -> &[f64] {
        &self.p_left[row * self.cols()..(row + 1) * self.cols()]
    }
}

fn thread_pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::invalid("parallelism", e.to_string()))
}

/// Independent single-pulse runs over every `(A, tau0)` pair, pulses centered
/// at `4 tau0`. `parallelism = 0` uses every available core.
pub fn run_sweep(
    base: &RunConfig,
    a_values: &[f64],
    tau0_values: &[f64],
    parallelism: usize,
) -> Result<SweepResult> {
    if a_values.is_empty() || tau0_values.is_empty() {
        return Err(Error::invalid("sweep", "amplitude and duration lists must be non-empty"));
    }
    let (initial, e_ground) = prepare_left_state_with(Arc::clone(&base.grid), &base.params, &base.relax)?;
    let cells: Vec<(usize, usize)> = (0..a_values.len())
        .flat_map(|i| (0..tau0_values.len()).map(move |j| (i, j)))
        .collect();

    let run_cell = |&(i, j): &(usize, usize)| -> Result<RunResult> {
        let pulse = PulseSpec::with_default_center(a_values[i], tau0_values[j])?;
        let config = RunConfig {
            profile_times: Vec::new(),
            ..base.with_schedule(PulseSchedule::single(pulse)?)
        };
        run_from_state(&config, &initial, e_ground)
    };
    let outcomes: Vec<Result<RunResult>> = thread_pool(parallelism)?.install(|| cells.par_iter().map(run_cell).collect());

    let n = cells.len();
    let mut result = SweepResult {
        a_values: a_values.to_vec(),
        tau0_values: tau0_values.to_vec(),
        p_left: vec![f64::NAN; n],
        energy: vec![f64::NAN; n],
        fidelity: vec![f64::NAN; n],
        failures: Vec::new(),
    };
    for (k, ((i, j), outcome)) in cells.into_iter().zip(outcomes).enumerate() {
        match outcome {
            Ok(run) => {
                result.p_left[k] = run.final_p_left;
                result.energy[k] = run.final_energy;
                result.fidelity[k] = run.fidelity;
            }
            Err(e) => result.failures.push((i, j, e.to_string())),
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPulseResult {
    /// Center-to-center separations.
    pub delta_tau_values: Vec<f64>,
    pub p_left_prime: Vec<f64>,
    /// Doublet-mean level spacing of the static double well.
    pub omega_reference: f64,
    /// Some separation was below `4 * duration`.
    pub overlap_warning: bool,
}

/// Two identical pulses, the first centered at `pulse.center()`, the second
/// `delta_tau` later; runs end `4 * duration` after the second center.
pub fn two_pulse_schedule(pulse: &PulseSpec, delta_tau: f64) -> Result<PulseSchedule> {
    let second = pulse.recentered(pulse.center() + delta_tau)?;
    PulseSchedule::new(vec![*pulse, second], second.window_end())
}

/// Left-well probability after two identical pulses for each separation.
pub fn run_two_pulse(
    base: &RunConfig,
    pulse: &PulseSpec,
    delta_taus: &[f64],
    parallelism: usize,
) -> Result<TwoPulseResult> {
    if delta_taus.is_empty() {
        return Err(Error::invalid("delta_taus", "must be non-empty"));
    }
    if let Some(d) = delta_taus.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::invalid("delta_taus", format!("separations must be > 0, got {d}")));
    }
    let overlap_warning = delta_taus
        .iter()
        .any(|&d| d < MIN_SEPARATION_IN_DURATIONS * pulse.duration());
    let spectrum = lowest_eigenpairs(Arc::clone(&base.grid), base.params.e_0, &base.params, 4)?;
    let omega_reference = spectrum.omega.expect("k = 4 populates omega");

    let (initial, e_ground) = prepare_left_state_with(Arc::clone(&base.grid), &base.params, &base.relax)?;
    let run = |&delta: &f64| -> Result<f64> {
        let config = RunConfig {
            profile_times: Vec::new(),
            ..base.with_schedule(two_pulse_schedule(pulse, delta)?)
        };
        run_from_state(&config, &initial, e_ground).map(|r| r.final_p_left)
    };
    let p_left_prime = thread_pool(parallelism)?
        .install(|| delta_taus.par_iter().map(run).collect::<Result<Vec<_>>>())?;
    Ok(TwoPulseResult {
        delta_tau_values: delta_taus.to_vec(),
        p_left_prime,
        omega_reference,
        overlap_warning,
    })
}

/// Pulse used by the two-pulse protocol when only amplitude and duration are given.
pub fn default_first_pulse(amplitude: f64, duration: f64) -> Result<PulseSpec> {
    PulseSpec::new(amplitude, duration, DEFAULT_CENTER_IN_DURATIONS * duration)
}

/// Angular frequency in `[omega_min, omega_max]` maximizing the periodogram
/// `|sum_k (y_k - mean) exp(-i omega t_k)|^2`. Works on non-uniform `t`.
pub fn dominant_angular_frequency(t: &[f64], y: &[f64], omega_min: f64, omega_max: f64) -> f64 {
    assert_eq!(t.len(), y.len());
    assert!(omega_max > omega_min && omega_min >= 0.0);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let power = |omega: f64| {
        t.iter()
            .zip(y)
            .map(|(&tk, &yk)| Complex64::from_polar(yk - mean, -omega * tk))
            .sum::<Complex64>()
            .norm_sqr()
    };
    let span = t.last().unwrap() - t.first().unwrap();
    // Oversample the natural resolution 2 pi / span by 20.
    let step = (2.0 * std::f64::consts::PI / span.max(f64::EPSILON)) / 20.0;
    let n = (((omega_max - omega_min) / step).ceil() as usize).max(2);
    let mut best = (omega_min, f64::NEG_INFINITY);
    for k in 0..=n {
        let w = omega_min + (omega_max - omega_min) * k as f64 / n as f64;
        let p = power(w);
        if p > best.1 {
            best = (w, p);
        }
    }
    // Golden-section polish within one grid step.
    let h = (omega_max - omega_min) / n as f64;
    let (mut a, mut b) = ((best.0 - h).max(omega_min), (best.0 + h).min(omega_max));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if power(c) > power(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prepared_state_sits_in_left_well() {
        let params = PhysicalParams::default();
        let (psi, e_g) = prepare_left_state(Arc::new(Grid::default()), &params).unwrap();
        assert!((prob_left(&psi) - 1.0).abs() < 1e-6);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let e = energy_unperturbed(&psi, &params);
        assert!((e - e_g).abs() < 0.03 * e_g.abs(), "{e} vs {e_g}");
    }

    #[test]
    fn preparation_in_harmonic_dominated_regime() {
        let params = PhysicalParams::new(0.009, 645.0, 1e-9).unwrap();
        let (psi, _) = prepare_left_state(Arc::new(Grid::default()), &params).unwrap();
        assert!((prob_left(&psi) - 1.0).abs() < 1e-12);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_pulse_requires_one_pulse() {
        let mut cfg = RunConfig::single_pulse(0.5, 1.0).unwrap();
        cfg.schedule = PulseSchedule::constant(1.0).unwrap();
        assert!(run_single_pulse(&cfg).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::single_pulse(0.5, 1.0).unwrap();
        cfg.sample_every = 0;
        assert!(run_single_pulse(&cfg).is_err());
        let mut cfg = RunConfig::single_pulse(0.5, 1.0).unwrap();
        cfg.profile_times = vec![100.0];
        assert!(snapshot_run(&cfg).is_err());
        let cfg = RunConfig::single_pulse(0.5, 1.0).unwrap();
        assert!(snapshot_run(&cfg).is_err());
    }

    #[test]
    fn zero_amplitude_pulse_leaves_state_in_left_well() {
        let cfg = RunConfig::single_pulse(0.0, 5.0).unwrap();
        let r = run_single_pulse(&cfg).unwrap();
        assert!(r.final_p_left >= 0.99);
        assert!(r.samples.windows(2).all(|w| w[0].tau < w[1].tau));
        assert_eq!(r.samples.last().unwrap().tau, cfg.schedule.total_time());
    }

    #[test]
    fn dominant_frequency_of_a_cosine() {
        let t: Vec<f64> = (0..200).map(|k| 0.3 * k as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 0.5 + 0.3 * (2.2 * t + 0.4).cos()).collect();
        let w = dominant_angular_frequency(&t, &y, 0.5, 6.0);
        assert!((w - 2.2).abs() < 1e-3, "{w}");
    }

    #[test]
    fn two_pulse_rejects_bad_separations() {
        let base = RunConfig::single_pulse(0.5, 1.0).unwrap();
        let pulse = default_first_pulse(0.5, 1.0).unwrap();
        assert!(run_two_pulse(&base, &pulse, &[], 1).is_err());
        assert!(run_two_pulse(&base, &pulse, &[-1.0], 1).is_err());
    }
}
