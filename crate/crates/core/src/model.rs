//! Physical model of the rf-SQUID at half-flux-quantum bias.
//!
//! Energies are in Kelvin and time is the dimensionless `tau` for which one
//! unit equals `hbar / (k_B * 1 K)`. The potential is shifted so that the
//! unperturbed barrier top sits at zero energy.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Physical time represented by one unit of `tau`, in picoseconds.
pub const PICOSECONDS_PER_TAU: f64 = 7.64;

/// A pulse center closer to `tau = 0` than this many durations is rejected.
pub const MIN_CENTER_IN_DURATIONS: f64 = 3.5;

/// Default pulse center for single-pulse runs, in units of the duration.
pub const DEFAULT_CENTER_IN_DURATIONS: f64 = 4.0;

/// Samples per unit `tau` (at least) used to verify `E_J > 0` on a schedule.
const POSITIVITY_SAMPLES_PER_TAU: f64 = 50.0;

/// SQUID constants: charging, inductive and unperturbed Josephson energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub e_c: f64,
    pub e_l: f64,
    pub e_0: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            e_c: 0.009,
            e_l: 645.0,
            e_0: 76.0,
        }
    }
}

impl PhysicalParams {
    /// `e_c` must be strictly positive; `e_l` and `e_0` may be zero so the
    /// free-particle and pure-harmonic limits stay expressible.
    pub fn new(e_c: f64, e_l: f64, e_0: f64) -> Result<Self> {
        if !(e_c.is_finite() && e_c > 0.0) {
            return Err(Error::invalid("e_c", format!("must be finite and > 0, got {e_c}")));
        }
        if !(e_l.is_finite() && e_l >= 0.0) {
            return Err(Error::invalid("e_l", format!("must be finite and >= 0, got {e_l}")));
        }
        if !(e_0.is_finite() && e_0 >= 0.0) {
            return Err(Error::invalid("e_0", format!("must be finite and >= 0, got {e_0}")));
        }
        Ok(Self { e_c, e_l, e_0 })
    }

    /// Coefficient of `-d^2/dx^2` in the Hamiltonian, `E_C / pi^2`.
    pub fn kinetic_coefficient(&self) -> f64 {
        self.e_c / (PI * PI)
    }
}

/// One Gaussian dip of the Josephson energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    amplitude: f64,
    duration: f64,
    center: f64,
}

impl PulseSpec {
    pub fn new(amplitude: f64, duration: f64, center: f64) -> Result<Self> {
        if !(amplitude.is_finite() && (0.0..=1.0).contains(&amplitude)) {
            return Err(Error::invalid(
                "amplitude",
                format!("must lie in [0, 1], got {amplitude}"),
            ));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::invalid("duration", format!("must be > 0, got {duration}")));
        }
        if !center.is_finite() || center < MIN_CENTER_IN_DURATIONS * duration {
            return Err(Error::invalid(
                "center",
                format!(
                    "must be at least {MIN_CENTER_IN_DURATIONS} x duration ({}), got {center}",
                    MIN_CENTER_IN_DURATIONS * duration
                ),
            ));
        }
        Ok(Self {
            amplitude,
            duration,
            center,
        })
    }

    /// Pulse centered at `4 * duration`.
    pub fn with_default_center(amplitude: f64, duration: f64) -> Result<Self> {
        Self::new(amplitude, duration, DEFAULT_CENTER_IN_DURATIONS * duration)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Same shape, moved to a new center.
    pub fn recentered(&self, center: f64) -> Result<Self> {
        Self::new(self.amplitude, self.duration, center)
    }

    /// Relative depth of the dip at `tau`.
    fn dip(&self, tau: f64) -> f64 {
        let s = (tau - self.center) / self.duration;
        self.amplitude * (-s * s).exp()
    }

    /// End of the pulse window, `center + 4 * duration`.
    pub fn window_end(&self) -> f64 {
        self.center + 4.0 * self.duration
    }
}

/// Pulses sorted by center plus the simulation end time.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pulses: Vec<PulseSpec>,
    total_time: f64,
}

impl PulseSchedule {
    pub fn new(mut pulses: Vec<PulseSpec>, total_time: f64) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::invalid(
                "total_time",
                format!("must be finite and > 0, got {total_time}"),
            ));
        }
        pulses.sort_by(|a, b| a.center.total_cmp(&b.center));
        let schedule = Self { pulses, total_time };

        // Dense sampling plus the pulse centers themselves, where dips are deepest.
        let n = ((total_time * POSITIVITY_SAMPLES_PER_TAU).ceil() as usize).max(1000);
        let probes = (0..=n)
            .map(|i| total_time * i as f64 / n as f64)
            .chain(schedule.pulses.iter().map(|p| p.center));
        for tau in probes {
            if schedule.relative_ej(tau) <= 0.0 {
                return Err(Error::invalid(
                    "pulses",
                    format!("Josephson energy is not positive at tau = {tau}"),
                ));
            }
        }
        Ok(schedule)
    }

    /// One pulse, run until `center + 4 * duration`.
    pub fn single(pulse: PulseSpec) -> Result<Self> {
        Self::new(vec![pulse], pulse.window_end())
    }

    /// No pulses; `E_J` stays at `E_0`.
    pub fn constant(total_time: f64) -> Result<Self> {
        Self::new(Vec::new(), total_time)
    }

    pub fn pulses(&self) -> &[PulseSpec] {
        &self.pulses
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// `E_J(tau) / E_0`.
    pub fn relative_ej(&self, tau: f64) -> f64 {
        1.0 - self.pulses.iter().map(|p| p.dip(tau)).sum::<f64>()
    }
}

/// Josephson energy at `tau`: `E_0 (1 - sum_i A_i exp[-(tau - c_i)^2 / d_i^2])`.
pub fn ej_at(schedule: &PulseSchedule, tau: f64, params: &PhysicalParams) -> f64 {
    params.e_0 * schedule.relative_ej(tau)
}

/// Shifted double-well potential `E_L x^2 + E_J cos(2 pi x) - E_0`.
pub fn potential_at(x: f64, ej: f64, params: &PhysicalParams) -> f64 {
    params.e_l * x * x + ej * (2.0 * PI * x).cos() - params.e_0
}

/// Pulse amplitude above which the barrier vanishes at the pulse peak.
pub fn a_critical(params: &PhysicalParams) -> f64 {
    1.0 - params.e_l / (2.0 * PI * PI * params.e_0)
}

pub fn tau_to_picoseconds(tau: f64) -> f64 {
    tau * PICOSECONDS_PER_TAU
}
