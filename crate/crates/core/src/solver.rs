//! Finite-difference Hamiltonian and Crank-Nicolson propagation.
//!
//! The kinetic term is the 3-point second difference with zero amplitude
//! implied one node beyond each end of the grid.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::model::{ej_at, PhysicalParams, PulseSchedule};

pub const DEFAULT_D_TAU: f64 = 0.002;
pub const DEFAULT_RELAX_TOL: f64 = 1e-9;

/// Discretized `H(E_J) = -(E_C/pi^2) d^2/dx^2 + E_L x^2 + E_J cos(2 pi x) - E_0`
/// split into the `E_J`-independent diagonal and the `cos(2 pi x)` profile.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    grid: Arc<Grid>,
    params: PhysicalParams,
    base_diag: Vec<f64>,
    cosine: Vec<f64>,
    off: f64,
}

impl DiscreteHamiltonian {
    pub fn new(grid: Arc<Grid>, params: PhysicalParams) -> Self {
        let dx = grid.dx();
        let kin = params.kinetic_coefficient() / (dx * dx);
        let base_diag = grid
            .points()
            .map(|x| 2.0 * kin + params.e_l * x * x - params.e_0)
            .collect();
        let cosine = grid.points().map(|x| (2.0 * PI * x).cos()).collect();
        Self {
            grid,
            params,
            base_diag,
            cosine,
            off: -kin,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// Off-diagonal element `-E_C / (pi^2 dx^2)`.
    pub fn off_diagonal(&self) -> f64 {
        self.off
    }

    pub fn diagonal_into(&self, ej: f64, out: &mut [f64]) {
        for ((o, b), c) in out.iter_mut().zip(&self.base_diag).zip(&self.cosine) {
            *o = b + ej * c;
        }
    }

    pub fn diagonal(&self, ej: f64) -> Vec<f64> {
        let mut d = vec![0.0; self.base_diag.len()];
        self.diagonal_into(ej, &mut d);
        d
    }

    pub fn apply_into(&self, psi: &[Complex64], ej: f64, out: &mut [Complex64]) {
        let n = psi.len();
        for j in 0..n {
            let mut acc = psi[j] * (self.base_diag[j] + ej * self.cosine[j]);
            if j > 0 {
                acc += psi[j - 1] * self.off;
            }
            if j + 1 < n {
                acc += psi[j + 1] * self.off;
            }
            out[j] = acc;
        }
    }

    pub fn apply(&self, psi: &WaveFunction, ej: f64) -> WaveFunction {
        let mut out = WaveFunction::zeros(Arc::clone(psi.grid()));
        self.apply_into(psi.amplitudes(), ej, out.amplitudes_mut());
        out
    }

    /// `<psi|H|psi> / <psi|psi>`.
    pub fn expectation(&self, psi: &[Complex64], ej: f64) -> f64 {
        let n = psi.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let mut h = psi[j] * (self.base_diag[j] + ej * self.cosine[j]);
            if j > 0 {
                h += psi[j - 1] * self.off;
            }
            if j + 1 < n {
                h += psi[j + 1] * self.off;
            }
            num += (psi[j].conj() * h).re;
            den += psi[j].norm_sqr();
        }
        num / den
    }
}

/// `H psi` for the given Josephson energy.
pub fn apply_hamiltonian(psi: &WaveFunction, ej: f64, params: &PhysicalParams) -> WaveFunction {
    DiscreteHamiltonian::new(Arc::clone(psi.grid()), *params).apply(psi, ej)
}

/// Reusable Crank-Nicolson stepper; owns its work buffers.
#[derive(Debug, Clone)]
pub struct Propagator {
    hamiltonian: DiscreteHamiltonian,
    rhs: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: Arc<Grid>, params: PhysicalParams) -> Self {
        let n = grid.len();
        let zero = Complex64::new(0.0, 0.0);
        Self {
            hamiltonian: DiscreteHamiltonian::new(grid, params),
            rhs: vec![zero; n],
            scratch: vec![zero; n],
        }
    }

    pub fn hamiltonian(&self) -> &DiscreteHamiltonian {
        &self.hamiltonian
    }

    /// Solves `(1 + z H/2) psi' = (1 - z H/2) psi` in place, where `z = i dt`
    /// for real time and `z = dt` for imaginary time.
    ///
    /// Right-hand side assembly and the Thomas forward sweep share one pass;
    /// back substitution writes straight into `psi`.
    fn cayley_step(&mut self, psi: &mut [Complex64], ej: f64, z: Complex64) -> Result<()> {
        let n = psi.len();
        if n == 0 {
            return Ok(());
        }
        let half = z * 0.5;
        let a = half * self.hamiltonian.off;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let base = &self.hamiltonian.base_diag[..n];
        let cosine = &self.hamiltonian.cosine[..n];
        let gamma = &mut self.scratch[..n];
        let rhs = &mut self.rhs[..n];

        let mut prev_gamma = zero;
        let mut prev_r = zero;
        let mut left = zero;
        for j in 0..n {
            let hd = half * (base[j] + ej * cosine[j]);
            let right = if j + 1 < n { psi[j + 1] } else { zero };
            let here = psi[j];
            let r = (one - hd) * here - a * (left + right);
            let pivot = one + hd - a * prev_gamma;
            let mag = pivot.norm_sqr();
            if mag == 0.0 {
                return Err(Error::SingularSystem { row: j });
            }
            let inv = pivot.conj() * mag.recip();
            prev_gamma = a * inv;
            prev_r = (r - a * prev_r) * inv;
            gamma[j] = prev_gamma;
            rhs[j] = prev_r;
            left = here;
        }
        psi[n - 1] = rhs[n - 1];
        for j in (0..n - 1).rev() {
            psi[j] = rhs[j] - gamma[j] * psi[j + 1];
        }
        Ok(())
    }

    /// One real-time step from `tau` to `tau + d_tau` with `E_J` sampled at
    /// the midpoint.
    pub fn step_real(
        &mut self,
        psi: &mut [Complex64],
        tau: f64,
        d_tau: f64,
        schedule: &PulseSchedule,
    ) -> Result<()> {
        let ej = ej_at(schedule, tau + 0.5 * d_tau, &self.hamiltonian.params);
        self.cayley_step(psi, ej, Complex64::new(0.0, d_tau))
    }

    /// One real-time step at fixed `E_J`.
    pub fn step_real_constant(&mut self, psi: &mut [Complex64], ej: f64, d_tau: f64) -> Result<()> {
        self.cayley_step(psi, ej, Complex64::new(0.0, d_tau))
    }

    /// One imaginary-time step at fixed `E_J`, without renormalization.
    pub fn step_imaginary(&mut self, psi: &mut [Complex64], ej: f64, d_tau: f64) -> Result<()> {
        self.cayley_step(psi, ej, Complex64::new(d_tau, 0.0))
    }
}

/// Single Crank-Nicolson step; allocates a fresh [`Propagator`].
pub fn step_real(
    psi: &WaveFunction,
    tau: f64,
    d_tau: f64,
    schedule: &PulseSchedule,
    params: &PhysicalParams,
) -> Result<WaveFunction> {
    if !(d_tau > 0.0) {
        return Err(Error::invalid("d_tau", format!("must be > 0, got {d_tau}")));
    }
    let mut prop = Propagator::new(Arc::clone(psi.grid()), *params);
    let mut out = psi.clone();
    prop.step_real(out.amplitudes_mut(), tau, d_tau, schedule)?;
    Ok(out)
}

/// Settings for imaginary-time relaxation.
#[derive(Debug, Clone, Copy)]
pub struct RelaxOptions {
    /// Stop once `|dE| / d_tau` falls below this (Kelvin per unit tau).
    pub tol: f64,
    pub d_tau: f64,
    pub max_steps: usize,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_RELAX_TOL,
            d_tau: 0.02,
            max_steps: 200_000,
        }
    }
}

/// Width of the Gaussian starting guess for relaxation.
pub const RELAX_GUESS_WIDTH: f64 = 0.2;

/// Normalized Gaussian centered at `x = 0`.
pub fn relaxation_guess(grid: Arc<Grid>) -> WaveFunction {
    let w2 = RELAX_GUESS_WIDTH * RELAX_GUESS_WIDTH;
    WaveFunction::from_fn(grid, |x| Complex64::new((-x * x / (2.0 * w2)).exp(), 0.0)).normalized()
}

/// Imaginary-time relaxation from the symmetric Gaussian guess, with `E_J`
/// frozen at `ej`. Returns the normalized ground state and its energy.
pub fn relax_ground(
    grid: Arc<Grid>,
    params: &PhysicalParams,
    ej: f64,
    options: &RelaxOptions,
) -> Result<(WaveFunction, f64)> {
    let guess = relaxation_guess(Arc::clone(&grid));
    relax_from(guess, params, ej, options).map(|(psi, e, _)| (psi, e))
}

/// Relaxation from an arbitrary starting state. Also returns the number of
/// steps taken.
pub fn relax_from(
    initial: WaveFunction,
    params: &PhysicalParams,
    ej: f64,
    options: &RelaxOptions,
) -> Result<(WaveFunction, f64, usize)> {
    if !(options.tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {}", options.tol)));
    }
    if !(options.d_tau > 0.0) {
        return Err(Error::invalid("d_tau", format!("must be > 0, got {}", options.d_tau)));
    }
    let mut prop = Propagator::new(Arc::clone(initial.grid()), *params);
    let mut psi = initial.normalized();
    let mut energy = prop.hamiltonian.expectation(psi.amplitudes(), ej);
    for step in 1..=options.max_steps {
        prop.step_imaginary(psi.amplitudes_mut(), ej, options.d_tau)?;
        psi.normalize();
        let next = prop.hamiltonian.expectation(psi.amplitudes(), ej);
        let rate = (next - energy).abs() / options.d_tau;
        energy = next;
        if rate < options.tol {
            return Ok((psi, energy, step));
        }
    }
    Err(Error::RelaxationDiverged {
        steps: options.max_steps,
        last_energy: energy,
    })
}
