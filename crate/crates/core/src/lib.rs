//! Simulation of controlled amplitude transfer in a single-degree-of-freedom
//! rf-SQUID model.
//!
//! The flux `x` (in flux quanta, measured from half-flux bias) obeys
//!
//! ```text
//! i d(psi)/d(tau) = [ -(E_C/pi^2) d^2/dx^2 + E_L x^2 + E_J(tau) cos(2 pi x) - E_0 ] psi
//! ```
//!
//! with energies in Kelvin and one unit of `tau` equal to 7.64 ps. Lowering
//! `E_J` with a Gaussian pulse temporarily removes the barrier between the
//! two flux wells; restoring it leaves a superposition of left and right
//! states.
//!
//! Modules, bottom up:
//!
//! - [`model`]: SQUID constants, pulse shapes, potential, critical amplitude.
//! - [`grid`], [`tridiag`], [`solver`]: finite-difference Hamiltonian,
//!   Crank-Nicolson propagation and imaginary-time relaxation.
//! - [`spectrum`]: lowest eigenpairs and the localized left/right basis.
//! - [`observables`]: left-well probability, energies, fidelity factor.
//! - [`protocols`]: single-pulse runs, parameter sweeps, density snapshots,
//!   two-pulse interferometry.
//! - [`envelope`]: decoherence-time fits to oscillation envelopes.
//! - [`config`], [`output`], [`cli`]: INI configs, CSV output, the
//!   `fluxpulse` command.
//!
//! ```no_run
//! use fluxpulse::protocols::{run_single_pulse, RunConfig};
//!
//! let run = run_single_pulse(&RunConfig::single_pulse(0.59, 5.0)?)?;
//! println!("P_L = {:.4}, F = {:.1}", run.final_p_left, run.fidelity);
//! # Ok::<(), fluxpulse::Error>(())
//! ```

pub mod cli;
pub mod config;
pub mod envelope;
pub mod error;
pub mod grid;
pub mod model;
pub mod observables;
pub mod output;
pub mod protocols;
pub mod solver;
pub mod spectrum;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{Grid, WaveFunction};
pub use model::{PhysicalParams, PulseSchedule, PulseSpec};
