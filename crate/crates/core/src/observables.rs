//! Measured quantities: left-well probability, energies, fidelity factor and
//! density profiles.
//!
//! The left well is `x < 0`; the `x = 0` node contributes half its weight to
//! each side.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::model::PhysicalParams;
use crate::solver::DiscreteHamiltonian;

/// Excitation energies within this fraction of `|e_ground|` count as zero, and
/// `fidelity` returns `f64::INFINITY`. The margin absorbs the residual error of
/// the relaxed ground energy, which can sit slightly above the true minimum.
pub const EXCITATION_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSample {
    pub tau: f64,
    pub p_left: f64,
    pub norm: f64,
    /// `<H>` with the instantaneous Josephson energy.
    pub energy: f64,
}

impl ObservableSample {
    pub fn measure(psi: &WaveFunction, tau: f64, hamiltonian: &DiscreteHamiltonian, ej: f64) -> Self {
        Self {
            tau,
            p_left: prob_left(psi),
            norm: psi.norm(),
            energy: hamiltonian.expectation(psi.amplitudes(), ej),
        }
    }

    pub fn p_right(&self) -> f64 {
        self.norm * self.norm - self.p_left
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub tau: f64,
    pub density: Vec<f64>,
    pub grid: Arc<Grid>,
}

impl DensityProfile {
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.grid.dx()
    }

    /// Coordinate of the density maximum (first one on ties).
    pub fn peak_position(&self) -> f64 {
        let (j, _) = self
            .density
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (j, &d)| if d > best.1 { (j, d) } else { best });
        self.grid.x(j)
    }
}

fn half_weight(psi: &WaveFunction, left: bool) -> f64 {
    let a = psi.amplitudes();
    let c = psi.grid().center();
    let side: f64 = if left {
        a[..c].iter().map(|z| z.norm_sqr()).sum()
    } else {
        a[c + 1..].iter().map(|z| z.norm_sqr()).sum()
    };
    (side + 0.5 * a[c].norm_sqr()) * psi.grid().dx()
}

/// Probability in the left well, `int_{x<0} |psi|^2 dx`.
pub fn prob_left(psi: &WaveFunction) -> f64 {
    half_weight(psi, true)
}

pub fn prob_right(psi: &WaveFunction) -> f64 {
    half_weight(psi, false)
}

/// `<H>` with the barrier at its unperturbed height `E_J = E_0`.
pub fn energy_unperturbed(psi: &WaveFunction, params: &PhysicalParams) -> f64 {
    DiscreteHamiltonian::new(Arc::clone(psi.grid()), *params).expectation(psi.amplitudes(), params.e_0)
}

/// Fidelity factor `(E_b - E_g) / dE` with the barrier top `E_b = 0` and
/// `dE = e_final - e_ground`.
pub fn fidelity(e_final: f64, e_ground: f64) -> Result<f64> {
    let excitation = e_final - e_ground;
    let floor = EXCITATION_FLOOR * e_ground.abs().max(1.0);
    if excitation < -floor {
        return Err(Error::invalid(
            "e_final",
            format!("final energy {e_final} lies below the ground energy {e_ground}"),
        ));
    }
    if excitation <= floor {
        return Ok(f64::INFINITY);
    }
    Ok(e_ground.abs() / excitation)
}

/// `E / |E_g|`, which equals `1/F - 1`.
pub fn energy_ratio(e_final: f64, e_ground: f64) -> f64 {
    e_final / e_ground.abs()
}

pub fn density_profile(psi: &WaveFunction, tau: f64) -> DensityProfile {
    DensityProfile {
        tau,
        density: psi.amplitudes().iter().map(|c| c.norm_sqr()).collect(),
        grid: Arc::clone(psi.grid()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(0.75, 257).unwrap())
    }

    #[test]
    fn symmetric_state_is_half_left() {
        let psi = WaveFunction::from_fn(grid(), |x| Complex64::new((-x * x / 0.02).exp(), 0.0)).normalized();
        assert!((prob_left(&psi) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fidelity_values() {
        let f = fidelity(-39.8, -41.1).unwrap();
        assert!((f - 41.1 / 1.3).abs() < 1e-9);
        assert!((f - 31.6).abs() < 0.05);
        assert_eq!(fidelity(-41.1, -41.1).unwrap(), f64::INFINITY);
        assert_eq!(fidelity(0.0, -41.1).unwrap(), 1.0);
        assert!(fidelity(-42.0, -41.1).is_err());
        assert_eq!(fidelity(-41.1 - 1e-10, -41.1).unwrap(), f64::INFINITY);
    }

    #[test]
    fn energy_ratio_values() {
        assert!((energy_ratio(-39.8, -41.1) - -0.968).abs() < 5e-4);
        assert_eq!(energy_ratio(-41.1, -41.1), -1.0);
        assert_eq!(energy_ratio(0.0, -41.1), 0.0);
    }

    #[test]
    fn profile_integrates_to_norm_and_finds_peak() {
        let psi = WaveFunction::from_fn(grid(), |x| Complex64::new((-(x + 0.3).powi(2) / 0.002).exp(), 0.0))
            .normalized();
        let prof = density_profile(&psi, 1.5);
        assert!((prof.integral() - 1.0).abs() < 1e-12);
        assert!((prof.peak_position() + 0.3).abs() < 0.01);
        assert_eq!(prof.tau, 1.5);
    }

    proptest! {
        #[test]
        fn left_plus_mirrored_left_is_norm(re in proptest::collection::vec(-1.0f64..1.0, 257), im in proptest::collection::vec(-1.0f64..1.0, 257)) {
            let amps: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
            let psi = WaveFunction::new(grid(), amps).unwrap().normalized();
            prop_assert!((prob_left(&psi) + prob_left(&psi.reflected()) - 1.0).abs() <= 1e-10);
            prop_assert!((prob_left(&psi) + prob_right(&psi) - 1.0).abs() <= 1e-10);
            prop_assert!((density_profile(&psi, 0.0).integral() - psi.norm_squared()).abs() <= 1e-10);
        }

        #[test]
        fn fidelity_and_ratio_agree(e_ground in -100.0f64..-0.1, excess in 1e-6f64..100.0) {
            let e_final = e_ground + excess;
            let f = fidelity(e_final, e_ground).unwrap();
            prop_assert!((energy_ratio(e_final, e_ground) - (1.0 / f - 1.0)).abs() <= 1e-12);
        }
    }
}
