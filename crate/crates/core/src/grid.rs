//! Uniform spatial grid and wave functions living on it.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Symmetric grid on `[-x_max, x_max]` with an odd number of nodes, so that
/// `x = 0` is a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl Grid {
    pub const MIN_POINTS: usize = 64;
    pub const DEFAULT_X_MAX: f64 = 0.75;
    pub const DEFAULT_POINTS: usize = 1025;

    pub fn new(x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.5) {
            return Err(Error::invalid("x_max", format!("must exceed 0.5, got {x_max}")));
        }
        if n_points < Self::MIN_POINTS || n_points % 2 == 0 {
            return Err(Error::invalid(
                "n_points",
                format!("must be odd and >= {}, got {n_points}", Self::MIN_POINTS),
            ));
        }
        Ok(Self {
            x_max,
            n_points,
            dx: 2.0 * x_max / (n_points - 1) as f64,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Index of the `x = 0` node.
    pub fn center(&self) -> usize {
        self.n_points / 2
    }

    /// Node coordinate; the grid is exactly antisymmetric about the center.
    pub fn x(&self, j: usize) -> f64 {
        let offset = j as isize - self.center() as isize;
        offset as f64 * self.dx
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.x(j))
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::new(Self::DEFAULT_X_MAX, Self::DEFAULT_POINTS).expect("default grid is valid")
    }
}

/// Complex amplitudes on a [`Grid`], with zero values implied beyond both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    amplitudes: Vec<Complex64>,
    grid: Arc<Grid>,
}

impl WaveFunction {
    pub fn new(grid: Arc<Grid>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::invalid(
                "amplitudes",
                format!("length {} does not match grid size {}", amplitudes.len(), grid.len()),
            ));
        }
        Ok(Self { amplitudes, grid })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.points().map(f).collect();
        Self { amplitudes, grid }
    }

    pub fn from_real(grid: Arc<Grid>, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self {
            amplitudes: vec![Complex64::new(0.0, 0.0); n],
            grid,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `sum |psi_j|^2 dx`.
    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Rescales to unit norm. A zero function is left untouched.
    pub fn normalize(&mut self) -> f64 {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            self.amplitudes.iter_mut().for_each(|c| *c *= inv);
        }
        norm
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// `<self|other>` with the grid measure.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        debug_assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx()
    }

    /// Spatial mirror image `psi(-x)`.
    pub fn reflected(&self) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.reverse();
        Self {
            amplitudes,
            grid: Arc::clone(&self.grid),
        }
    }

    /// Largest `|psi|` over the two end nodes divided by the peak `|psi|`.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.amplitudes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.amplitudes.first().map_or(0.0, |c| c.norm());
        let last = self.amplitudes.last().map_or(0.0, |c| c.norm());
        first.max(last) / peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_zero_and_is_symmetric() {
        let g = Grid::default();
        assert_eq!(g.x(g.center()), 0.0);
        assert_eq!(g.x(0), -0.75);
        assert_eq!(g.x(g.len() - 1), 0.75);
        for j in 0..g.len() {
            assert_eq!(g.x(j), -g.x(g.len() - 1 - j));
        }
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.75, 1024).is_err());
        assert!(Grid::new(0.75, 63).is_err());
        assert!(Grid::new(0.5, 1025).is_err());
        assert!(Grid::new(0.6, 65).is_ok());
    }

    #[test]
    fn normalize_gives_unit_norm() {
        let g = Arc::new(Grid::default());
        let psi = WaveFunction::from_fn(g, |x| Complex64::new((-x * x / 0.01).exp(), x)).normalized();
        assert!((psi.norm_squared() - 1.0).abs() < 1e-12);
    }
}
