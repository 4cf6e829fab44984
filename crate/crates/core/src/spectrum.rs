//! Lowest eigenpairs of the static Hamiltonian and the localized
//! left/right basis built from them.
//!
//! The potential is even and the grid is symmetric about `x = 0`, so the
//! Hamiltonian splits into even and odd blocks on the half grid. Tunnel
//! doublets are degenerate to machine precision for the default SQUID, so
//! solving the two blocks separately is what keeps the eigenvectors as
//! definite-parity states rather than arbitrary mixtures.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::model::PhysicalParams;
use crate::solver::DiscreteHamiltonian;
use crate::tridiag::PivotedTridiagonal;

pub const MAX_EIGENPAIRS: usize = 8;

const INVERSE_ITERATIONS: usize = 4;

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub states: Vec<WaveFunction>,
    /// Doublet-mean spacing `mean(E_2, E_3) - mean(E_0, E_1)`; present for `k >= 4`.
    pub omega: Option<f64>,
}

/// Amplitudes of a state in the localized basis `{L0, L1, R0, R1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LRDecomposition {
    pub c_l0: Complex64,
    pub c_l1: Complex64,
    pub c_r0: Complex64,
    pub c_r1: Complex64,
    /// `1 - sum |c|^2`, clamped at zero.
    pub residual_weight: f64,
}

/// Symmetric tridiagonal block: `diag` and `off` (length `diag.len() - 1`).
struct SymmetricBlock {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymmetricBlock {
    /// Number of eigenvalues strictly below `lambda` (Sturm sequence count).
    fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        let guard = f64::MIN_POSITIVE.sqrt();
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            if q.abs() < guard {
                q = -guard;
            }
            q = self.diag[i] - lambda - self.off[i - 1] * self.off[i - 1] / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Inverse iteration on `(T - lambda)`.
    fn eigenvector(&self, lambda: f64, seed: usize) -> Vec<f64> {
        let n = self.diag.len();
        let shifted: Vec<f64> = self.diag.iter().map(|d| d - lambda).collect();
        let (lo, hi) = self.gershgorin();
        let tiny = f64::EPSILON * lo.abs().max(hi.abs());
        let lu = PivotedTridiagonal::factor(&self.off, &shifted, &self.off, tiny);
        // Deterministic start vector with no particular symmetry.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i * 7 + seed * 13) as f64 * 0.618_033_988_75).fract())
            .collect();
        for _ in 0..INVERSE_ITERATIONS {
            lu.solve_in_place(&mut v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

fn parity_block(diag: &[f64], off: f64, center: usize, parity: Parity) -> SymmetricBlock {
    match parity {
        Parity::Even => {
            // Unknowns 0..=center. The center row couples to its two equal
            // neighbours; a sqrt(2) rescaling of the center amplitude keeps
            // the block symmetric.
            let mut o = vec![off; center];
            o[center - 1] = off * SQRT_2;
            SymmetricBlock {
                diag: diag[..=center].to_vec(),
                off: o,
            }
        }
        Parity::Odd => SymmetricBlock {
            diag: diag[..center].to_vec(),
            off: vec![off; center - 1],
        },
    }
}

fn unfold(grid: &Arc<Grid>, half: &[f64], parity: Parity) -> WaveFunction {
    let n = grid.len();
    let center = grid.center();
    let mut amps = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..center {
        amps[j] = Complex64::new(half[j], 0.0);
        amps[n - 1 - j] = match parity {
            Parity::Even => Complex64::new(half[j], 0.0),
            Parity::Odd => Complex64::new(-half[j], 0.0),
        };
    }
    if parity == Parity::Even {
        amps[center] = Complex64::new(SQRT_2 * half[center], 0.0);
    }
    let mut psi = WaveFunction::new(Arc::clone(grid), amps).expect("length matches grid");
    // Fix the overall sign: positive amplitude at the leftmost significant node.
    if let Some(first) = psi
        .amplitudes()
        .iter()
        .find(|c| c.re.abs() > 1e-6)
        .map(|c| c.re)
    {
        if first < 0.0 {
            psi.amplitudes_mut().iter_mut().for_each(|c| *c = -*c);
        }
    }
    psi.normalized()
}

/// The `k` lowest eigenpairs of `H(E_J = ej)`, ascending in energy.
pub fn lowest_eigenpairs(
    grid: Arc<Grid>,
    ej: f64,
    params: &PhysicalParams,
    k: usize,
) -> Result<Spectrum> {
    if !(1..=MAX_EIGENPAIRS).contains(&k) {
        return Err(Error::invalid(
            "k",
            format!("must lie in 1..={MAX_EIGENPAIRS}, got {k}"),
        ));
    }
    let ham = DiscreteHamiltonian::new(Arc::clone(&grid), *params);
    let diag = ham.diagonal(ej);
    let center = grid.center();

    let mut candidates: Vec<(f64, Parity, usize)> = Vec::with_capacity(2 * k);
    let blocks = [Parity::Even, Parity::Odd].map(|p| (p, parity_block(&diag, ham.off_diagonal(), center, p)));
    for (parity, block) in &blocks {
        for i in 0..k {
            candidates.push((block.eigenvalue(i), *parity, i));
        }
    }
    // Even before odd on exact ties so that doublets come out (even, odd).
    candidates.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| (a.1 == Parity::Odd).cmp(&(b.1 == Parity::Odd)))
    });
    candidates.truncate(k);

    let mut energies = Vec::with_capacity(k);
    let mut states = Vec::with_capacity(k);
    for (lambda, parity, idx) in candidates {
        let block = &blocks.iter().find(|(p, _)| *p == parity).unwrap().1;
        let half = block.eigenvector(lambda, idx);
        let psi = unfold(&grid, &half, parity);
        energies.push(lambda);
        states.push(psi);
    }

    let omega = (k >= 4).then(|| 0.5 * (energies[2] + energies[3]) - 0.5 * (energies[0] + energies[1]));
    Ok(Spectrum {
        energies,
        states,
        omega,
    })
}

fn left_mass(psi: &WaveFunction) -> f64 {
    let c = psi.grid().center();
    let a = psi.amplitudes();
    (a[..c].iter().map(|z| z.norm_sqr()).sum::<f64>() + 0.5 * a[c].norm_sqr()) * psi.grid().dx()
}

fn combine(a: &WaveFunction, b: &WaveFunction, sign: f64) -> WaveFunction {
    let amps = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x + y * sign) / SQRT_2)
        .collect();
    WaveFunction::new(Arc::clone(a.grid()), amps).expect("same grid")
}

/// Localized pair `(left, right)` from a symmetric/antisymmetric doublet.
fn localize(a: &WaveFunction, b: &WaveFunction) -> (WaveFunction, WaveFunction) {
    let plus = combine(a, b, 1.0);
    let minus = combine(a, b, -1.0);
    if left_mass(&minus) > 0.5 {
        (minus, plus)
    } else {
        (plus, minus)
    }
}

impl Spectrum {
    /// Localized states `[L0, L1, R0, R1]`.
    pub fn localized_basis(&self) -> Result<[WaveFunction; 4]> {
        if self.states.len() < 4 {
            return Err(Error::invalid(
                "spectrum",
                format!("need at least 4 states, have {}", self.states.len()),
            ));
        }
        let (l0, r0) = localize(&self.states[0], &self.states[1]);
        let (l1, r1) = localize(&self.states[2], &self.states[3]);
        Ok([l0, l1, r0, r1])
    }
}

/// Overlaps of `psi` with the localized two-level-per-well basis.
pub fn project_lr_basis(psi: &WaveFunction, spectrum: &Spectrum) -> Result<LRDecomposition> {
    let [l0, l1, r0, r1] = spectrum.localized_basis()?;
    let c_l0 = l0.inner(psi);
    let c_l1 = l1.inner(psi);
    let c_r0 = r0.inner(psi);
    let c_r1 = r1.inner(psi);
    let weight = c_l0.norm_sqr() + c_l1.norm_sqr() + c_r0.norm_sqr() + c_r1.norm_sqr();
    Ok(LRDecomposition {
        c_l0,
        c_l1,
        c_r0,
        c_r1,
        residual_weight: (psi.norm_squared() - weight).clamp(0.0, 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{relax_ground, RelaxOptions};
    use std::f64::consts::PI;

    fn defaults(k: usize) -> Spectrum {
        let p = PhysicalParams::default();
        lowest_eigenpairs(Arc::new(Grid::default()), p.e_0, &p, k).unwrap()
    }

    #[test]
    fn k_out_of_range() {
        let p = PhysicalParams::default();
        let g = Arc::new(Grid::default());
        assert!(lowest_eigenpairs(Arc::clone(&g), p.e_0, &p, 0).is_err());
        assert!(lowest_eigenpairs(g, p.e_0, &p, 9).is_err());
    }

    #[test]
    fn orthonormal_with_small_residuals() {
        let s = defaults(8);
        let p = PhysicalParams::default();
        for i in 0..8 {
            for j in 0..8 {
                let ov = s.states[i].inner(&s.states[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ov - expect).norm() <= 1e-8, "<{i}|{j}> = {ov}");
            }
            let h = crate::solver::apply_hamiltonian(&s.states[i], p.e_0, &p);
            let r: f64 = h
                .amplitudes()
                .iter()
                .zip(s.states[i].amplitudes())
                .map(|(a, b)| (a - b * s.energies[i]).norm_sqr())
                .sum::<f64>()
                * s.states[i].grid().dx();
            assert!(r.sqrt() <= 1e-6 * s.energies[i].abs(), "residual {i}: {}", r.sqrt());
        }
        assert!(s.energies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ground_energy_agrees_with_relaxation() {
        let p = PhysicalParams::default();
        let opts = RelaxOptions::default();
        let (_, e) = relax_ground(Arc::new(Grid::default()), &p, p.e_0, &opts).unwrap();
        let s = defaults(1);
        assert!((s.energies[0] - e).abs() <= 10.0 * opts.tol, "{} vs {e}", s.energies[0]);
    }

    #[test]
    fn harmonic_level_spacing() {
        let p = PhysicalParams::default();
        let s = lowest_eigenpairs(Arc::new(Grid::default()), 0.0, &p, 5).unwrap();
        let spacing = 2.0 / PI * (p.e_c * p.e_l).sqrt();
        assert!((spacing - 1.534).abs() < 1e-3);
        for w in s.energies.windows(2) {
            let d = w[1] - w[0];
            assert!((d - spacing).abs() < 5e-3 * spacing, "spacing {d}");
        }
    }

    #[test]
    fn tunnel_splitting_is_tiny_against_omega() {
        let s = defaults(4);
        let omega = s.omega.unwrap();
        let split = s.energies[1] - s.energies[0];
        assert!(omega > 2.0 && omega < 2.5, "omega = {omega}");
        assert!(split.abs() < 1e-6 * omega);
    }

    #[test]
    fn localized_ground_state_projects_onto_itself() {
        let s = defaults(4);
        let [l0, ..] = s.localized_basis().unwrap();
        assert!(left_mass(&l0) > 0.999);
        let d = project_lr_basis(&l0, &s).unwrap();
        assert!((d.c_l0 - 1.0).norm() < 1e-8);
        assert!(d.c_l1.norm() < 1e-8 && d.c_r0.norm() < 1e-8 && d.c_r1.norm() < 1e-8);
        assert!(d.residual_weight < 1e-8);
    }

    #[test]
    fn symmetric_ground_state_splits_evenly() {
        let s = defaults(4);
        let d = project_lr_basis(&s.states[0], &s).unwrap();
        assert!((d.c_l0.norm_sqr() - 0.5).abs() < 1e-8);
        assert!((d.c_r0.norm_sqr() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn projection_needs_four_states() {
        let s = defaults(2);
        assert!(project_lr_basis(&s.states[0], &s).is_err());
    }
}
