//! Tridiagonal linear solvers.
//!
//! The complex Thomas sweep is the hot loop of the time stepper; the pivoting
//! real solver backs inverse iteration, where the shifted matrix is nearly
//! singular on purpose.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solves `A x = rhs` in place for a matrix with diagonal `diag` and the same
/// value `off` on both off-diagonals. `scratch` must have `diag.len()` slots.
///
/// No pivoting: intended for the Crank-Nicolson matrix `1 + i dt H / 2`, whose
/// diagonal has unit real part and never vanishes.
pub fn solve_constant_offdiag(
    diag: &[Complex64],
    off: Complex64,
    rhs: &mut [Complex64],
    scratch: &mut [Complex64],
) -> Result<()> {
    let n = diag.len();
    debug_assert_eq!(rhs.len(), n);
    debug_assert!(scratch.len() >= n);
    if n == 0 {
        return Ok(());
    }

    let mut pivot = diag[0];
    if pivot == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularSystem { row: 0 });
    }
    let mut inv = pivot.inv();
    scratch[0] = off * inv;
    rhs[0] *= inv;
    for j in 1..n {
        pivot = diag[j] - off * scratch[j - 1];
        if pivot == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularSystem { row: j });
        }
        inv = pivot.inv();
        scratch[j] = off * inv;
        let prev = rhs[j - 1];
        rhs[j] = (rhs[j] - off * prev) * inv;
    }
    for j in (0..n - 1).rev() {
        let next = rhs[j + 1];
        rhs[j] -= scratch[j] * next;
    }
    Ok(())
}

/// LU factorization with partial pivoting of a real tridiagonal matrix.
///
/// Zero pivots are replaced by `tiny` so that a matrix shifted exactly onto
/// an eigenvalue can still be "solved" for inverse iteration.
#[derive(Debug, Clone)]
pub struct PivotedTridiagonal {
    lower: Vec<f64>,
    upper0: Vec<f64>,
    upper1: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedTridiagonal {
    /// `sub[i]` is `A[i+1][i]`, `sup[i]` is `A[i][i+1]`.
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64], tiny: f64) -> Self {
        let n = diag.len();
        assert!(n > 0);
        assert_eq!(sub.len() + 1, n);
        assert_eq!(sup.len() + 1, n);

        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut dl = sub.to_vec();
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            lower: dl,
            upper0: d,
            upper1: du,
            upper2: du2,
            swapped,
        }
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.upper0.len();
        assert_eq!(b.len(), n);
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
                b[i + 1] -= self.lower[i] * b[i];
            } else {
                b[i + 1] -= self.lower[i] * b[i];
            }
        }
        b[n - 1] /= self.upper0[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.upper1[n - 2] * b[n - 1]) / self.upper0[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.upper1[i] * b[i + 1] - self.upper2[i] * b[i + 2]) / self.upper0[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense Gaussian elimination with partial pivoting, as an oracle.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let p = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, p);
            b.swap(col, p);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    fn dense(sub: &[f64], diag: &[f64], sup: &[f64]) -> Vec<Vec<f64>> {
        let n = diag.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = diag[i];
            if i + 1 < n {
                a[i + 1][i] = sub[i];
                a[i][i + 1] = sup[i];
            }
        }
        a
    }

    #[test]
    fn pivoting_handles_zero_leading_diagonal() {
        let sub = [1.0, 2.0, 1.0];
        let diag = [0.0, 1.0, 0.5, 3.0];
        let sup = [2.0, -1.0, 1.0];
        let b = vec![1.0, 2.0, 3.0, 4.0];
        let expect = dense_solve(dense(&sub, &diag, &sup), b.clone());
        let lu = PivotedTridiagonal::factor(&sub, &diag, &sup, 1e-300);
        let mut x = b;
        lu.solve_in_place(&mut x);
        for (u, v) in x.iter().zip(&expect) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_thomas_matches_dense_real_embedding() {
        // Real and imaginary parts decouple when the matrix is real.
        let diag: Vec<Complex64> = (0..10).map(|i| Complex64::new(3.0 + i as f64 * 0.1, 0.0)).collect();
        let off = Complex64::new(-1.0, 0.0);
        let rhs: Vec<Complex64> = (0..10).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mut x = rhs.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); 10];
        solve_constant_offdiag(&diag, off, &mut x, &mut scratch).unwrap();
        let d: Vec<f64> = diag.iter().map(|c| c.re).collect();
        let o = vec![-1.0; 9];
        let re = dense_solve(dense(&o, &d, &o), rhs.iter().map(|c| c.re).collect());
        let im = dense_solve(dense(&o, &d, &o), rhs.iter().map(|c| c.im).collect());
        for i in 0..10 {
            assert!((x[i].re - re[i]).abs() < 1e-12);
            assert!((x[i].im - im[i]).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn thomas_residual_is_small(
            re in proptest::collection::vec(-50.0f64..50.0, 2..40),
            im in -10.0f64..10.0,
            o in -5.0f64..5.0,
        ) {
            // Crank-Nicolson shape: 1 + i*(real stuff).
            let diag: Vec<Complex64> = re.iter().map(|&r| Complex64::new(1.0, r)).collect();
            let off = Complex64::new(0.0, o);
            let b: Vec<Complex64> = (0..diag.len()).map(|i| Complex64::new(i as f64, im)).collect();
            let mut x = b.clone();
            let mut s = vec![Complex64::new(0.0, 0.0); diag.len()];
            solve_constant_offdiag(&diag, off, &mut x, &mut s).unwrap();
            let n = diag.len();
            for i in 0..n {
                let mut ax = diag[i] * x[i];
                if i > 0 { ax += off * x[i - 1]; }
                if i + 1 < n { ax += off * x[i + 1]; }
                prop_assert!((ax - b[i]).norm() < 1e-9 * (1.0 + b[i].norm()));
            }
        }

        #[test]
        fn pivoted_matches_dense(
            diag in proptest::collection::vec(-5.0f64..5.0, 3..20),
            seed in 0u64..1000,
        ) {
            let n = diag.len();
            let sub: Vec<f64> = (0..n - 1).map(|i| ((i as u64 * 7 + seed) % 11) as f64 - 5.0 + 0.5).collect();
            let sup: Vec<f64> = (0..n - 1).map(|i| ((i as u64 * 3 + seed) % 13) as f64 - 6.0 + 0.25).collect();
            let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
            let a = dense(&sub, &diag, &sup);
            let lu = PivotedTridiagonal::factor(&sub, &diag, &sup, 1e-300);
            let mut x = b.clone();
            lu.solve_in_place(&mut x);
            // Compare residuals rather than solutions; random matrices can be ill-conditioned.
            for i in 0..n {
                let ax: f64 = (0..n).map(|k| a[i][k] * x[k]).sum();
                let scale: f64 = 1.0 + (0..n).map(|k| (a[i][k] * x[k]).abs()).sum::<f64>();
                prop_assert!((ax - b[i]).abs() < 1e-8 * scale);
            }
        }
    }
}
