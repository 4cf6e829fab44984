//! Ground state of the unperturbed double well, its lowest levels, and the
//! localized left/right basis built from the tunnel doublets.
//!
//! ```bash
//! cargo run --release --example ground_state
//! ```

use std::sync::Arc;

use fluxpulse::model::a_critical;
use fluxpulse::observables::prob_left;
use fluxpulse::solver::{relax_ground, RelaxOptions};
use fluxpulse::spectrum::lowest_eigenpairs;
use fluxpulse::{Grid, PhysicalParams};

fn main() -> fluxpulse::Result<()> {
    let params = PhysicalParams::default();
    let grid = Arc::new(Grid::default());

    let (_, e_ground) = relax_ground(Arc::clone(&grid), &params, params.e_0, &RelaxOptions::default())?;
    println!("relaxed ground energy      E_g = {e_ground:.5} K");
    println!("critical pulse amplitude  A_cr = {:.4}", a_critical(&params));

    let spectrum = lowest_eigenpairs(Arc::clone(&grid), params.e_0, &params, 6)?;
    for (i, e) in spectrum.energies.iter().enumerate() {
        println!("  level {i}: {e:.6} K");
    }
    let omega = spectrum.omega.expect("k >= 4");
    println!("doublet spacing              omega = {omega:.5} K");
    println!("tunnel splitting           E1 - E0 = {:.3e} K", spectrum.energies[1] - spectrum.energies[0]);

    let [l0, l1, r0, r1] = spectrum.localized_basis()?;
    for (name, psi) in [("L0", &l0), ("L1", &l1), ("R0", &r0), ("R1", &r1)] {
        println!("  {name}: P_L = {:.6}", prob_left(psi));
    }
    Ok(())
}
