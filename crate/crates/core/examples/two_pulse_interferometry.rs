//! Two identical pulses separated by a variable delay. The left-well
//! probability after the second pulse oscillates at the intra-well level
//! spacing; the state after the first pulse is decomposed into the lowest
//! two levels of each well.
//!
//! ```bash
//! cargo run --release --example two_pulse_interferometry
//! ```

use std::sync::Arc;

use fluxpulse::model::PulseSchedule;
use fluxpulse::protocols::{
    default_first_pulse, dominant_angular_frequency, prepare_left_state, run_two_pulse, RunConfig,
};
use fluxpulse::solver::Propagator;
use fluxpulse::spectrum::{lowest_eigenpairs, project_lr_basis};
use fluxpulse::Grid;

fn main() -> fluxpulse::Result<()> {
    let (amplitude, duration) = (0.59, 11.35);
    let mut base = RunConfig::single_pulse(amplitude, duration)?;
    base.grid = Arc::new(Grid::new(0.75, 513)?);
    base.d_tau = 0.004;
    let pulse = default_first_pulse(amplitude, duration)?;

    // State right after the first pulse, in the localized basis.
    let (mut psi, _) = prepare_left_state(Arc::clone(&base.grid), &base.params)?;
    let schedule = PulseSchedule::single(pulse)?;
    let mut prop = Propagator::new(Arc::clone(&base.grid), base.params);
    let steps = (schedule.total_time() / base.d_tau).round() as usize;
    let dt = schedule.total_time() / steps as f64;
    for k in 0..steps {
        prop.step_real(psi.amplitudes_mut(), k as f64 * dt, dt, &schedule)?;
    }
    let spectrum = lowest_eigenpairs(Arc::clone(&base.grid), base.params.e_0, &base.params, 4)?;
    let d = project_lr_basis(&psi, &spectrum)?;
    println!(
        "after one pulse: |c_L0|^2 = {:.4} |c_L1|^2 = {:.4} |c_R0|^2 = {:.4} |c_R1|^2 = {:.4} rest = {:.4}",
        d.c_l0.norm_sqr(),
        d.c_l1.norm_sqr(),
        d.c_r0.norm_sqr(),
        d.c_r1.norm_sqr(),
        d.residual_weight
    );

    let deltas: Vec<f64> = (0..=80).map(|k| 4.0 * duration + 0.25 * k as f64).collect();
    let result = run_two_pulse(&base, &pulse, &deltas, 0)?;
    for (dt, p) in result.delta_tau_values.iter().zip(&result.p_left_prime).step_by(2) {
        let bar = "#".repeat((p * 50.0).round() as usize);
        println!("{dt:7.2} {p:.4} {bar}");
    }
    let w = dominant_angular_frequency(&result.delta_tau_values, &result.p_left_prime, 0.3, 6.0);
    println!("dominant frequency {w:.4} K vs level spacing omega {:.4} K", result.omega_reference);
    Ok(())
}
