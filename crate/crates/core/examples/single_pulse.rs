//! One Gaussian dip of the Josephson energy applied to the left-well state.
//!
//! ```bash
//! cargo run --release --example single_pulse -- 0.59 5
//! ```

use fluxpulse::model::tau_to_picoseconds;
use fluxpulse::observables::energy_ratio;
use fluxpulse::protocols::{run_single_pulse, RunConfig};

fn main() -> fluxpulse::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let amplitude = args.first().copied().unwrap_or(0.59);
    let duration = args.get(1).copied().unwrap_or(5.0);

    let config = RunConfig::single_pulse(amplitude, duration)?;
    let run = run_single_pulse(&config)?;

    println!(
        "A = {amplitude}, tau0 = {duration} ({:.1} ps), run length {:.1} ({:.1} ps)",
        tau_to_picoseconds(duration),
        config.schedule.total_time(),
        tau_to_picoseconds(config.schedule.total_time())
    );
    for s in run.samples.iter().step_by(run.samples.len().div_ceil(12).max(1)) {
        println!("  tau = {:7.2}  P_L = {:.4}  <H> = {:9.4} K", s.tau, s.p_left, s.energy);
    }
    println!("final P_L       = {:.5}", run.final_p_left);
    println!("final energy    = {:.4} K (ground {:.4} K)", run.final_energy, run.e_ground);
    println!("E / |E_g|       = {:.4}", energy_ratio(run.final_energy, run.e_ground));
    println!("fidelity factor = {:.2}", run.fidelity);
    Ok(())
}
