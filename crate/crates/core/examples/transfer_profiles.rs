//! Probability-density snapshots during a fast over-barrier transfer.
//!
//! ```bash
//! cargo run --release --example transfer_profiles
//! ```

use fluxpulse::protocols::{snapshot_run, RunConfig};

fn main() -> fluxpulse::Result<()> {
    let (amplitude, duration) = (0.59, 5.1);
    let mut config = RunConfig::single_pulse(amplitude, duration)?;
    let center = config.schedule.pulses()[0].center();
    config.profile_times = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|k| center + k * duration).collect();
    let run = snapshot_run(&config)?;

    for profile in &run.profiles {
        let peak = profile.density.iter().cloned().fold(0.0, f64::max);
        println!("tau = {:6.2}   density maximum at x = {:+.4}", profile.tau, profile.peak_position());
        // 60-column strip chart over [-x_max, x_max].
        let n = profile.density.len();
        let strip: String = (0..60)
            .map(|c| {
                let j = c * (n - 1) / 59;
                match profile.density[j] / peak {
                    v if v > 0.66 => '#',
                    v if v > 0.33 => '+',
                    v if v > 0.05 => '.',
                    _ => ' ',
                }
            })
            .collect();
        println!("  |{strip}|");
    }
    println!("final P_L = {:.4}", run.final_p_left);
    Ok(())
}
