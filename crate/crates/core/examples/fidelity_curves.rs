//! Left-well probability and excitation energy against pulse duration for
//! one amplitude just below and one just above the critical value.
//!
//! ```bash
//! cargo run --release --example fidelity_curves
//! ```

use fluxpulse::model::a_critical;
use fluxpulse::observables::energy_ratio;
use fluxpulse::protocols::{run_single_pulse, RunConfig};
use fluxpulse::PhysicalParams;

fn main() -> fluxpulse::Result<()> {
    println!("A_cr = {:.4}", a_critical(&PhysicalParams::default()));
    println!("{:>6} | {:>8} {:>9} {:>8} | {:>8} {:>9} {:>8}", "tau0", "P_L", "E/|E_g|", "F", "P_L", "E/|E_g|", "F");
    println!("{:>6} | {:^27} | {:^27}", "", "A = 0.53", "A = 0.59");
    for tau0 in [2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0] {
        let mut line = format!("{tau0:>6.1} |");
        for a in [0.53, 0.59] {
            let mut config = RunConfig::single_pulse(a, tau0)?;
            config.d_tau = 0.004;
            let run = run_single_pulse(&config)?;
            line.push_str(&format!(
                " {:>8.4} {:>9.4} {:>8.1} |",
                run.final_p_left,
                energy_ratio(run.final_energy, run.e_ground),
                run.fidelity
            ));
        }
        println!("{}", line.trim_end_matches('|'));
    }
    Ok(())
}
