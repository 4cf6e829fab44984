//! Final left-well probability over a grid of pulse amplitudes and durations,
//! rendered as a text grayscale map (darker = more amplitude left behind).
//! Uses a coarser grid than the defaults to stay quick.
//!
//! ```bash
//! cargo run --release --example amplitude_sweep
//! ```

use std::sync::Arc;

use fluxpulse::protocols::{run_sweep, RunConfig};
use fluxpulse::Grid;

fn main() -> fluxpulse::Result<()> {
    let mut base = RunConfig::single_pulse(0.59, 5.0)?;
    base.grid = Arc::new(Grid::new(0.75, 513)?);
    base.d_tau = 0.004;

    let a_values: Vec<f64> = (0..11).map(|k| 0.45 + 0.04 * k as f64).collect();
    let tau0_values: Vec<f64> = (0..20).map(|k| 2.0 + 2.0 * k as f64).collect();
    let sweep = run_sweep(&base, &a_values, &tau0_values, 0)?;

    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    print!("   A \\ tau0 ");
    for t in &tau0_values {
        print!("{:>3}", *t as i64);
    }
    println!();
    for (i, a) in a_values.iter().enumerate() {
        print!("   {a:.2}     ");
        for &p in sweep.p_left_row(i) {
            let c = if p.is_nan() { '?' } else { shades[((p * 9.0).round() as usize).min(9)] };
            print!("  {c}");
        }
        println!();
    }
    println!("{} failed cells", sweep.failures.len());
    Ok(())
}
