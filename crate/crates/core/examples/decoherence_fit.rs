//! Decoherence-time extraction: a synthetic decaying two-pulse signal with
//! added noise, its upper envelope, and the exponential fit.
//!
//! ```bash
//! cargo run --release --example decoherence_fit
//! ```

use fluxpulse::envelope::{extract_envelope, fit_exponential, synth_decohered_signal, EnvelopeSide, OscillationSeries};
use fluxpulse::model::tau_to_picoseconds;

fn main() -> fluxpulse::Result<()> {
    let (omega, t_d) = (2.19, 100.0);
    let t: Vec<f64> = (0..=2000).map(|k| 0.25 * k as f64).collect();
    let clean = synth_decohered_signal(omega, t_d, 0.5, 0.4, &t)?;

    // Deterministic pseudo-noise of amplitude 0.01.
    let noisy: Vec<f64> = clean
        .y()
        .iter()
        .enumerate()
        .map(|(k, y)| y + 0.01 * (2.0 * ((k as f64 * 0.754_877_666).fract()) - 1.0))
        .collect();
    let series = OscillationSeries::new(t, noisy)?;

    let envelope = extract_envelope(&series, EnvelopeSide::Upper)?;
    let fit = fit_exponential(&envelope)?;
    println!("{} envelope points", envelope.len());
    println!(
        "fit: a1 = {:.4}, a2 = {:.4}, t_d = {:.2} ({:.0} ps), rms = {:.2e}",
        fit.a1,
        fit.a2,
        fit.t_d,
        tau_to_picoseconds(fit.t_d),
        fit.rms_residual
    );
    println!("true t_d = {t_d}, relative error {:.2}%", 100.0 * (fit.t_d / t_d - 1.0));
    Ok(())
}
