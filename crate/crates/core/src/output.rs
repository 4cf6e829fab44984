//! CSV emission. Floats use the shortest decimal that round-trips; NaN is
//! written as `nan`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::envelope::EnvelopeFit;
use crate::error::{Error, Result};
use crate::observables::{DensityProfile, ObservableSample};
use crate::protocols::{SweepResult, TwoPulseResult};

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 || (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format_float(*v));
    }
    out.push('\n');
}

pub fn timeseries_csv(samples: &[ObservableSample]) -> String {
    let mut s = String::from("tau,p_left,norm,energy\n");
    for x in samples {
        row(&mut s, &[x.tau, x.p_left, x.norm, x.energy]);
    }
    s
}

pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut s = String::from("amplitude,tau0,p_left,energy,fidelity\n");
    for (i, &a) in sweep.a_values.iter().enumerate() {
        for (j, &t) in sweep.tau0_values.iter().enumerate() {
            let k = i * sweep.cols() + j;
            row(&mut s, &[a, t, sweep.p_left[k], sweep.energy[k], sweep.fidelity[k]]);
        }
    }
    s
}

/// First row holds the durations (after an empty corner cell), first column
/// the amplitudes, body the final left-well probability.
pub fn sweep_matrix_csv(sweep: &SweepResult) -> String {
    let mut s = String::new();
    for t in &sweep.tau0_values {
        s.push(',');
        s.push_str(&format_float(*t));
    }
    s.push('\n');
    for (i, &a) in sweep.a_values.iter().enumerate() {
        s.push_str(&format_float(a));
        for v in sweep.p_left_row(i) {
            s.push(',');
            s.push_str(&format_float(*v));
        }
        s.push('\n');
    }
    s
}

pub fn twopulse_csv(result: &TwoPulseResult) -> String {
    let mut s = String::from("delta_tau,p_left_prime\n");
    for (d, p) in result.delta_tau_values.iter().zip(&result.p_left_prime) {
        row(&mut s, &[*d, *p]);
    }
    s
}

pub fn profiles_csv(profiles: &[DensityProfile]) -> String {
    let mut s = String::from("tau,x,density\n");
    for p in profiles {
        for (j, d) in p.density.iter().enumerate() {
            row(&mut s, &[p.tau, p.grid.x(j), *d]);
        }
    }
    s
}

pub fn fit_csv(fit: &EnvelopeFit) -> String {
    let mut s = String::from("a1,a2,t_d,rms_residual,n_extrema_used\n");
    let _ = writeln!(
        s,
        "{},{},{},{},{}",
        format_float(fit.a1),
        format_float(fit.a2),
        format_float(fit.t_d),
        format_float(fit.rms_residual),
        fit.n_extrema_used
    );
    s
}

/// Parses `t,y` rows; a non-numeric first line is treated as a header.
pub fn parse_xy_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut t = Vec::new();
    let mut y = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let parsed = match (cols.next(), cols.next()) {
            (Some(a), Some(b)) => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((a, b)) => {
                t.push(a);
                y.push(b);
            }
            None if idx == 0 => continue,
            None => {
                return Err(Error::invalid(
                    "data",
                    format!("line {}: expected two numeric columns, got `{line}`", idx + 1),
                ))
            }
        }
    }
    Ok((t, y))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| Error::Io { path, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn special_values() {
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-41.5), "-41.5");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1e-20), "1e-20");
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn xy_parsing() {
        let (t, y) = parse_xy_csv("delta_tau,p_left_prime\n1,0.5\n2, 0.25\n\n").unwrap();
        assert_eq!(t, vec![1.0, 2.0]);
        assert_eq!(y, vec![0.5, 0.25]);
        assert!(parse_xy_csv("1,2\nx,y\n").is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let back: f64 = format_float(v).parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
