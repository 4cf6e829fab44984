//! Decoherence-time extraction from two-pulse oscillation data: pick the
//! envelope extrema, then least-squares fit `a1 + a2 exp(-t / t_d)`.

use crate::error::{Error, Result};

/// Number of log-spaced `t_d` candidates in the coarse scan.
pub const SCAN_CANDIDATES: usize = 200;

/// Upper end of the scan bracket, in units of the data span.
pub const SCAN_SPAN_FACTOR: f64 = 100.0;

const GOLDEN_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationSeries {
    t: Vec<f64>,
    y: Vec<f64>,
}

impl OscillationSeries {
    /// `t` must be strictly increasing and every value finite; `y` in `[0, 1]`.
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::invalid(
                "series",
                format!("{} times but {} values", t.len(), y.len()),
            ));
        }
        if t.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("series", "non-finite entry"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("series", "times must be strictly increasing"));
        }
        if let Some(v) = y.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid("series", format!("value {v} outside [0, 1]")));
        }
        Ok(Self { t, y })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeSide {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    pub a1: f64,
    pub a2: f64,
    pub t_d: f64,
    pub rms_residual: f64,
    pub n_extrema_used: usize,
    /// False when the best `t_d` sits on the edge of the scan bracket or the
    /// data carry no decay (`a2` negligible).
    pub identifiable: bool,
}

/// Indices of interior strict local extrema. A run of equal values counts
/// once, at its middle index.
fn extremum_indices(y: &[f64], side: EnvelopeSide) -> Vec<usize> {
    let above = |a: f64, b: f64| match side {
        EnvelopeSide::Upper => a > b,
        EnvelopeSide::Lower => a < b,
    };
    let mut out = Vec::new();
    let n = y.len();
    let mut i = 1;
    while i + 1 < n {
        if above(y[i], y[i - 1]) {
            let mut k = i;
            while k + 1 < n && y[k + 1] == y[i] {
                k += 1;
            }
            if k + 1 < n && above(y[i], y[k + 1]) {
                out.push((i + k) / 2);
            }
            i = k + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Interior local maxima (upper) or minima (lower) of the series.
pub fn extract_envelope(series: &OscillationSeries, side: EnvelopeSide) -> Result<OscillationSeries> {
    let idx = extremum_indices(&series.y, side);
    if idx.len() < 3 {
        return Err(Error::FitUnderdetermined(format!(
            "found {} interior extrema, need at least 3",
            idx.len()
        )));
    }
    Ok(OscillationSeries {
        t: idx.iter().map(|&i| series.t[i]).collect(),
        y: idx.iter().map(|&i| series.y[i]).collect(),
    })
}

/// Shape of the decaying part of an envelope model `a1 + a2 * g(t; scale)`.
/// `g` must equal 1 at `t = 0` and be positive.
pub trait DecayShape {
    fn shape(&self, t: f64, scale: f64) -> f64;
}

/// `g(t; t_d) = exp(-t / t_d)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialDecay;

impl DecayShape for ExponentialDecay {
    fn shape(&self, t: f64, scale: f64) -> f64 {
        (-t / scale).exp()
    }
}

/// Linear least squares for `(a1, a2)` at fixed scale, with time measured
/// from `t0`. Returns `(a1, a2, sse)`.
fn linear_fit(model: &impl DecayShape, t: &[f64], y: &[f64], t0: f64, scale: f64) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let g: Vec<f64> = t.iter().map(|&ti| model.shape(ti - t0, scale)).collect();
    let g_mean = g.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (gi, yi) in g.iter().zip(y) {
        sxx += (gi - g_mean) * (gi - g_mean);
        sxy += (gi - g_mean) * (yi - y_mean);
    }
    let a2 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a1 = y_mean - a2 * g_mean;
    let sse = g
        .iter()
        .zip(y)
        .map(|(gi, yi)| {
            let r = yi - a1 - a2 * gi;
            r * r
        })
        .sum();
    (a1, a2, sse)
}

/// Least-squares fit of `a1 + a2 * g(t; scale)` to envelope points: coarse
/// log-spaced scan over the scale, then golden-section refinement between
/// the neighbours of the best candidate.
pub fn fit_envelope(model: &impl DecayShape, envelope: &OscillationSeries) -> Result<EnvelopeFit> {
    let (t, y) = (envelope.t(), envelope.y());
    if t.len() < 3 {
        return Err(Error::FitUnderdetermined(format!(
            "{} envelope points, need at least 3",
            t.len()
        )));
    }
    let t0 = t[0];
    let span = t[t.len() - 1] - t0;
    if !(span > 0.0) {
        return Err(Error::FitUnderdetermined("all times are equal".into()));
    }
    let min_step = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let (lo, hi) = (min_step.ln(), (SCAN_SPAN_FACTOR * span).ln());
    let candidates: Vec<f64> = (0..SCAN_CANDIDATES)
        .map(|k| (lo + (hi - lo) * k as f64 / (SCAN_CANDIDATES - 1) as f64).exp())
        .collect();
    let sse_at = |scale: f64| linear_fit(model, t, y, t0, scale).2;
    let (best, _) = candidates
        .iter()
        .map(|&s| sse_at(s))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, e)| if e < acc.1 { (k, e) } else { acc });
    let on_edge = best == 0 || best == SCAN_CANDIDATES - 1;

    // Golden section in log(scale).
    let mut a = candidates[best.saturating_sub(1)].ln();
    let mut b = candidates[(best + 1).min(SCAN_CANDIDATES - 1)].ln();
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (sse_at(c.exp()), sse_at(d.exp()));
    for _ in 0..GOLDEN_ITERATIONS {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = sse_at(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = sse_at(d.exp());
        }
    }
    let mut scale = (0.5 * (a + b)).exp();
    if sse_at(candidates[best]) < sse_at(scale) {
        scale = candidates[best];
    }
    let (a1, a2_shifted, sse) = linear_fit(model, t, y, t0, scale);
    // Undo the time shift: a2 g(t - t0) = a2_shifted / g(t0) * g(t) for the exponential family.
    let a2 = a2_shifted / model.shape(t0, scale);
    let y_scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    Ok(EnvelopeFit {
        a1,
        a2,
        t_d: scale,
        rms_residual: (sse / t.len() as f64).sqrt(),
        n_extrema_used: t.len(),
        identifiable: !on_edge && a2_shifted.abs() > 1e-8 * y_scale,
    })
}

/// Fit of the exponential envelope `a1 + a2 exp(-t / t_d)`.
pub fn fit_exponential(envelope: &OscillationSeries) -> Result<EnvelopeFit> {
    fit_envelope(&ExponentialDecay, envelope)
}

/// `baseline + amplitude * exp(-t / t_d) * cos(omega t)`. `t_d` may be
/// `f64::INFINITY` for an undamped signal.
pub fn synth_decohered_signal(
    omega: f64,
    t_d: f64,
    baseline: f64,
    amplitude: f64,
    t_values: &[f64],
) -> Result<OscillationSeries> {
    if !(amplitude >= 0.0 && amplitude + baseline <= 1.0 && baseline - amplitude >= 0.0) {
        return Err(Error::invalid(
            "amplitude",
            format!("need 0 <= baseline - amplitude and baseline + amplitude <= 1, got baseline {baseline}, amplitude {amplitude}"),
        ));
    }
    if !(t_d > 0.0) || !omega.is_finite() {
        return Err(Error::invalid("t_d", format!("must be > 0, got {t_d}")));
    }
    let y = t_values
        .iter()
        .map(|&t| baseline + amplitude * (-t / t_d).exp() * (omega * t).cos())
        .collect();
    OscillationSeries::new(t_values.to_vec(), y)
}

/// Upper-envelope extraction followed by the exponential fit.
pub fn fit_decoherence(series: &OscillationSeries) -> Result<EnvelopeFit> {
    fit_exponential(&extract_envelope(series, EnvelopeSide::Upper)?)
}
