//! Flat INI-style experiment configuration.
//!
//! ```ini
//! [params]
//! e_c = 0.009
//! [pulse]
//! amplitude = 0.59
//! duration = 5
//! ```
//!
//! Every key is optional; missing keys take the defaults below. The resolved
//! configuration is written next to the outputs and parses back to the same
//! value.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{PhysicalParams, PulseSchedule, PulseSpec, DEFAULT_CENTER_IN_DURATIONS};
use crate::output::format_float;
use crate::protocols::RunConfig;
use crate::solver::{RelaxOptions, DEFAULT_D_TAU};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepRange {
    /// `steps` evenly spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|k| self.min + (self.max - self.min) * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: PhysicalParams,
    pub x_max: f64,
    pub n_points: usize,
    pub d_tau: f64,
    pub amplitude: f64,
    pub duration: f64,
    pub center: f64,
    pub sweep_a: SweepRange,
    pub sweep_tau0: SweepRange,
    pub delta: SweepRange,
    pub directory: PathBuf,
    pub sample_every: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        parse_str("", Path::new("<defaults>")).expect("empty config is valid")
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("params", &["e_c", "e_l", "e_0"]),
    ("grid", &["x_max", "n_points", "d_tau"]),
    ("pulse", &["amplitude", "duration", "center"]),
    ("sweep", &["a_min", "a_max", "a_steps", "tau0_min", "tau0_max", "tau0_steps"]),
    ("twopulse", &["delta_min", "delta_max", "delta_steps"]),
    ("output", &["directory", "sample_every"]),
];

struct RawEntry {
    value: String,
    line: usize,
}

struct Raw<'a> {
    path: &'a Path,
    entries: BTreeMap<String, RawEntry>,
}

impl Raw<'_> {
    fn syntax(&self, line: usize, message: impl Into<String>) -> Error {
        Error::ConfigSyntax {
            path: self.path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    fn float(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(e) => {
                let v: f64 = e
                    .value
                    .parse()
                    .map_err(|_| self.syntax(e.line, format!("`{key}`: `{}` is not a number", e.value)))?;
                if !v.is_finite() {
                    return Err(self.syntax(e.line, format!("`{key}` must be finite")));
                }
                Ok(v)
            }
        }
    }

    fn float_opt(&self, key: &str) -> Result<Option<f64>> {
        if self.entries.contains_key(key) {
            self.float(key, 0.0).map(Some)
        } else {
            Ok(None)
        }
    }

    fn integer(&self, key: &str, default: usize) -> Result<usize> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse()
                .map_err(|_| self.syntax(e.line, format!("`{key}`: `{}` is not a non-negative integer", e.value))),
        }
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_str(&text, path)
}

/// Parses config text; `path` is only used in error messages.
pub fn parse_str(text: &str, path: &Path) -> Result<ExperimentConfig> {
    let mut raw = Raw {
        path,
        entries: BTreeMap::new(),
    };
    let mut section: Option<&str> = None;
    for (idx, full) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = full.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| raw.syntax(line_no, "unterminated section header"))?
                .trim();
            let known = KEYS
                .iter()
                .find(|(s, _)| *s == name)
                .ok_or_else(|| Error::UnknownKey(format!("[{name}]")))?;
            section = Some(known.0);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| raw.syntax(line_no, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let sec = section.ok_or_else(|| raw.syntax(line_no, format!("key `{key}` before any section")))?;
        let allowed = KEYS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(Error::UnknownKey(format!("{sec}.{key}")));
        }
        let qualified = format!("{sec}.{key}");
        if raw.entries.contains_key(&qualified) {
            return Err(raw.syntax(line_no, format!("duplicate key `{qualified}`")));
        }
        raw.entries.insert(
            qualified,
            RawEntry {
                value: value.trim().to_string(),
                line: line_no,
            },
        );
    }
    resolve(&raw)
}

fn resolve(raw: &Raw<'_>) -> Result<ExperimentConfig> {
    let defaults = PhysicalParams::default();
    let params = PhysicalParams::new(
        raw.float("params.e_c", defaults.e_c)?,
        raw.float("params.e_l", defaults.e_l)?,
        raw.float("params.e_0", defaults.e_0)?,
    )?;
    let x_max = raw.float("grid.x_max", Grid::DEFAULT_X_MAX)?;
    let n_points = raw.integer("grid.n_points", Grid::DEFAULT_POINTS)?;
    Grid::new(x_max, n_points)?;
    let d_tau = raw.float("grid.d_tau", DEFAULT_D_TAU)?;
    if d_tau <= 0.0 {
        return Err(Error::invalid("d_tau", format!("must be > 0, got {d_tau}")));
    }

    let amplitude = raw.float("pulse.amplitude", 0.59)?;
    let duration = raw.float("pulse.duration", 5.0)?;
    let center = raw
        .float_opt("pulse.center")?
        .unwrap_or(DEFAULT_CENTER_IN_DURATIONS * duration);
    PulseSchedule::single(PulseSpec::new(amplitude, duration, center)?)?;

    let range = |prefix: &str, min: f64, max: f64, steps: usize, name: &'static str| -> Result<SweepRange> {
        let r = SweepRange {
            min: raw.float(&format!("{prefix}_min"), min)?,
            max: raw.float(&format!("{prefix}_max"), max)?,
            steps: raw.integer(&format!("{prefix}_steps"), steps)?,
        };
        if r.steps == 0 || r.max < r.min {
            return Err(Error::invalid(name, "need steps >= 1 and max >= min"));
        }
        Ok(r)
    };
    let sweep_a = range("sweep.a", 0.40, 0.90, 26, "sweep.a")?;
    let sweep_tau0 = range("sweep.tau0", 2.0, 40.0, 39, "sweep.tau0")?;
    if sweep_tau0.min <= 0.0 {
        return Err(Error::invalid("sweep.tau0", "durations must be > 0"));
    }
    let delta_min_default = 4.0 * duration;
    let delta = range("twopulse.delta", delta_min_default, delta_min_default + 40.0, 161, "twopulse.delta")?;
    if delta.min <= 0.0 {
        return Err(Error::invalid("twopulse.delta", "separations must be > 0"));
    }

    let directory = raw
        .entries
        .get("output.directory")
        .map(|e| PathBuf::from(&e.value))
        .unwrap_or_else(|| PathBuf::from("fluxpulse-out"));
    let sample_every = raw.integer("output.sample_every", 100)?;
    if sample_every == 0 {
        return Err(Error::invalid("sample_every", "must be >= 1"));
    }

    Ok(ExperimentConfig {
        params,
        x_max,
        n_points,
        d_tau,
        amplitude,
        duration,
        center,
        sweep_a,
        sweep_tau0,
        delta,
        directory,
        sample_every,
    })
}

impl ExperimentConfig {
    /// Fully resolved configuration in the input format.
    pub fn echo(&self) -> String {
        let f = format_float;
        let mut s = String::new();
        let p = &self.params;
        let _ = writeln!(s, "[params]\ne_c = {}\ne_l = {}\ne_0 = {}\n", f(p.e_c), f(p.e_l), f(p.e_0));
        let _ = writeln!(
            s,
            "[grid]\nx_max = {}\nn_points = {}\nd_tau = {}\n",
            f(self.x_max),
            self.n_points,
            f(self.d_tau)
        );
        let _ = writeln!(
            s,
            "[pulse]\namplitude = {}\nduration = {}\ncenter = {}\n",
            f(self.amplitude),
            f(self.duration),
            f(self.center)
        );
        let (a, t) = (&self.sweep_a, &self.sweep_tau0);
        let _ = writeln!(
            s,
            "[sweep]\na_min = {}\na_max = {}\na_steps = {}\ntau0_min = {}\ntau0_max = {}\ntau0_steps = {}\n",
            f(a.min),
            f(a.max),
            a.steps,
            f(t.min),
            f(t.max),
            t.steps
        );
        let d = &self.delta;
        let _ = writeln!(
            s,
            "[twopulse]\ndelta_min = {}\ndelta_max = {}\ndelta_steps = {}\n",
            f(d.min),
            f(d.max),
            d.steps
        );
        let _ = write!(
            s,
            "[output]\ndirectory = {}\nsample_every = {}\n",
            self.directory.display(),
            self.sample_every
        );
        s
    }

    pub fn pulse(&self) -> Result<PulseSpec> {
        PulseSpec::new(self.amplitude, self.duration, self.center)
    }

    /// Single-pulse run configuration.
    pub fn run_config(&self) -> Result<RunConfig> {
        Ok(RunConfig {
            params: self.params,
            grid: Arc::new(Grid::new(self.x_max, self.n_points)?),
            d_tau: self.d_tau,
            schedule: PulseSchedule::single(self.pulse()?)?,
            sample_every: self.sample_every,
            profile_times: Vec::new(),
            relax: RelaxOptions::default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        parse_str(text, Path::new("test.ini"))
    }

    #[test]
    fn minimal_pulse_section_fills_defaults() {
        let c = parse("[pulse]\namplitude = 0.59\nduration = 5\n").unwrap();
        assert_eq!(c.params, PhysicalParams::default());
        assert_eq!(c.center, 20.0);
        assert_eq!(c.n_points, 1025);
        assert_eq!(c.d_tau, 0.002);
    }

    #[test]
    fn negative_e0_names_the_key() {
        let err = parse("[params]\ne_0 = -1\n").unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "e_0", .. }), "{err}");
    }

    #[test]
    fn unknown_keys_and_sections_are_rejected() {
        assert!(matches!(parse("[pulse]\nwidth = 3\n"), Err(Error::UnknownKey(k)) if k == "pulse.width"));
        assert!(matches!(parse("[extra]\n"), Err(Error::UnknownKey(_))));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        match parse("# comment\n[grid]\nx_max = abc\n") {
            Err(Error::ConfigSyntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse("[grid]\nx_max 0.7\n") {
            Err(Error::ConfigSyntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse("[grid]\nd_tau = inf\n").is_err());
        assert!(parse("[grid]\nx_max = 0.8\nx_max = 0.9\n").is_err());
        assert!(parse("e_c = 1\n").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let c = parse(
            "[params]\ne_c = 0.0123\n[pulse]\namplitude = 0.61\nduration = 3.3 ; inline\n[sweep]\na_steps = 4\n[output]\ndirectory = some dir/x\n",
        )
        .unwrap();
        let again = parse(&c.echo()).unwrap();
        assert_eq!(c, again);
        assert_eq!(again.echo(), c.echo());
    }

    #[test]
    fn sweep_ranges() {
        let r = SweepRange { min: 0.45, max: 0.85, steps: 5 };
        let v = r.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.45);
        assert_eq!(v[4], 0.85);
        assert_eq!(SweepRange { min: 1.0, max: 2.0, steps: 1 }.values(), vec![1.0]);
    }

    #[test]
    fn missing_file() {
        assert!(matches!(parse_config(Path::new("/nonexistent/x.ini")), Err(Error::Io { .. })));
    }
}
