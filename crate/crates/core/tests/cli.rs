use std::fs;
use std::path::Path;
use std::process::Command;

use fluxpulse::envelope::synth_decohered_signal;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fluxpulse"))
}

const SMALL: &str = "[grid]\nn_points = 257\nd_tau = 0.005\n[pulse]\namplitude = 0.62\nduration = 1.5\n\
[sweep]\na_min = 0.5\na_max = 0.7\na_steps = 2\ntau0_min = 1\ntau0_max = 2\ntau0_steps = 3\n\
[twopulse]\ndelta_min = 6\ndelta_max = 7\ndelta_steps = 3\n[output]\nsample_every = 50\n";

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.ini");
    fs::write(&path, text).unwrap();
    path
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    bin()
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn every_subcommand_writes_its_files() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMALL);
    let cases: [(&str, &[(&str, &str)]); 5] = [
        ("relax", &[("profiles.csv", "tau,x,density")]),
        ("pulse", &[("timeseries.csv", "tau,p_left,norm,energy")]),
        ("sweep", &[("sweep.csv", "amplitude,tau0,p_left,energy,fidelity")]),
        ("twopulse", &[("twopulse.csv", "delta_tau,p_left_prime")]),
        ("profile", &[("profiles.csv", "tau,x,density"), ("timeseries.csv", "tau,p_left,norm,energy")]),
    ];
    for (sub, files) in cases {
        let out = tmp.path().join(sub);
        let o = run(sub, &config, &out, &["--jobs", "2"]);
        assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8(o.stdout).unwrap();
        assert_eq!(stdout.lines().count(), 1, "{sub}: {stdout}");
        assert!(stdout.starts_with(sub));
        for (name, head) in files {
            assert_eq!(header(&out.join(name)), *head, "{sub}/{name}");
        }
        assert!(out.join("resolved_config.ini").exists());
    }

    let matrix = fs::read_to_string(tmp.path().join("sweep/sweep_matrix.csv")).unwrap();
    let lines: Vec<&str> = matrix.lines().collect();
    assert_eq!(lines[0], ",1,1.5,2");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.5,"));
    assert_eq!(lines[2].split(',').count(), 4);
    let sweep = fs::read_to_string(tmp.path().join("sweep/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 6);
    assert!(sweep.ends_with('\n'));
}

#[test]
fn outputs_are_byte_identical_across_runs_jobs_and_echo() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    assert!(run("sweep", &config, &a, &["--jobs", "1"]).status.success());
    assert!(run("sweep", &config, &b, &["--jobs", "4"]).status.success());
    // Re-run from the echoed config; it names its own output directory, so override.
    assert!(run("sweep", &a.join("resolved_config.ini"), &c, &[]).status.success());
    for name in ["sweep.csv", "sweep_matrix.csv"] {
        let first = fs::read(a.join(name)).unwrap();
        assert_eq!(first, fs::read(b.join(name)).unwrap(), "{name}");
        assert_eq!(first, fs::read(c.join(name)).unwrap(), "{name}");
    }
    // Echoes agree apart from the overridden output directory.
    let settings = |dir: &Path| -> Vec<String> {
        fs::read_to_string(dir.join("resolved_config.ini"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("directory"))
            .map(str::to_string)
            .collect()
    };
    assert_eq!(settings(&a), settings(&c));
}

#[test]
fn fit_recovers_synthetic_decay_time() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "");
    let t: Vec<f64> = (0..=4000).map(|k| 0.1 * k as f64).collect();
    let s = synth_decohered_signal(1.0, 100.0, 0.5, 0.4, &t).unwrap();
    let mut csv = String::from("t,y\n");
    for (t, y) in s.t().iter().zip(s.y()) {
        csv.push_str(&format!("{t},{y}\n"));
    }
    let data = tmp.path().join("signal.csv");
    fs::write(&data, csv).unwrap();
    let out = tmp.path().join("fit");
    let o = run("fit", &config, &out, &["--data", data.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let body = fs::read_to_string(out.join("fit.csv")).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), "a1,a2,t_d,rms_residual,n_extrema_used");
    let t_d: f64 = lines.next().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((t_d - 100.0).abs() < 5.0, "t_d = {t_d}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    let bad = write_config(tmp.path(), "[params]\ne_0 = -1\n");
    let o = run("relax", &bad, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("e_0"));

    let unknown = tmp.path().join("unknown.ini");
    fs::write(&unknown, "[grid]\nspacing = 3\n").unwrap();
    assert_eq!(run("relax", &unknown, &out, &[]).status.code(), Some(2));
    assert_eq!(run("relax", &tmp.path().join("missing.ini"), &out, &[]).status.code(), Some(2));

    let fine = tmp.path().join("fine.ini");
    fs::write(&fine, "").unwrap();
    let flat = tmp.path().join("flat.csv");
    fs::write(&flat, "t,y\n0,0.1\n1,0.2\n2,0.3\n3,0.4\n").unwrap();
    let o = run("fit", &fine, &out, &["--data", flat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    assert_eq!(bin().arg("bogus").output().unwrap().status.code(), Some(2));
}

#[test]
fn numerical_failures_map_to_exit_code_three() {
    use fluxpulse::cli::{exit_code, EXIT_NUMERICAL};
    use fluxpulse::Error;
    assert_eq!(exit_code(&Error::NormDrift { tau: 1.0, norm: 1.1 }), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::RelaxationDiverged { steps: 1, last_energy: 0.0 }), 3);
    assert_eq!(exit_code(&Error::SingularSystem { row: 0 }), 3);
}
