use cavity_cooling::linres;
use cavity_cooling::{CouplingSums, SystemParams};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cavcool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavcool"))
        .args(args)
        .output()
        .unwrap()
}

fn without_wall_clock(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with("# wall_clock_unix: "))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn verify_passes_with_defaults() {
    let out = cavcool(&["verify"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_rows(&text);
    assert!(rows.len() >= 8);
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"));
}

#[test]
fn verify_reports_failure_with_exit_two() {
    // detuning on the zero-friction contour of the closed form
    let p = SystemParams::default();
    let z = std::f64::consts::FRAC_PI_4;
    let sums = CouplingSums::from_modes(&[3.0 * z.cos()], &[-3.0 * z.sin()]);
    let beta = |dc: f64| linres::friction(&p.with_detunings(-3.0, dc), &sums);
    let grid: Vec<f64> = (0..=200).map(|i| -10.0 + 0.1 * i as f64).collect();
    let (mut lo, mut hi) = grid
        .windows(2)
        .map(|w| (w[0], w[1]))
        .find(|&(a, b)| beta(a).signum() != beta(b).signum())
        .expect("sign change of friction");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta(mid).signum() == beta(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let set = format!("delta_c={lo}");
    let out = cavcool(&["verify", "--set", &set]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("friction"));
}

#[test]
fn csv_is_byte_identical_apart_from_wall_clock() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "map".to_string(),
            "--set".into(),
            "kappa=10".into(),
            "--set".into(),
            "g_single=0.5".into(),
            "--da-n".into(),
            "9".into(),
            "--dc-n".into(),
            "7".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    let run = |p: &Path, threads: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_cavcool"))
            .args(args(p))
            .env("RAYON_NUM_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
    };
    run(&a, "1");
    run(&b, "3");
    let (ta, tb) = (read(&a), read(&b));
    assert_ne!(without_wall_clock(&ta), "");
    assert_eq!(
        without_wall_clock(&ta).replace("a.csv", "b.csv"),
        without_wall_clock(&tb)
    );
    assert!(ta.lines().any(|l| l.starts_with("# wall_clock_unix: ")));
    assert!(!dir.path().join("a.csv.partial").exists());
}

#[test]
fn bad_cavity_map_sign_pattern() {
    let out = cavcool(&[
        "map",
        "--set",
        "kappa=10",
        "--set",
        "g_single=0.5",
        "--da-min",
        "-5",
        "--da-max",
        "5",
        "--da-n",
        "3",
        "--dc-min",
        "-5",
        "--dc-max",
        "5",
        "--dc-n",
        "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("delta_a,delta_c,beta"));
    let rows = data_rows(&text);
    let beta_at = |da: &str, dc: &str| -> f64 {
        let r = rows.iter().find(|r| r[0] == da && r[1] == dc).unwrap();
        r[2].parse().unwrap()
    };
    assert!(beta_at("-5.0000000000000000e0", "-5.0000000000000000e0") < 0.0);
    assert!(beta_at("5.0000000000000000e0", "5.0000000000000000e0") > 0.0);
}

#[test]
fn modes_scan_doubling_points() {
    let out = cavcool(&[
        "modes-scan",
        "--set",
        "kappa=0.1",
        "--set",
        "g_single=0.3",
        "--n-list",
        "0,1,2,4,8",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\nN,g_eff,T,N_ph,"));
    let temps: Vec<f64> = data_rows(&text)
        .iter()
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(temps.len(), 5);
    assert!(temps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn config_file_and_overrides_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# bad cavity\nkappa = 10\ng_single = 0.5\n[simulate]\nseed = 42\n",
    )
    .unwrap();
    let out = cavcool(&[
        "coeffs",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "delta_a=-5",
        "--z",
        "0.5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in [
        "# kappa = 10.0",
        "# delta_a = -5.0",
        "# seed: 42",
        "# arg.z = 0.5",
        "# subcommand: coeffs",
    ] {
        assert!(text.contains(line), "missing {line}");
    }
}

#[test]
fn validation_errors_exit_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("scan.csv");
    let target_str = target.to_str().unwrap();
    for args in [
        vec!["map", "--set", "no_such_key=1", "--out", target_str],
        vec!["map", "--set", "kappa=-1", "--out", target_str],
        vec!["position-scan", "--delta-diff", "5", "--out", target_str],
        vec!["map", "--no-such-flag"],
        vec!["simulate", "--set", "simulate.dt=1e9", "--out", target_str],
    ] {
        let out = cavcool(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
        assert!(!target.exists());
        assert!(!dir.path().join("scan.csv.partial").exists());
    }
}

#[test]
fn simulate_writes_time_series() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("sim.csv");
    let out = cavcool(&[
        "simulate",
        "--set",
        "eta=0.5",
        "--set",
        "recoil_freq=0.02",
        "--set",
        "simulate.dt=0.5",
        "--set",
        "simulate.n_steps=400",
        "--set",
        "simulate.n_trajectories=50",
        "--set",
        "simulate.sample_every=100",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = read(&target);
    assert!(text.contains("\nt,p2_mean,p2_stderr\n"));
    assert_eq!(data_rows(&text).len(), 5);
    assert!(text.contains("# temperature: "));
}
