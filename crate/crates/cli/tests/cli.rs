use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hokcov::simulate::simulate_field;
use hokcov::{CovarianceModel, Family, ParameterVector, Point};
use hokcov_cli::record::ModelRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn hokcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hokcov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = hokcov(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a synthetic dataset drawn from `model` at 150 random points.
fn synthetic_data(dir: &Path, model: &CovarianceModel, seed: u64) -> PathBuf {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let locs: Vec<Point> = (0..150)
        .map(|_| [rng.random::<f64>() * 20.0, rng.random::<f64>() * 20.0, 0.0])
        .collect();
    let values = simulate_field(model, &locs, 10.0, seed + 1).unwrap().values;
    let mut text = String::from("x,y,value\n");
    for (p, v) in locs.iter().zip(values) {
        text.push_str(&format!("{},{},{}\n", p[0], p[1], v));
    }
    let path = dir.join("data.csv");
    fs::write(&path, text).unwrap();
    path
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn empvario_three_points() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("three.csv");
    fs::write(&data, "x,y,value\n0,0,0\n1,0,1\n2,0,0\n").unwrap();
    ok(&[
        "empvario",
        "--input",
        s(&data),
        "--n-bins",
        "2",
        "--max-lag",
        "2",
        "--output",
        s(dir.path()),
    ]);
    let (header, rows) = read_csv(&dir.path().join("empvario.csv"));
    assert_eq!(header, ["bin_center", "gamma_hat", "count"]);
    assert_eq!(rows, [["1", "0.5", "2"], ["2", "0", "1"]]);
}

#[test]
fn fit_record_reingested_by_eval_reproduces_q() {
    let dir = tempfile::tempdir().unwrap();
    let truth =
        CovarianceModel::new(Family::SineCosine, ParameterVector::new(0.2, 1.0, 2.0)).unwrap();
    let data = synthetic_data(dir.path(), &truth, 5);
    let out = dir.path().join("fit");
    let report = ok(&[
        "fit",
        "--input",
        s(&data),
        "--nugget",
        "0.2",
        "--n-bins",
        "12",
        "--output",
        s(&out),
    ]);
    assert!(report.contains("Q = "), "{report}");
    let record = ModelRecord::load(&out.join("fit_model.txt")).unwrap();
    let q_fit = record.objective.unwrap();
    assert_eq!(record.params.nugget, 0.2);
    assert!(record.evaluations.unwrap() > 0);
    assert!(out.join("fit_trace.csv").exists());

    let eval_out = dir.path().join("eval");
    let stdout = ok(&[
        "eval",
        "--model",
        s(&out.join("fit_model.txt")),
        "--input",
        s(&data),
        "--n-bins",
        "12",
        "--output",
        s(&eval_out),
    ]);
    let q_line = stdout.lines().find(|l| l.starts_with("Q = ")).unwrap();
    let q_eval: f64 = q_line[4..].parse().unwrap();
    assert!((q_eval - q_fit).abs() <= 1e-12 * q_fit.max(1.0), "{q_eval} vs {q_fit}");
}

#[test]
fn fit_with_everything_fixed_echoes_theta() {
    let dir = tempfile::tempdir().unwrap();
    let truth =
        CovarianceModel::new(Family::HoleEffect, ParameterVector::new(0.1, 1.5, 1.0)).unwrap();
    let data = synthetic_data(dir.path(), &truth, 9);
    let report = ok(&[
        "fit",
        "--input",
        s(&data),
        "--family",
        "hole_effect",
        "--nugget",
        "0.1",
        "--sill",
        "1.5",
        "--range",
        "1",
        "--output",
        s(dir.path()),
    ]);
    assert!(report.contains("nugget = 0.1"));
    assert!(report.contains("sill = 1.5"));
    assert!(report.contains("range = 1\n"));
    let record = ModelRecord::load(&dir.path().join("fit_model.txt")).unwrap();
    assert_eq!(record.params, ParameterVector::new(0.1, 1.5, 1.0));
    assert!(record.objective.unwrap() >= 0.0);
}

#[test]
fn eval_sine_cosine_shape() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "eval",
        "--family",
        "sine_cosine",
        "--nugget",
        "0",
        "--sill",
        "1",
        "--range",
        "3",
        "--h-max",
        "20",
        "--n-h",
        "401",
        "--output",
        s(dir.path()),
    ]);
    let (header, rows) = read_csv(&dir.path().join("eval.csv"));
    assert_eq!(header, ["h", "covariance", "semivariogram"]);
    let h = col(&rows, 0);
    let g = col(&rows, 2);
    assert_eq!(h[0], 0.0);
    assert_eq!(*h.last().unwrap(), 20.0);
    assert_eq!(g[0], 0.0);
    // monotone rise to the first maximum, which overshoots the sill
    let peak = (1..g.len() - 1)
        .find(|&i| g[i] > g[i - 1] && g[i] >= g[i + 1])
        .expect("a first maximum");
    assert!(g[..=peak].windows(2).all(|w| w[1] > w[0]));
    assert!(g[peak] > 1.0);
    // on [0, 20] the curve turns back down after the overshoot
    assert!(*g.last().unwrap() < g[peak]);

    // a longer grid shows the damped oscillation about the sill
    ok(&[
        "eval", "--family", "sine_cosine", "--nugget", "0", "--sill", "1", "--range", "3",
        "--h-max", "120", "--n-h", "2401", "--output", s(dir.path()),
    ]);
    let (_, rows) = read_csv(&dir.path().join("eval.csv"));
    let g = col(&rows, 2);
    let extrema: Vec<f64> = (1..g.len() - 1)
        .filter(|&i| (g[i] - g[i - 1]) * (g[i + 1] - g[i]) < 0.0)
        .map(|i| g[i])
        .collect();
    assert!(extrema.len() >= 4, "{extrema:?}");
    let amplitude: Vec<f64> = extrema.iter().map(|v| (v - 1.0).abs()).collect();
    assert!(amplitude.windows(2).all(|w| w[1] < w[0]), "{amplitude:?}");
    assert!(extrema.windows(2).all(|w| (w[0] - 1.0) * (w[1] - 1.0) < 0.0));
}

#[test]
fn spacetime_surface_reflection_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["hole_effect", "sine_cosine", "bessel_c1"] {
        ok(&[
            "eval",
            "--family",
            family,
            "--s",
            "2",
            "--nugget",
            "0",
            "--sill",
            "1",
            "--range",
            "1.5",
            "--beta",
            "1",
            "--h-max",
            "6",
            "--n-h",
            "41",
            "--output",
            s(dir.path()),
        ]);
        let (header, rows) = read_csv(&dir.path().join("eval_spacetime.csv"));
        assert_eq!(header, ["h", "t", "covariance"]);
        let n = 41;
        assert_eq!(rows.len(), n * n);
        let c = col(&rows, 2);
        let at = |i: usize, j: usize| c[i * n + j];
        for i in 0..n {
            for j in 0..n {
                // (h, t) -> (t, h) and (h, t) -> (-h, -t) keep |h + t|
                assert_eq!(at(i, j), at(j, i), "{family}");
                assert_eq!(at(i, j), at(n - 1 - i, n - 1 - j), "{family}");
            }
        }
    }
}

#[test]
fn envelope_smoke_test_contains_self_generated_data() {
    let dir = tempfile::tempdir().unwrap();
    let truth =
        CovarianceModel::new(Family::SineCosine, ParameterVector::new(0.3, 1.0, 2.0)).unwrap();
    let data = synthetic_data(dir.path(), &truth, 21);
    let stdout = ok(&[
        "envelope",
        "--input",
        s(&data),
        "--family",
        "sine_cosine",
        "--nugget",
        "0.3",
        "--sill",
        "1",
        "--range",
        "2",
        "--n-bins",
        "10",
        "--seed",
        "4",
        "--output",
        s(dir.path()),
    ]);
    assert!(stdout.starts_with("contained = true"), "{stdout}");
    let (header, rows) = read_csv(&dir.path().join("envelope.csv"));
    assert_eq!(
        header,
        ["bin_center", "count", "observed", "lower", "upper", "contained"]
    );
    assert!(rows.iter().all(|r| r[5] == "true"));
    let svg = fs::read_to_string(dir.path().join("envelope.svg")).unwrap();
    assert!(svg.contains("<polygon") && svg.contains("</svg>"));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("pts.txt");
    fs::write(&data, "x y value\n0 0 1\n1 0 2\n0 1 3\n1 1 4\n").unwrap();
    let run = |seed: &str, out: &str| {
        let out = dir.path().join(out);
        ok(&[
            "simulate",
            "--input",
            s(&data),
            "--family",
            "hole_effect",
            "--nugget",
            "0.1",
            "--sill",
            "1",
            "--range",
            "1",
            "--n-sim",
            "3",
            "--seed",
            seed,
            "--output",
            s(&out),
        ]);
        fs::read_to_string(out.join("simulate.csv")).unwrap()
    };
    let a = run("7", "a");
    assert_eq!(a, run("7", "b"));
    assert_ne!(a, run("8", "c"));
    assert!(a.starts_with("replicate,x,y,value\n"));
    assert_eq!(a.lines().count(), 1 + 3 * 4);
}

#[test]
fn pdcheck_reports_each_seed() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "pdcheck",
        "--family",
        "bessel_c1",
        "--s",
        "3",
        "--nugget",
        "0",
        "--sill",
        "1",
        "--range",
        "1",
        "--pd-seeds",
        "3",
        "--seed",
        "10",
        "--output",
        s(dir.path()),
    ]);
    for seed in ["10,", "11,", "12,"] {
        assert!(stdout.lines().any(|l| l.starts_with(seed)), "{stdout}");
    }
    assert!(dir.path().join("pdcheck.txt").exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# test\nn_bins = 7\nfamily = hole_effect\nseed = 3\n").unwrap();
    let printed = ok(&[
        "fit",
        "--config",
        s(&cfg),
        "--n-bins",
        "9",
        "--print-config",
    ]);
    assert!(printed.contains("n_bins = 9"));
    assert!(printed.contains("family = hole_effect"));
    assert!(printed.contains("seed = 3"));
    // the printed form is itself a valid config that reproduces the run
    let again = dir.path().join("again.cfg");
    fs::write(&again, &printed).unwrap();
    assert_eq!(ok(&["fit", "--config", s(&again), "--print-config"]), printed);
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let o = hokcov(args);
    let stderr = String::from_utf8(o.stderr).unwrap();
    (o.status.code().unwrap(), stderr)
}

#[test]
fn exit_codes_and_error_lines() {
    let dir = tempfile::tempdir().unwrap();

    let (code, err) = exit_code(&["eval", "--family", "nope", "--output", s(dir.path())]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error[config]: "), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);

    let (code, _) = exit_code(&["eval", "--n-bins", "many"]);
    assert_eq!(code, 2);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "x,y,value\n0,0,1\n1,0,\n").unwrap();
    let (code, err) = exit_code(&["empvario", "--input", s(&bad), "--output", s(dir.path())]);
    assert_eq!(code, 3);
    assert!(err.starts_with("error[data]: ") && err.contains("row 3"), "{err}");

    let (code, _) = exit_code(&[
        "empvario",
        "--input",
        s(&dir.path().join("missing.csv")),
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(code, 3);

    // constant data: every bin has gamma_hat = 0, so the objective is undefined
    let flat = dir.path().join("flat.csv");
    fs::write(&flat, "x,y,value\n0,0,1\n1,0,1\n0,1,1\n1,1,1\n").unwrap();
    let (code, err) = exit_code(&[
        "eval",
        "--input",
        s(&flat),
        "--family",
        "hole_effect",
        "--nugget",
        "0",
        "--sill",
        "1",
        "--range",
        "1",
        "--max-lag",
        "2",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(code, 4, "{err}");
    assert!(err.starts_with("error[numerical]: "), "{err}");
}
