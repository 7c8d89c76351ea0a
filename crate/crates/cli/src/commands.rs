//! One function per subcommand. Each writes its files into the configured
//! output directory and returns a short summary for standard output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hokcov::covmodels::pd_diagnostic;
use hokcov::fit::{default_global_budget, fit_with, wls_objective, FitProblem, Stage};
use hokcov::simulate::{envelope_test, FieldSampler};
use hokcov::variogram::empirical_variogram;
use hokcov::{CovarianceModel, Dataset, ParamName, SpatioTemporalModel};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::ingest::{ingest, Columns};
use crate::record::ModelRecord;
use crate::svg::{self, Plot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Empvario,
    Fit,
    Eval,
    Simulate,
    Envelope,
    Pdcheck,
}

pub fn run(cfg: &RunConfig, command: Command) -> CliResult<String> {
    std::fs::create_dir_all(&cfg.output).map_err(|e| {
        CliError::config(format!(
            "cannot create output directory {}: {e}",
            cfg.output.display()
        ))
    })?;
    match command {
        Command::Empvario => empvario(cfg),
        Command::Fit => fit(cfg),
        Command::Eval => eval(cfg),
        Command::Simulate => simulate(cfg),
        Command::Envelope => envelope(cfg),
        Command::Pdcheck => pdcheck(cfg),
    }
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn out(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output.join(name)
}

pub fn load_data(cfg: &RunConfig) -> CliResult<Dataset> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::config("this command needs `input`"))?;
    let columns = Columns {
        x: cfg.x_column.clone(),
        y: cfg.y_column.clone(),
        z: cfg.z_column.clone(),
        value: cfg.value_column.clone(),
    };
    ingest(path, cfg.dim, &columns)
}

fn location_header(dim: usize) -> &'static str {
    ["x", "x,y", "x,y,z"][dim - 1]
}

fn empvario(cfg: &RunConfig) -> CliResult<String> {
    let data = load_data(cfg)?;
    let emp = empirical_variogram(&data, cfg.binning())?;
    let mut csv = String::from("bin_center,gamma_hat,count\n");
    for ((h, g), n) in emp.bin_centers().iter().zip(emp.estimates()).zip(emp.counts()) {
        let _ = writeln!(csv, "{h},{g},{n}");
    }
    let path = out(cfg, "empvario.csv");
    write(&path, &csv)?;
    Ok(format!(
        "{} points, {} non-empty bins of {} up to lag {}; wrote {}",
        data.len(),
        emp.len(),
        emp.n_bins(),
        emp.max_lag(),
        path.display()
    ))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn fit(cfg: &RunConfig) -> CliResult<String> {
    let data = load_data(cfg)?;
    let emp = empirical_variogram(&data, cfg.binning())?;
    let problem = cfg.fit_problem(&data, emp.clone())?;
    let budget = cfg
        .global_budget
        .unwrap_or_else(|| default_global_budget(&problem));
    let result = fit_with(&problem, budget, cfg.local_tol, cfg.local_max_evals)?;
    let theta = result.theta_hat;

    let record = ModelRecord {
        family: problem.family(),
        params: theta,
        beta: cfg.beta,
        objective: Some(result.objective),
        evaluations: Some(result.evaluations),
    };
    write(&out(cfg, "fit_model.txt"), &record.to_text())?;

    let mut trace = String::from("stage,nugget,sill,range,decay,Q\n");
    for e in &result.trace {
        let stage = match e.stage {
            Stage::Global => "global",
            Stage::Local => "local",
        };
        let t = e.theta;
        let _ = writeln!(
            trace,
            "{stage},{},{},{},{},{}",
            t.nugget,
            t.sill,
            t.range,
            fmt_opt(t.decay),
            e.value
        );
    }
    write(&out(cfg, "fit_trace.csv"), &trace)?;

    let mut report = String::new();
    let _ = writeln!(report, "family: {}", problem.family());
    let _ = writeln!(
        report,
        "data: {} points, {} bins used (of {}), max_lag {}",
        data.len(),
        emp.len(),
        emp.n_bins(),
        emp.max_lag()
    );
    for (name, value) in problem.fixed() {
        let _ = writeln!(report, "fixed {name}: {value}");
    }
    for fp in problem.free() {
        let _ = writeln!(report, "free {}: [{}, {}]", fp.name, fp.low, fp.high);
    }
    for &name in problem.family().parameter_names() {
        let v = theta.get(name).expect("family parameter");
        let _ = writeln!(report, "{name} = {v}");
    }
    let _ = writeln!(report, "sqrt(sill) = {}", theta.sill.sqrt());
    let _ = writeln!(report, "Q = {}", result.objective);
    let _ = writeln!(report, "Q(global stage) = {}", result.global_stage_value);
    let _ = writeln!(report, "evaluations = {}", result.evaluations);
    let _ = writeln!(report, "excluded bins = {}", result.excluded_bins);
    write(&out(cfg, "fit_report.txt"), &report)?;
    Ok(report)
}

/// Objective of `model` against the data's empirical variogram, with every
/// parameter fixed.
fn objective_for(model: &CovarianceModel, cfg: &RunConfig) -> CliResult<f64> {
    let data = load_data(cfg)?;
    let emp = empirical_variogram(&data, cfg.binning())?;
    let family = model.family();
    let fixed: Vec<(ParamName, f64)> = family
        .parameter_names()
        .iter()
        .map(|&n| (n, model.params().get(n).expect("family parameter")))
        .collect();
    let problem = FitProblem::new(family, emp, vec![], fixed)?;
    Ok(wls_objective(&problem, model.params())?.value)
}

fn grid(max: f64, n: usize, symmetric: bool) -> CliResult<Vec<f64>> {
    if n < 2 {
        return Err(CliError::config(format!("grid needs at least 2 points, got {n}")));
    }
    if !(max > 0.0) {
        return Err(CliError::config(format!("grid maximum must be positive, got {max}")));
    }
    let lo = if symmetric { -max } else { 0.0 };
    let last = (n - 1) as f64;
    // symmetric grids are built from the positive half so that h and -h
    // are exact negatives
    Ok((0..n)
        .map(|i| {
            if symmetric {
                let k = 2.0 * i as f64 - last;
                max * k / last
            } else {
                lo + max * i as f64 / last
            }
        })
        .collect())
}

fn eval(cfg: &RunConfig) -> CliResult<String> {
    let model = cfg.model()?;
    let mut csv = String::from("h,covariance,semivariogram\n");
    for h in grid(cfg.h_max, cfg.n_h, false)? {
        let _ = writeln!(csv, "{h},{},{}", model.covariance(h), model.semivariogram(h));
    }
    let path = out(cfg, "eval.csv");
    write(&path, &csv)?;
    let mut summary = format!("{}: wrote {}", model.family(), path.display());

    if let Some(beta) = cfg.beta {
        let st = SpatioTemporalModel::new(model, beta);
        let hs = grid(cfg.h_max, cfg.n_h, true)?;
        let ts = grid(
            cfg.t_max.unwrap_or(cfg.h_max),
            cfg.n_t.unwrap_or(cfg.n_h),
            true,
        )?;
        let mut csv = String::from("h,t,covariance\n");
        for &h in &hs {
            for &t in &ts {
                let _ = writeln!(csv, "{h},{t},{}", st.covariance(h, t));
            }
        }
        let path = out(cfg, "eval_spacetime.csv");
        write(&path, &csv)?;
        let _ = write!(summary, ", {}", path.display());
    }

    if cfg.input.is_some() {
        let q = objective_for(&model, cfg)?;
        write(&out(cfg, "eval_report.txt"), &format!("Q = {q}\n"))?;
        let _ = write!(summary, "\nQ = {q}");
    }
    Ok(summary)
}

fn simulate(cfg: &RunConfig) -> CliResult<String> {
    let model = cfg.model()?;
    let data = load_data(cfg)?;
    let mean = cfg.mean.unwrap_or_else(|| data.mean());
    let sampler = FieldSampler::new(&model, data.locations())?;
    let dim = data.dim();
    let mut csv = format!("replicate,{},value\n", location_header(dim));
    for rep in 0..cfg.n_sim {
        let values = sampler.sample(mean, cfg.seed.wrapping_add(rep as u64));
        for (p, v) in data.locations().iter().zip(values) {
            let coords: Vec<String> = p[..dim].iter().map(f64::to_string).collect();
            let _ = writeln!(csv, "{rep},{},{v}", coords.join(","));
        }
    }
    let path = out(cfg, "simulate.csv");
    write(&path, &csv)?;
    Ok(format!(
        "{} replicates at {} locations (mean {mean}, jitter {}); wrote {}",
        cfg.n_sim,
        data.len(),
        sampler.jitter(),
        path.display()
    ))
}

fn envelope(cfg: &RunConfig) -> CliResult<String> {
    let model = cfg.model()?;
    let data = load_data(cfg)?;
    let env = envelope_test(&model, &data, cfg.binning(), cfg.n_sim, cfg.seed)?;

    let mut csv = String::from("bin_center,count,observed,lower,upper,contained\n");
    for i in 0..env.bin_centers.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            env.bin_centers[i],
            env.counts[i],
            env.observed[i],
            env.lower[i],
            env.upper[i],
            env.contained[i]
        );
    }
    let csv_path = out(cfg, "envelope.csv");
    write(&csv_path, &csv)?;

    let band: Vec<(f64, f64, f64)> = (0..env.bin_centers.len())
        .map(|i| (env.bin_centers[i], env.lower[i], env.upper[i]))
        .collect();
    let points: Vec<(f64, f64)> = env
        .bin_centers
        .iter()
        .copied()
        .zip(env.observed.iter().copied())
        .collect();
    let h_end = env.bin_centers.last().copied().unwrap_or(1.0) * 1.05;
    let curve: Vec<(f64, f64)> = (1..=200)
        .map(|i| {
            let h = h_end * i as f64 / 200.0;
            (h, model.semivariogram(h))
        })
        .collect();
    let title = format!("{} envelope from {} simulations", model.family(), env.n_sim);
    let svg = svg::render(&Plot {
        title: &title,
        x_label: "distance",
        y_label: "semivariogram",
        band: &band,
        curve: &curve,
        points: &points,
    });
    let svg_path = out(cfg, "envelope.svg");
    write(&svg_path, &svg)?;

    let outside = env.contained.iter().filter(|c| !**c).count();
    Ok(format!(
        "contained = {} ({} of {} bins outside); wrote {} and {}",
        env.overall,
        outside,
        env.contained.len(),
        csv_path.display(),
        svg_path.display()
    ))
}

fn pdcheck(cfg: &RunConfig) -> CliResult<String> {
    let model = cfg.model()?;
    let mut report = format!(
        "model: {}\npoints: {} in [0,10]^{}\nseed,min_eigenvalue\n",
        model.family(),
        cfg.pd_points,
        cfg.pd_dim
    );
    let mut worst = f64::INFINITY;
    for k in 0..cfg.pd_seeds {
        let seed = cfg.seed.wrapping_add(k as u64);
        let lam = pd_diagnostic(&model, cfg.pd_dim, cfg.pd_points, seed)?;
        worst = worst.min(lam);
        let _ = writeln!(report, "{seed},{lam}");
    }
    let _ = writeln!(report, "worst: {worst}");
    write(&out(cfg, "pdcheck.txt"), &report)?;
    Ok(report)
}
