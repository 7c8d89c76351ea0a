//! Run configuration: a flat `key = value` text format (one entry per line,
//! `#` starts a comment line) whose keys double as command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hokcov::fit::{FitProblem, FreeParam};
use hokcov::{CovarianceModel, Dataset, EmpiricalVariogram, Family, ParamName, ParameterVector};

use crate::error::{CliError, CliResult};
use crate::record::ModelRecord;

/// Value and optional search interval of one model parameter.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamSetting {
    /// Fixed value (or the model value for commands that only evaluate).
    pub value: Option<f64>,
    pub bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub dim: usize,
    pub x_column: String,
    pub y_column: String,
    pub z_column: String,
    pub value_column: String,
    /// Model record to start from; explicit family and parameter keys win.
    pub model: Option<PathBuf>,
    pub family: String,
    pub r: u32,
    pub s: u32,
    pub nugget: ParamSetting,
    pub sill: ParamSetting,
    pub range: ParamSetting,
    pub decay: ParamSetting,
    pub beta: Option<f64>,
    pub n_bins: usize,
    pub max_lag: Option<f64>,
    pub global_budget: Option<usize>,
    pub local_tol: f64,
    pub local_max_evals: usize,
    pub n_sim: usize,
    pub seed: u64,
    pub mean: Option<f64>,
    pub h_max: f64,
    pub n_h: usize,
    pub t_max: Option<f64>,
    pub n_t: Option<usize>,
    pub pd_dim: usize,
    pub pd_points: usize,
    pub pd_seeds: usize,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            dim: 2,
            x_column: "x".into(),
            y_column: "y".into(),
            z_column: "z".into(),
            value_column: "value".into(),
            model: None,
            family: "sine_cosine".into(),
            r: 1,
            s: 1,
            nugget: ParamSetting::default(),
            sill: ParamSetting::default(),
            range: ParamSetting::default(),
            decay: ParamSetting::default(),
            beta: None,
            n_bins: 15,
            max_lag: None,
            global_budget: None,
            local_tol: hokcov::fit::DEFAULT_LOCAL_TOL,
            local_max_evals: hokcov::fit::DEFAULT_LOCAL_MAX_EVALS,
            n_sim: hokcov::simulate::DEFAULT_N_SIM,
            seed: 1,
            mean: None,
            h_max: 20.0,
            n_h: 201,
            t_max: None,
            n_t: None,
            pd_dim: 3,
            pd_points: 50,
            pd_seeds: 5,
            output: PathBuf::from("."),
        }
    }
}

/// Every configuration key, in file order.
pub const KEYS: &[&str] = &[
    "input",
    "dim",
    "x_column",
    "y_column",
    "z_column",
    "value_column",
    "model",
    "family",
    "r",
    "s",
    "nugget",
    "nugget_bounds",
    "sill",
    "sill_bounds",
    "range",
    "range_bounds",
    "decay",
    "decay_bounds",
    "beta",
    "n_bins",
    "max_lag",
    "global_budget",
    "local_tol",
    "local_max_evals",
    "n_sim",
    "seed",
    "mean",
    "h_max",
    "n_h",
    "t_max",
    "n_t",
    "pd_dim",
    "pd_points",
    "pd_seeds",
    "output",
];

const NONE: &str = "none";

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::config(format!("{key}: cannot parse `{value}`")))
}

fn parse_opt<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<Option<T>> {
    if value == NONE {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn parse_f64(key: &str, value: &str) -> CliResult<f64> {
    let v: f64 = parse(key, value)?;
    if !v.is_finite() {
        return Err(CliError::config(format!("{key}: `{value}` is not finite")));
    }
    Ok(v)
}

fn parse_f64_opt(key: &str, value: &str) -> CliResult<Option<f64>> {
    if value == NONE {
        Ok(None)
    } else {
        parse_f64(key, value).map(Some)
    }
}

fn parse_bounds(key: &str, value: &str) -> CliResult<Option<(f64, f64)>> {
    if value == NONE {
        return Ok(None);
    }
    let (lo, hi) = value
        .split_once(',')
        .ok_or_else(|| CliError::config(format!("{key}: expected `low,high`, got `{value}`")))?;
    let (lo, hi) = (parse_f64(key, lo.trim())?, parse_f64(key, hi.trim())?);
    if lo >= hi {
        return Err(CliError::config(format!("{key}: low {lo} is not below high {hi}")));
    }
    Ok(Some((lo, hi)))
}

fn show<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| NONE.to_string(), T::to_string)
}

fn show_path(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map_or_else(|| NONE.to_string(), |p| p.display().to_string())
}

fn show_bounds(b: &Option<(f64, f64)>) -> String {
    b.map_or_else(|| NONE.to_string(), |(lo, hi)| format!("{lo},{hi}"))
}

impl RunConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let value = value.trim();
        match key {
            "input" => self.input = parse_opt(key, value)?,
            "dim" => {
                let d: usize = parse(key, value)?;
                if !(1..=3).contains(&d) {
                    return Err(CliError::config(format!("dim must be 1, 2 or 3, got {d}")));
                }
                self.dim = d;
            }
            "x_column" => self.x_column = value.to_string(),
            "y_column" => self.y_column = value.to_string(),
            "z_column" => self.z_column = value.to_string(),
            "value_column" => self.value_column = value.to_string(),
            "model" => self.model = parse_opt(key, value)?,
            "family" => self.family = value.to_string(),
            "r" => self.r = parse(key, value)?,
            "s" => self.s = parse(key, value)?,
            "nugget" => self.nugget.value = parse_f64_opt(key, value)?,
            "nugget_bounds" => self.nugget.bounds = parse_bounds(key, value)?,
            "sill" => self.sill.value = parse_f64_opt(key, value)?,
            "sill_bounds" => self.sill.bounds = parse_bounds(key, value)?,
            "range" => self.range.value = parse_f64_opt(key, value)?,
            "range_bounds" => self.range.bounds = parse_bounds(key, value)?,
            "decay" => self.decay.value = parse_f64_opt(key, value)?,
            "decay_bounds" => self.decay.bounds = parse_bounds(key, value)?,
            "beta" => self.beta = parse_f64_opt(key, value)?,
            "n_bins" => self.n_bins = parse(key, value)?,
            "max_lag" => self.max_lag = parse_f64_opt(key, value)?,
            "global_budget" => self.global_budget = parse_opt(key, value)?,
            "local_tol" => self.local_tol = parse_f64(key, value)?,
            "local_max_evals" => self.local_max_evals = parse(key, value)?,
            "n_sim" => self.n_sim = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "mean" => self.mean = parse_f64_opt(key, value)?,
            "h_max" => self.h_max = parse_f64(key, value)?,
            "n_h" => self.n_h = parse(key, value)?,
            "t_max" => self.t_max = parse_f64_opt(key, value)?,
            "n_t" => self.n_t = parse_opt(key, value)?,
            "pd_dim" => self.pd_dim = parse(key, value)?,
            "pd_points" => self.pd_points = parse(key, value)?,
            "pd_seeds" => self.pd_seeds = parse(key, value)?,
            "output" => self.output = PathBuf::from(value),
            other => return Err(CliError::config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Text form of one key, as written by [`RunConfig::to_text`].
    pub fn get(&self, key: &str) -> Option<String> {
        let s = match key {
            "input" => show_path(&self.input),
            "dim" => self.dim.to_string(),
            "x_column" => self.x_column.clone(),
            "y_column" => self.y_column.clone(),
            "z_column" => self.z_column.clone(),
            "value_column" => self.value_column.clone(),
            "model" => show_path(&self.model),
            "family" => self.family.clone(),
            "r" => self.r.to_string(),
            "s" => self.s.to_string(),
            "nugget" => show(&self.nugget.value),
            "nugget_bounds" => show_bounds(&self.nugget.bounds),
            "sill" => show(&self.sill.value),
            "sill_bounds" => show_bounds(&self.sill.bounds),
            "range" => show(&self.range.value),
            "range_bounds" => show_bounds(&self.range.bounds),
            "decay" => show(&self.decay.value),
            "decay_bounds" => show_bounds(&self.decay.bounds),
            "beta" => show(&self.beta),
            "n_bins" => self.n_bins.to_string(),
            "max_lag" => show(&self.max_lag),
            "global_budget" => show(&self.global_budget),
            "local_tol" => self.local_tol.to_string(),
            "local_max_evals" => self.local_max_evals.to_string(),
            "n_sim" => self.n_sim.to_string(),
            "seed" => self.seed.to_string(),
            "mean" => show(&self.mean),
            "h_max" => self.h_max.to_string(),
            "n_h" => self.n_h.to_string(),
            "t_max" => show(&self.t_max),
            "n_t" => show(&self.n_t),
            "pd_dim" => self.pd_dim.to_string(),
            "pd_points" => self.pd_points.to_string(),
            "pd_seeds" => self.pd_seeds.to_string(),
            "output" => self.output.display().to_string(),
            _ => return None,
        };
        Some(s)
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> CliResult<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::config(format!("line {}: {}", i + 1, e.message)))?;
        }
        Ok(())
    }

    /// Defaults, then the config file, then flag overrides; finally the
    /// model record named by `model` fills whatever neither set explicitly.
    pub fn resolve(file: Option<&str>, overrides: &[(String, String)]) -> CliResult<Self> {
        let mut cfg = Self::default();
        let mut explicit: Vec<String> = Vec::new();
        if let Some(text) = file {
            cfg.apply_text(text)?;
            explicit.extend(text.lines().filter_map(|l| {
                let l = l.trim();
                (!l.starts_with('#'))
                    .then(|| l.split_once('=').map(|(k, _)| k.trim().to_string()))
                    .flatten()
            }));
        }
        for (k, v) in overrides {
            cfg.set(k, v)
                .map_err(|e| CliError::config(format!("--{}: {}", k.replace('_', "-"), e.message)))?;
            explicit.push(k.clone());
        }
        if let Some(path) = cfg.model.clone() {
            let record = ModelRecord::load(&path)?;
            cfg.merge_record(&record, &explicit);
        }
        Ok(cfg)
    }

    pub fn from_text(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Every key, one per line; `from_text(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("known key"));
        }
        out
    }

    pub fn param(&self, name: ParamName) -> &ParamSetting {
        match name {
            ParamName::Nugget => &self.nugget,
            ParamName::Sill => &self.sill,
            ParamName::Range => &self.range,
            ParamName::Decay => &self.decay,
        }
    }

    fn param_mut(&mut self, name: ParamName) -> &mut ParamSetting {
        match name {
            ParamName::Nugget => &mut self.nugget,
            ParamName::Sill => &mut self.sill,
            ParamName::Range => &mut self.range,
            ParamName::Decay => &mut self.decay,
        }
    }

    /// Fills family, structural constants, parameter values and `beta` from
    /// a model record wherever `explicit` does not name the key.
    pub fn merge_record(&mut self, record: &ModelRecord, explicit: &[String]) {
        let is_explicit = |k: &str| explicit.iter().any(|e| e == k);
        if !is_explicit("family") {
            self.family = record.family.name().to_string();
        }
        if !is_explicit("r") {
            if let Some(r) = record.family.r() {
                self.r = r;
            }
        }
        if !is_explicit("s") {
            if let Some(s) = record.family.s() {
                self.s = s;
            }
        }
        for name in ParamName::ALL {
            if !is_explicit(name.as_str()) {
                if let Some(v) = record.params.get(name) {
                    self.param_mut(name).value = Some(v);
                }
            }
        }
        if !is_explicit("beta") && record.beta.is_some() {
            self.beta = record.beta;
        }
    }

    pub fn family(&self) -> CliResult<Family> {
        Ok(Family::from_parts(&self.family, self.r, self.s)?)
    }

    /// Fully specified model; every parameter the family reads must have a
    /// value.
    pub fn model(&self) -> CliResult<CovarianceModel> {
        let family = self.family()?;
        let mut theta = ParameterVector::new(0.0, 0.0, 1.0);
        for &name in family.parameter_names() {
            let v = self.param(name).value.ok_or_else(|| {
                CliError::config(format!("{family} needs a value for `{name}`"))
            })?;
            theta.set(name, v);
        }
        Ok(CovarianceModel::new(family, theta)?)
    }

    pub fn binning(&self) -> hokcov::BinningConfig {
        hokcov::BinningConfig::new(self.n_bins, self.max_lag)
    }

    /// Fit problem: parameters with a value are fixed, the rest are free
    /// with their configured bounds or data-derived defaults.
    pub fn fit_problem(&self, data: &Dataset, empirical: EmpiricalVariogram) -> CliResult<FitProblem> {
        let family = self.family()?;
        let fixed: Vec<(ParamName, f64)> = family
            .parameter_names()
            .iter()
            .filter_map(|&n| self.param(n).value.map(|v| (n, v)))
            .collect();
        let defaults =
            FitProblem::with_default_bounds(family, empirical.clone(), data, fixed.clone())?;
        let free = defaults
            .free()
            .iter()
            .map(|fp| match self.param(fp.name).bounds {
                Some((lo, hi)) => FreeParam::new(fp.name, lo, hi),
                None => *fp,
            })
            .collect();
        Ok(FitProblem::new(family, empirical, free, fixed)?)
    }
}
