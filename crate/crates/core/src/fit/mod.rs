//! Weighted-least-squares variogram fitting.
//!
//! The objective compares empirical and model semivariograms on the log
//! scale, weighting each lag by its pair count:
//!
//! ```text
//! Q(θ) = Σ_i [log(2γ̂(h_i)) - log(2γ(h_i; θ))]² N(h_i) / 2
//! ```
//!
//! Minimization runs in two stages: a locally-biased DIRECT search over the
//! whole parameter box ([`global_search`]) followed by a quadratic-model
//! trust-region polish from its best point ([`local_polish`]).

mod bounds;
mod direct;
mod trust_region;

use std::collections::BTreeMap;

pub use bounds::Bounds;
pub use direct::direct_l;
pub use trust_region::trust_region;

use crate::covmodels::{CovarianceModel, Family, ParamName, ParameterVector};
use crate::error::{Error, Result};
use crate::variogram::{Dataset, EmpiricalVariogram};

/// Global evaluations granted per free parameter by default.
pub const DEFAULT_GLOBAL_BUDGET_PER_PARAM: usize = 500;
pub const DEFAULT_LOCAL_TOL: f64 = 1e-10;
pub const DEFAULT_LOCAL_MAX_EVALS: usize = 2000;

/// Outcome of a box-constrained minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Successive improvements `(x, f(x))`, starting with the first point.
    pub trace: Vec<(Vec<f64>, f64)>,
}

/// Value of the WLS objective together with the number of bins left out
/// because a logarithm was undefined there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    pub value: f64,
    pub excluded: usize,
}

/// A parameter left free for the optimizer, with its search interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParam {
    pub name: ParamName,
    pub low: f64,
    pub high: f64,
}

impl FreeParam {
    pub fn new(name: ParamName, low: f64, high: f64) -> Self {
        Self { name, low, high }
    }
}

/// A variogram fitting problem: family, data, and which parameters are
/// estimated versus held fixed.
#[derive(Debug, Clone)]
pub struct FitProblem {
    family: Family,
    empirical: EmpiricalVariogram,
    free: Vec<FreeParam>,
    fixed: BTreeMap<ParamName, f64>,
    bounds: Option<Bounds>,
}

impl FitProblem {
    pub fn new(
        family: Family,
        empirical: EmpiricalVariogram,
        free: Vec<FreeParam>,
        fixed: Vec<(ParamName, f64)>,
    ) -> Result<Self> {
        family.validate()?;
        let needed = family.parameter_names();
        let mut fixed_map = BTreeMap::new();
        for (name, value) in fixed {
            if fixed_map.insert(name, value).is_some() {
                return Err(Error::InvalidParameter(format!("{name} fixed twice")));
            }
        }
        for fp in &free {
            if fixed_map.contains_key(&fp.name) {
                return Err(Error::InvalidParameter(format!(
                    "{} is both free and fixed",
                    fp.name
                )));
            }
            if free.iter().filter(|o| o.name == fp.name).count() > 1 {
                return Err(Error::InvalidParameter(format!("{} is free twice", fp.name)));
            }
            let positive = matches!(fp.name, ParamName::Range | ParamName::Decay);
            let ok_low = if positive { fp.low > 0.0 } else { fp.low >= 0.0 };
            if !ok_low {
                return Err(Error::InvalidParameter(format!(
                    "lower bound for {} violates its sign constraint: {}",
                    fp.name, fp.low
                )));
            }
        }
        for name in needed {
            let is_free = free.iter().any(|f| f.name == *name);
            if !is_free && !fixed_map.contains_key(name) {
                return Err(Error::InvalidParameter(format!(
                    "{name} is neither free nor fixed"
                )));
            }
        }
        for name in free.iter().map(|f| f.name).chain(fixed_map.keys().copied()) {
            if !needed.contains(&name) {
                return Err(Error::InvalidParameter(format!(
                    "{} does not use parameter {name}",
                    family
                )));
            }
        }
        let bounds = if free.is_empty() {
            None
        } else {
            Some(Bounds::new(
                free.iter().map(|f| f.low).collect(),
                free.iter().map(|f| f.high).collect(),
            )?)
        };
        let problem = Self {
            family,
            empirical,
            free,
            fixed: fixed_map,
            bounds,
        };
        // fixed values must give a valid model somewhere in the box
        CovarianceModel::new(family, problem.theta_at(&problem.box_center()))?;
        Ok(problem)
    }

    /// Default search box derived from the data: sill in `[1e-6 v, 10 v]`,
    /// nugget in `[0, 10 v]`, range and decay in `[d_min, d_max]`, where `v`
    /// is the sample variance and `d_min`, `d_max` are the extreme pair
    /// distances. Parameters listed in `fixed` are held at their values.
    pub fn with_default_bounds(
        family: Family,
        empirical: EmpiricalVariogram,
        data: &Dataset,
        fixed: Vec<(ParamName, f64)>,
    ) -> Result<Self> {
        let v = data.variance();
        if !(v > 0.0) {
            return Err(Error::Data(
                "sample variance is zero; cannot derive default bounds".into(),
            ));
        }
        let (d_min, d_max) = data.pair_distance_range();
        let free = family
            .parameter_names()
            .iter()
            .filter(|n| !fixed.iter().any(|(f, _)| f == *n))
            .map(|&name| {
                let (lo, hi) = default_bounds(name, v, d_min, d_max);
                FreeParam::new(name, lo, hi)
            })
            .collect();
        Self::new(family, empirical, free, fixed)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn empirical(&self) -> &EmpiricalVariogram {
        &self.empirical
    }

    pub fn free(&self) -> &[FreeParam] {
        &self.free
    }

    pub fn fixed(&self) -> &BTreeMap<ParamName, f64> {
        &self.fixed
    }

    pub fn bounds(&self) -> Option<&Bounds> {
        self.bounds.as_ref()
    }

    /// Parameter vector with the free parameters set to `x`.
    pub fn theta_at(&self, x: &[f64]) -> ParameterVector {
        let mut theta = ParameterVector::new(0.0, 0.0, 1.0);
        for (name, value) in &self.fixed {
            theta.set(*name, *value);
        }
        for (fp, value) in self.free.iter().zip(x) {
            theta.set(fp.name, *value);
        }
        theta
    }

    /// Free-parameter values of `theta`, in problem order.
    pub fn free_values(&self, theta: &ParameterVector) -> Vec<f64> {
        self.free
            .iter()
            .map(|fp| theta.get(fp.name).unwrap_or(f64::NAN))
            .collect()
    }

    fn box_center(&self) -> Vec<f64> {
        self.free.iter().map(|f| 0.5 * (f.low + f.high)).collect()
    }

    /// Objective at free values `x`, or `+∞` where it is undefined.
    fn objective_or_inf(&self, x: &[f64]) -> f64 {
        wls_objective(self, &self.theta_at(x)).map_or(f64::INFINITY, |o| o.value)
    }
}

fn default_bounds(name: ParamName, variance: f64, d_min: f64, d_max: f64) -> (f64, f64) {
    match name {
        ParamName::Sill => (1e-6 * variance, 10.0 * variance),
        ParamName::Nugget => (0.0, 10.0 * variance),
        ParamName::Range | ParamName::Decay => (d_min, d_max),
    }
}

/// Log-scale WLS objective at `theta`. Bins where `γ̂ = 0` or the model
/// semivariogram is not positive are skipped and counted.
pub fn wls_objective(problem: &FitProblem, theta: &ParameterVector) -> Result<ObjectiveValue> {
    let model = CovarianceModel::new(problem.family, *theta)?;
    let emp = &problem.empirical;
    let mut value = 0.0;
    let mut excluded = 0;
    for ((&h, &g_hat), &n) in emp
        .bin_centers()
        .iter()
        .zip(emp.estimates())
        .zip(emp.counts())
    {
        let g = model.semivariogram(h);
        if !(g_hat > 0.0) || !(g > 0.0) || !g.is_finite() {
            excluded += 1;
            continue;
        }
        let r = (2.0 * g_hat).ln() - (2.0 * g).ln();
        value += r * r * n as f64 / 2.0;
    }
    if excluded == emp.len() {
        return Err(Error::UndefinedObjective(format!(
            "all {excluded} bins excluded at {theta:?}"
        )));
    }
    Ok(ObjectiveValue { value, excluded })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Global,
    Local,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub stage: Stage,
    pub theta: ParameterVector,
    pub value: f64,
}

/// Result of the two-stage fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: ParameterVector,
    /// `Q(θ̂)`.
    pub objective: f64,
    /// `Q(θ̄)`, the best value of the global stage (or the local start).
    pub global_stage_value: f64,
    pub evaluations: usize,
    /// Bins skipped by the objective at `θ̂`.
    pub excluded_bins: usize,
    pub trace: Vec<TraceEntry>,
}

impl FitResult {
    pub fn model(&self, family: Family) -> Result<CovarianceModel> {
        CovarianceModel::new(family, self.theta_hat)
    }
}

/// Global stage result: `θ̄`, `Q(θ̄)` and bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalResult {
    pub theta_bar: ParameterVector,
    pub value: f64,
    pub evaluations: usize,
    pub trace: Vec<TraceEntry>,
}

/// Locally-biased DIRECT over the parameter box with at most `budget`
/// objective evaluations.
pub fn global_search(problem: &FitProblem, budget: usize) -> Result<GlobalResult> {
    let Some(bounds) = problem.bounds() else {
        let theta = problem.theta_at(&[]);
        let q = wls_objective(problem, &theta)?;
        return Ok(GlobalResult {
            theta_bar: theta,
            value: q.value,
            evaluations: 1,
            trace: vec![TraceEntry {
                stage: Stage::Global,
                theta,
                value: q.value,
            }],
        });
    };
    if budget < problem.free.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "global budget {budget} is below the {} evaluations needed",
            problem.free.len() + 1
        )));
    }
    let result = direct_l(|x| problem.objective_or_inf(x), bounds, budget);
    let theta_bar = problem.theta_at(&result.x);
    if !result.value.is_finite() {
        // surfaces the reason the objective is undefined
        wls_objective(problem, &theta_bar)?;
        return Err(Error::UndefinedObjective(
            "objective undefined at every sampled point".into(),
        ));
    }
    Ok(GlobalResult {
        theta_bar,
        value: result.value,
        evaluations: result.evaluations,
        trace: to_trace(problem, Stage::Global, &result.trace),
    })
}

fn to_trace(problem: &FitProblem, stage: Stage, raw: &[(Vec<f64>, f64)]) -> Vec<TraceEntry> {
    raw.iter()
        .map(|(x, v)| TraceEntry {
            stage,
            theta: problem.theta_at(x),
            value: *v,
        })
        .collect()
}

/// Bound-constrained quadratic-model trust-region descent from `start`.
/// Never returns a point worse than the start.
pub fn local_polish(
    problem: &FitProblem,
    start: &ParameterVector,
    tol: f64,
    max_evals: usize,
) -> Result<FitResult> {
    let q0 = wls_objective(problem, start)?;
    let Some(bounds) = problem.bounds() else {
        return Ok(FitResult {
            theta_hat: *start,
            objective: q0.value,
            global_stage_value: q0.value,
            evaluations: 1,
            excluded_bins: q0.excluded,
            trace: vec![TraceEntry {
                stage: Stage::Local,
                theta: *start,
                value: q0.value,
            }],
        });
    };
    let x0 = problem.free_values(start);
    if !bounds.contains(&x0) {
        return Err(Error::InvalidParameter(format!(
            "start {x0:?} lies outside the bounds"
        )));
    }
    let result = trust_region(|x| problem.objective_or_inf(x), bounds, &x0, tol, max_evals);
    let theta_hat = problem.theta_at(&result.x);
    let q = wls_objective(problem, &theta_hat)?;
    Ok(FitResult {
        theta_hat,
        objective: q.value,
        global_stage_value: q0.value,
        evaluations: result.evaluations,
        excluded_bins: q.excluded,
        trace: to_trace(problem, Stage::Local, &result.trace),
    })
}

/// Global search followed by local polish from its best point.
pub fn fit(problem: &FitProblem, global_budget: usize, local_tol: f64) -> Result<FitResult> {
    fit_with(problem, global_budget, local_tol, DEFAULT_LOCAL_MAX_EVALS)
}

pub fn fit_with(
    problem: &FitProblem,
    global_budget: usize,
    local_tol: f64,
    local_max_evals: usize,
) -> Result<FitResult> {
    let global = global_search(problem, global_budget)?;
    let mut local = local_polish(problem, &global.theta_bar, local_tol, local_max_evals)?;
    let mut trace = global.trace;
    trace.append(&mut local.trace);
    Ok(FitResult {
        global_stage_value: global.value,
        evaluations: global.evaluations + local.evaluations,
        trace,
        ..local
    })
}

/// Default global budget for a problem: 500 evaluations per free parameter.
pub fn default_global_budget(problem: &FitProblem) -> usize {
    (DEFAULT_GLOBAL_BUDGET_PER_PARAM * problem.free.len()).max(1)
}
