//! Derivative-free, bound-constrained trust-region descent with quadratic
//! interpolation models.
//!
//! Every iteration interpolates a full quadratic through `(n+1)(n+2)/2`
//! points placed around the incumbent at distance `Δ` (two points per axis
//! and one per pair of axes, all inside the box), minimizes it over the
//! intersection of the box with the `∞`-norm ball of radius `Δ`, and accepts
//! the best point seen if it lowers the objective. The radius grows after
//! good model predictions and shrinks after poor ones; the search stops when
//! `Δ` falls below the tolerance. All coordinates are in the unit hypercube
//! of the bounds.

use nalgebra::{DMatrix, DVector};

use super::bounds::Bounds;
use super::OptimizeResult;

const INITIAL_RADIUS: f64 = 0.1;
const MAX_RADIUS: f64 = 0.25;
const SUBPROBLEM_ITERS: usize = 60;

struct Quadratic {
    g: DVector<f64>,
    h: DMatrix<f64>,
}

impl Quadratic {
    fn value(&self, d: &DVector<f64>) -> f64 {
        self.g.dot(d) + 0.5 * d.dot(&(&self.h * d))
    }

    fn gradient(&self, d: &DVector<f64>) -> DVector<f64> {
        &self.g + &self.h * d
    }
}

fn project(d: &mut DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) {
    for i in 0..d.len() {
        d[i] = d[i].clamp(lo[i], hi[i]);
    }
}

/// Approximately minimizes the model over `lo <= d <= hi`: the best clipped
/// point on the regularized Newton path seeds projected gradient steps with
/// exact line search, followed by a Newton step on the variables that are
/// not pinned to a bound.
fn solve_subproblem(model: &Quadratic, lo: &DVector<f64>, hi: &DVector<f64>) -> DVector<f64> {
    let n = model.g.len();
    let mut best = DVector::zeros(n);
    let mut best_val = 0.0;

    let consider = |d: DVector<f64>, best: &mut DVector<f64>, best_val: &mut f64| {
        let v = model.value(&d);
        if v < *best_val {
            *best_val = v;
            *best = d;
        }
    };

    // regularized Newton path -(H + λI)⁻¹ g, λ swept above the shift that
    // makes the shifted Hessian positive definite; covers indefinite and
    // badly conditioned models
    let eig = model.h.clone().symmetric_eigen();
    let lambda_min = eig.eigenvalues.min();
    let scale = model.h.norm().max(model.g.norm()).max(1e-300);
    let shift = (-lambda_min).max(0.0);
    for k in -12..=3 {
        let lambda = shift + scale * 10f64.powi(k);
        let mut d = DVector::zeros(n);
        for (j, ev) in eig.eigenvalues.iter().enumerate() {
            let q = eig.eigenvectors.column(j);
            d -= q * (q.dot(&model.g) / (ev + lambda));
        }
        if d.iter().all(|v| v.is_finite()) {
            project(&mut d, lo, hi);
            consider(d, &mut best, &mut best_val);
        }
    }
    if lambda_min > 0.0 {
        if let Some(chol) = model.h.clone().cholesky() {
            let mut newton = -chol.solve(&model.g);
            project(&mut newton, lo, hi);
            consider(newton, &mut best, &mut best_val);
        }
    }

    let lipschitz = model.h.norm().max(1e-12);
    let mut d = best.clone();
    for _ in 0..SUBPROBLEM_ITERS {
        let grad = model.gradient(&d);
        let mut target = &d - &grad / lipschitz;
        project(&mut target, lo, hi);
        let p = &target - &d;
        if p.amax() < 1e-15 {
            break;
        }
        let curvature = p.dot(&(&model.h * &p));
        let slope = grad.dot(&p);
        let t = if curvature > 0.0 {
            (-slope / curvature).clamp(0.0, 1.0)
        } else {
            1.0
        };
        // the full projected step may beat the interior minimizer when the
        // model is not convex along p
        let candidate = &d + &p * t;
        let full = &d + &p;
        d = if model.value(&full) < model.value(&candidate) {
            full
        } else {
            candidate
        };
    }
    consider(d.clone(), &mut best, &mut best_val);

    // reduced Newton step on free variables
    let grad = model.gradient(&d);
    let free: Vec<usize> = (0..n)
        .filter(|&i| {
            let at_lo = d[i] <= lo[i] + 1e-15 && grad[i] > 0.0;
            let at_hi = d[i] >= hi[i] - 1e-15 && grad[i] < 0.0;
            !(at_lo || at_hi)
        })
        .collect();
    if !free.is_empty() {
        let k = free.len();
        let hr = DMatrix::from_fn(k, k, |a, b| model.h[(free[a], free[b])]);
        let gr = DVector::from_fn(k, |a, _| grad[free[a]]);
        if let Some(chol) = hr.cholesky() {
            let step = -chol.solve(&gr);
            let mut e = d.clone();
            for (a, &i) in free.iter().enumerate() {
                e[i] += step[a];
            }
            project(&mut e, lo, hi);
            consider(e, &mut best, &mut best_val);
        }
    }
    best
}

struct Evaluator<'a, F> {
    f: F,
    bounds: &'a Bounds,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<'_, F> {
    fn eval(&mut self, u: &DVector<f64>) -> f64 {
        self.eval_at(&self.bounds.from_unit(u.as_slice()))
    }

    fn eval_at(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Minimizes `f` over `bounds` starting from `start` (which must lie inside
/// the bounds). `tol` is the final trust-region radius in unit-box
/// coordinates.
pub fn trust_region<F: FnMut(&[f64]) -> f64>(
    f: F,
    bounds: &Bounds,
    start: &[f64],
    tol: f64,
    max_evals: usize,
) -> OptimizeResult {
    let n = bounds.dim();
    let mut ev = Evaluator {
        f,
        bounds,
        evaluations: 0,
    };
    let mut x = DVector::from_vec(bounds.to_unit(start));
    let mut fx = ev.eval_at(start);
    let mut trace = vec![(start.to_vec(), fx)];
    let mut moved = false;
    let per_iteration = 2 * n + n * n.saturating_sub(1) / 2 + 1;
    let mut radius = INITIAL_RADIUS;

    while n > 0 && radius >= tol && ev.evaluations + per_iteration <= max_evals {
        // stencil: first and second points along each axis
        let mut step = vec![0.0; n];
        let mut f1 = vec![0.0; n];
        let mut second = vec![0.0; n];
        let mut f2 = vec![0.0; n];
        let mut best_pt: Option<(DVector<f64>, f64)> = None;
        let note = |p: &DVector<f64>, v: f64, best: &mut Option<(DVector<f64>, f64)>| {
            if v < best.as_ref().map_or(fx, |b| b.1) {
                *best = Some((p.clone(), v));
            }
        };

        for i in 0..n {
            step[i] = if x[i] + radius <= 1.0 { radius } else { -radius };
            second[i] = if (0.0..=1.0).contains(&(x[i] - step[i])) {
                -step[i]
            } else {
                2.0 * step[i]
            };
            let mut p = x.clone();
            p[i] += step[i];
            f1[i] = ev.eval(&p);
            note(&p, f1[i], &mut best_pt);
            let mut q = x.clone();
            q[i] += second[i];
            f2[i] = ev.eval(&q);
            note(&q, f2[i], &mut best_pt);
        }

        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            let (a, b) = (step[i], second[i]);
            let da = (f1[i] - fx) / a;
            let db = (f2[i] - fx) / b;
            h[(i, i)] = 2.0 * (db - da) / (b - a);
            g[i] = da - 0.5 * h[(i, i)] * a;
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut p = x.clone();
                p[i] += step[i];
                p[j] += step[j];
                let fij = ev.eval(&p);
                note(&p, fij, &mut best_pt);
                let (si, sj) = (step[i], step[j]);
                let rest = fij
                    - fx
                    - g[i] * si
                    - g[j] * sj
                    - 0.5 * h[(i, i)] * si * si
                    - 0.5 * h[(j, j)] * sj * sj;
                let hij = rest / (si * sj);
                h[(i, j)] = hij;
                h[(j, i)] = hij;
            }
        }

        let model = Quadratic { g, h };
        let finite = model.g.iter().chain(model.h.iter()).all(|v| v.is_finite());
        let lo = DVector::from_fn(n, |i, _| (-radius).max(-x[i]));
        let hi = DVector::from_fn(n, |i, _| radius.min(1.0 - x[i]));
        let d = if finite {
            solve_subproblem(&model, &lo, &hi)
        } else {
            DVector::zeros(n)
        };
        let predicted = -model.value(&d);

        let mut rho = 0.0;
        let mut step_norm = 0.0;
        if finite && predicted > 0.0 && d.amax() > 0.0 {
            let mut trial = &x + &d;
            for v in trial.iter_mut() {
                *v = v.clamp(0.0, 1.0);
            }
            let ft = ev.eval(&trial);
            note(&trial, ft, &mut best_pt);
            rho = (fx - ft) / predicted;
            step_norm = d.amax();
        }

        if let Some((p, v)) = best_pt {
            x = p;
            fx = v;
            moved = true;
            trace.push((bounds.from_unit(x.as_slice()), fx));
        }

        if rho >= 0.75 && step_norm >= 0.9 * radius {
            radius = (2.0 * radius).min(MAX_RADIUS);
        } else if rho < 0.25 {
            radius *= 0.5;
        }
    }

    OptimizeResult {
        x: if moved {
            bounds.from_unit(x.as_slice())
        } else {
            start.to_vec()
        },
        value: fx,
        evaluations: ev.evaluations,
        trace,
    }
}
