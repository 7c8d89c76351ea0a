//! DIRECT (DIviding RECTangles) global search, locally-biased variant.
//!
//! The box is mapped onto the unit hypercube and every hyperrectangle is
//! sampled at its centre. Each iteration
//!
//! 1. groups rectangles by size (the length of their longest side) and keeps
//!    one representative per group: the lowest value, ties broken by the
//!    lowest rectangle index;
//! 2. selects the representatives on the lower-right convex hull of the
//!    `(size, value)` cloud that also promise an improvement of at least
//!    `ε |f_min|`;
//! 3. trisects every selected rectangle along its longest sides, sampling
//!    `c ± δ e_i` and splitting the best directions first so they keep the
//!    larger pieces.
//!
//! Grouping by longest side and taking one rectangle per group is what
//! makes the search locally biased. Evaluations are counted against a hard
//! budget; a division that would overrun it ends the search.

use super::bounds::Bounds;
use super::OptimizeResult;

/// Jones' improvement threshold.
const EPSILON: f64 = 1e-4;

/// Rectangles are not split past side length `3^-MAX_LEVEL`.
const MAX_LEVEL: u32 = 35;

#[derive(Debug, Clone)]
struct Rect {
    center: Vec<f64>,
    /// Number of trisections applied along each axis.
    level: Vec<u32>,
    value: f64,
}

impl Rect {
    fn min_level(&self) -> u32 {
        *self.level.iter().min().expect("non-empty dimension")
    }
}

fn side(level: u32) -> f64 {
    3f64.powi(-(level as i32))
}

struct Search<'a, F> {
    f: F,
    bounds: &'a Bounds,
    rects: Vec<Rect>,
    evaluations: usize,
    best: usize,
    trace: Vec<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Search<'_, F> {
    fn eval(&mut self, unit: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(&self.bounds.from_unit(unit));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn push(&mut self, rect: Rect) {
        let idx = self.rects.len();
        let improves = rect.value < self.rects.get(self.best).map_or(f64::INFINITY, |b| b.value);
        self.rects.push(rect);
        if improves || idx == 0 {
            self.best = idx;
            let r = &self.rects[idx];
            self.trace.push((self.bounds.from_unit(&r.center), r.value));
        }
    }

    /// Indices of the potentially optimal rectangles, in ascending order.
    fn select(&self) -> Vec<usize> {
        // one representative per size class: key = min level (larger side first)
        let mut reps: Vec<(u32, usize)> = Vec::new();
        for (idx, r) in self.rects.iter().enumerate() {
            let lvl = r.min_level();
            if lvl >= MAX_LEVEL {
                continue;
            }
            match reps.iter_mut().find(|(l, _)| *l == lvl) {
                Some(entry) => {
                    if r.value < self.rects[entry.1].value {
                        entry.1 = idx;
                    }
                }
                None => reps.push((lvl, idx)),
            }
        }
        if reps.is_empty() {
            return Vec::new();
        }
        // ascending size = descending level
        reps.sort_by(|a, b| b.0.cmp(&a.0));
        let size = |lvl: u32| 0.5 * side(lvl);
        let value = |idx: usize| self.rects[idx].value;

        let f_min = value(self.best);
        // start the hull at the smallest f; among ties, the largest size
        let start = reps
            .iter()
            .enumerate()
            .min_by(|a, b| value(a.1 .1).total_cmp(&value(b.1 .1)).then(b.0.cmp(&a.0)))
            .map(|(k, _)| k)
            .expect("non-empty");

        let mut hull: Vec<(f64, f64, usize)> = Vec::new();
        for &(lvl, idx) in &reps[start..] {
            let p = (size(lvl), value(idx), idx);
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // drop b unless it lies strictly below the chord a -> p
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }

        let threshold = f_min - EPSILON * f_min.abs();
        let mut chosen = Vec::new();
        for (k, &(d, fv, idx)) in hull.iter().enumerate() {
            let passes = match hull.get(k + 1) {
                None => true,
                Some(&(d2, f2, _)) => {
                    let slope = (f2 - fv) / (d2 - d);
                    fv - slope * d <= threshold || !f_min.is_finite()
                }
            };
            if passes {
                chosen.push(idx);
            }
        }
        chosen.sort_unstable();
        chosen
    }

    /// Trisects rectangle `idx` along its longest sides. Returns `false` if
    /// the budget does not allow it.
    fn divide(&mut self, idx: usize, budget: usize) -> bool {
        let lvl = self.rects[idx].min_level();
        let dims: Vec<usize> = (0..self.rects[idx].level.len())
            .filter(|&i| self.rects[idx].level[i] == lvl)
            .collect();
        if self.evaluations + 2 * dims.len() > budget {
            return false;
        }
        let delta = side(lvl + 1);
        let center = self.rects[idx].center.clone();
        let mut samples = Vec::with_capacity(dims.len());
        for &i in &dims {
            let mut lo = center.clone();
            lo[i] -= delta;
            let mut hi = center.clone();
            hi[i] += delta;
            let f_lo = self.eval(&lo);
            let f_hi = self.eval(&hi);
            samples.push((i, lo, f_lo, hi, f_hi));
        }
        samples.sort_by(|a, b| {
            a.2.min(a.4)
                .total_cmp(&b.2.min(b.4))
                .then(a.0.cmp(&b.0))
        });
        for (i, lo, f_lo, hi, f_hi) in samples {
            self.rects[idx].level[i] += 1;
            let level = self.rects[idx].level.clone();
            self.push(Rect {
                center: lo,
                level: level.clone(),
                value: f_lo,
            });
            self.push(Rect {
                center: hi,
                level,
                value: f_hi,
            });
        }
        true
    }
}

/// Minimizes `f` over `bounds` with at most `budget` evaluations.
///
/// With `budget < 2n + 1` no division is possible and the box centre is
/// returned.
pub fn direct_l<F: FnMut(&[f64]) -> f64>(f: F, bounds: &Bounds, budget: usize) -> OptimizeResult {
    let n = bounds.dim();
    let mut search = Search {
        f,
        bounds,
        rects: Vec::new(),
        evaluations: 0,
        best: 0,
        trace: Vec::new(),
    };
    let center = vec![0.5; n];
    let value = search.eval(&center);
    search.push(Rect {
        center,
        level: vec![0; n],
        value,
    });

    'outer: while n > 0 && search.evaluations < budget {
        let selected = search.select();
        if selected.is_empty() {
            break;
        }
        for idx in selected {
            if !search.divide(idx, budget) {
                break 'outer;
            }
        }
    }

    let best = &search.rects[search.best];
    OptimizeResult {
        x: bounds.from_unit(&best.center),
        value: best.value,
        evaluations: search.evaluations,
        trace: search.trace,
    }
}
