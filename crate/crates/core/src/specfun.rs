//! Special functions: gamma, Pochhammer symbol and spherical Bessel
//! functions of the first kind.
//!
//! The spherical Bessel function is evaluated by one of two routes:
//!
//! ```text
//! j_m(x) = Σ_k (-1)^k / ((3/2)_{m+k} k!) (x/2)^{m+2k}          (series)
//! j_{m+1}(x) = (2m+1)/x j_m(x) - j_{m-1}(x)                     (recurrence)
//! ```
//!
//! Upward recurrence loses accuracy once the order exceeds the argument, so
//! it is only used for `|x| >= m`; below that the power series converges
//! quickly and without much cancellation.

use crate::error::{Error, Result};

/// Below this magnitude the removable singularity at zero is replaced by the
/// leading series term.
pub const SMALL_ARGUMENT: f64 = 1e-6;

/// Maximum number of series terms before giving up.
pub const SERIES_TERM_CAP: usize = 200;

/// Rising factorial `alpha (alpha+1) ... (alpha+n-1)`, evaluated as a direct
/// product so that poles of the gamma ratio form never appear.
pub fn pochhammer(alpha: f64, n: u32) -> Result<f64> {
    let mut acc = 1.0;
    for j in 0..n {
        acc *= alpha + f64::from(j);
        if !acc.is_finite() {
            return Err(Error::Range(format!(
                "pochhammer({alpha}, {n}) overflows at factor {j}"
            )));
        }
    }
    Ok(acc)
}

/// Gamma function for real arguments.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `n!` as a float. Exact for `n <= 22`.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Which evaluation route produced a spherical Bessel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselPath {
    Series,
    Recurrence,
    LimitAtZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEvalReport {
    pub order: u32,
    pub x: f64,
    pub value: f64,
    pub path: BesselPath,
}

/// Sum of `Σ_k t_k` where `t_0 = leading` and
/// `t_k = t_{k-1} * (-(x/2)^2) / (k (order + k + 1/2))`.
///
/// Shared by the plain and the scaled series, which only differ in the
/// leading term.
fn series_tail(order: u32, x: f64, leading: f64, tol: f64) -> Result<f64> {
    let q = -(x * x) / 4.0;
    let half_order = f64::from(order) + 0.5;
    let mut term = leading;
    let mut sum = leading;
    if term == 0.0 {
        return Ok(0.0);
    }
    for k in 1..SERIES_TERM_CAP {
        let kf = k as f64;
        term *= q / (kf * (half_order + kf));
        sum += term;
        if term == 0.0 || term.abs() < tol * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Range(format!(
        "spherical Bessel series for order {order} at x = {x} did not converge in {SERIES_TERM_CAP} terms"
    )))
}

/// `(x/2)^p / (3/2)_order`, built factor by factor so that neither part
/// overflows on its own.
fn leading_term(order: u32, power: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut acc = 1.0;
    for j in 0..order {
        acc /= 1.5 + f64::from(j);
        if j < power {
            acc *= half;
        }
    }
    for _ in order..power {
        acc *= half;
    }
    acc
}

/// Spherical Bessel function by partial sums of its power series, stopping
/// once a term drops below `tol` times the running sum.
///
/// Accuracy is limited by cancellation for `|x|` well above the order; use
/// [`sph_bessel`] for general evaluation.
pub fn sph_bessel_series(m: u32, x: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "series tolerance must be positive, got {tol}"
        )));
    }
    if x == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    series_tail(m, x, leading_term(m, m, x), tol)
}

fn recurrence(m: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if m == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for k in 1..m {
        let next = f64::from(2 * k + 1) / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluates `j_m(x)` and reports the route taken.
pub fn sph_bessel_report(m: u32, x: f64) -> BesselEvalReport {
    let ax = x.abs();
    let (magnitude, path) = if ax < SMALL_ARGUMENT {
        let v = if m == 0 { 1.0 } else { leading_term(m, m, ax) };
        (v, BesselPath::LimitAtZero)
    } else if ax >= f64::from(m) {
        (recurrence(m, ax), BesselPath::Recurrence)
    } else {
        // ax < m: terms shrink after k ~ m/4, so the cap is never reached.
        let v = series_tail(m, ax, leading_term(m, m, ax), f64::EPSILON * 0.5)
            .expect("series converges for |x| < m");
        (v, BesselPath::Series)
    };
    let value = if x < 0.0 && m % 2 == 1 {
        -magnitude
    } else {
        magnitude
    };
    BesselEvalReport {
        order: m,
        x,
        value,
        path,
    }
}

/// Spherical Bessel function of the first kind `j_m(x)`.
pub fn sph_bessel(m: u32, x: f64) -> f64 {
    sph_bessel_report(m, x).value
}

/// `(2/x)^shift · j_order(x)` for `x >= 0` and `shift <= order`.
///
/// This is the combination appearing in the Bessel-type covariances; the
/// factor `(2/x)^shift` cancels the leading powers of the series, so the
/// result is smooth through `x = 0` where it equals `1 / (3/2)_order` when
/// `shift == order` and zero otherwise.
pub fn scaled_sph_bessel(order: u32, shift: u32, x: f64) -> f64 {
    debug_assert!(shift <= order);
    let x = x.abs();
    let power = order - shift;
    if x < SMALL_ARGUMENT {
        return leading_term(order, power, x);
    }
    if x >= f64::from(order) {
        recurrence(order, x) * (2.0 / x).powi(shift as i32)
    } else {
        series_tail(order, x, leading_term(order, power, x), f64::EPSILON * 0.5)
            .expect("series converges for x < order")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn pochhammer_small_cases() {
        assert_eq!(pochhammer(1.5, 0).unwrap(), 1.0);
        assert_eq!(pochhammer(1.5, 2).unwrap(), 3.75);
        assert_eq!(pochhammer(0.5, 3).unwrap(), 1.875);
    }

    #[test]
    fn pochhammer_overflow_is_range_error() {
        assert!(matches!(pochhammer(1.5, 400), Err(Error::Range(_))));
    }

    #[test]
    fn pochhammer_matches_gamma_ratio() {
        for n in 0..20 {
            let direct = pochhammer(1.5, n).unwrap();
            let ratio = gamma(1.5 + f64::from(n)) / gamma(1.5);
            assert_relative_eq!(direct, ratio, max_relative = 1e-12);
        }
    }

    #[test]
    fn series_at_zero_is_exact() {
        assert_eq!(sph_bessel_series(0, 0.0, 1e-14).unwrap(), 1.0);
        assert_eq!(sph_bessel_series(1, 0.0, 1e-14).unwrap(), 0.0);
    }

    #[test]
    fn series_at_pi_vanishes_for_order_zero() {
        assert!(sph_bessel_series(0, PI, 1e-14).unwrap().abs() < 1e-12);
    }

    #[test]
    fn series_rejects_bad_tolerance() {
        assert!(sph_bessel_series(0, 1.0, 0.0).is_err());
        assert!(sph_bessel_series(0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(sph_bessel(0, 1.0), 1f64.sin(), max_relative = 1e-15);
        assert_relative_eq!(
            sph_bessel(1, 1.0),
            1f64.sin() - 1f64.cos(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn order_five_at_two() {
        // high-precision reference value
        let expected = 0.002_635_169_770_244_117_3;
        assert_relative_eq!(sph_bessel(5, 2.0), expected, max_relative = 1e-12);
        assert_relative_eq!(
            sph_bessel_series(5, 2.0, 1e-15).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn route_selection() {
        assert_eq!(sph_bessel_report(3, 1e-8).path, BesselPath::LimitAtZero);
        assert_eq!(sph_bessel_report(3, 2.0).path, BesselPath::Series);
        assert_eq!(sph_bessel_report(3, 3.0).path, BesselPath::Recurrence);
        assert_eq!(sph_bessel_report(0, 0.5).path, BesselPath::Recurrence);
    }

    #[test]
    fn j0_matches_sinc() {
        let mut x = 1e-6;
        while x <= 100.0 {
            assert_eq!(sph_bessel(0, x), x.sin() / x);
            x *= 1.37;
        }
    }

    #[test]
    fn parity() {
        for m in 0..12 {
            for &x in &[1e-7, 0.3, 2.0, 7.5, 31.0] {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(sph_bessel(m, -x), sign * sph_bessel(m, x));
            }
        }
    }

    #[test]
    fn series_and_recurrence_agree_where_series_is_benign() {
        for m in 0..=20 {
            for &x in &[0.01, 0.1, 1.0, 5.0] {
                let s = sph_bessel_series(m, x, 1e-15).unwrap();
                let v = sph_bessel(m, x);
                assert!(
                    (v - s).abs() / s.abs().max(1e-300) < 1e-10,
                    "m={m} x={x}: {v} vs {s}"
                );
            }
        }
    }

    #[test]
    fn scaled_matches_unscaled_product() {
        for order in 0..10 {
            for shift in 0..=order {
                for &x in &[0.5f64, 3.0, 12.0] {
                    let direct = (2.0 / x).powi(shift as i32) * sph_bessel(order, x);
                    assert_relative_eq!(
                        scaled_sph_bessel(order, shift, x),
                        direct,
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn scaled_limit_at_zero() {
        for s in 0..=10 {
            let expected = 1.0 / pochhammer(1.5, s).unwrap();
            assert_relative_eq!(scaled_sph_bessel(s, s, 0.0), expected, max_relative = 1e-15);
            assert_relative_eq!(scaled_sph_bessel(s, s, 1e-8), expected, max_relative = 1e-12);
        }
        assert_eq!(scaled_sph_bessel(3, 1, 0.0), 0.0);
    }
}
