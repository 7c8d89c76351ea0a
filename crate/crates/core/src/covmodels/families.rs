//! Unscaled covariance families and the displayed parametric forms of the
//! wave models.
//!
//! The unscaled families take the value 1 at lag zero. The parametric forms
//! (`hole_effect`, `sine_cosine`, `cosine_exponential`) add the nugget as a
//! constant at every lag, exactly as the closed forms are usually written;
//! [`super::CovarianceModel`] instead confines the nugget to lag zero.

use super::ParameterVector;
use crate::specfun::{scaled_sph_bessel, sph_bessel, SMALL_ARGUMENT};

/// Higher-order Gaussian covariance
/// `exp(-h²/2) Σ_{k<r} h^{2k} / (2^k k!)`, the characteristic function of
/// `G_{2r}`.
pub fn gaussian_ho_cov(r: u32, h: f64) -> f64 {
    let q = 0.5 * h * h;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..r {
        term *= q / f64::from(k);
        sum += term;
    }
    (-q).exp() * sum
}

/// Bessel covariance `(3/2)_s (2/h)^s j_s(h)`, the characteristic function of
/// `M_s`.
pub fn bessel_c1(s: u32, h: f64) -> f64 {
    let h = h.abs();
    if h < SMALL_ARGUMENT {
        return 1.0;
    }
    let mut poch = 1.0;
    for j in 0..s {
        poch *= 1.5 + f64::from(j);
    }
    poch * scaled_sph_bessel(s, s, h)
}

/// `(2/√π) α_s(m)` with `α_s(m) = Γ(1/2+m+s)(1/2+2m+s)/m!`.
///
/// `Γ(1/2+n) = √π (1/2)_n` turns the coefficient into a finite product.
pub(crate) fn muller_coefficient(s: u32, m: u32) -> f64 {
    let mut acc = 2.0 * (0.5 + f64::from(2 * m + s));
    for j in 0..(m + s) {
        acc *= 0.5 + f64::from(j);
    }
    for j in 1..=m {
        acc /= f64::from(j);
    }
    acc
}

/// Characteristic function of Müller's kernel `M_{2r,s}`:
/// `(2/√π)(2/h)^s Σ_{m<r} α_s(m) j_{s+2m}(h)`.
pub fn muller_c2(r: u32, s: u32, h: f64) -> f64 {
    let h = h.abs();
    if h < SMALL_ARGUMENT {
        return 1.0;
    }
    (0..r)
        .map(|m| muller_coefficient(s, m) * scaled_sph_bessel(s + 2 * m, s, h))
        .sum()
}

/// `sin(x)/x`.
pub fn hole_effect_unscaled(x: f64) -> f64 {
    sph_bessel(0, x.abs())
}

/// `3 j_1(x) / x = (3/x)[sin(x)/x² - cos(x)/x]`.
pub fn sine_cosine_unscaled(x: f64) -> f64 {
    let x = x.abs();
    if x < SMALL_ARGUMENT {
        return 1.0;
    }
    3.0 * sph_bessel(1, x) / x
}

pub fn cosine_exponential_unscaled(h: f64, decay: f64, range: f64) -> f64 {
    let h = h.abs();
    (-3.0 * h / decay).exp() * (h / range).cos()
}

fn with_nugget(theta: &ParameterVector, h: f64, corr: impl FnOnce(f64) -> f64) -> f64 {
    if h == 0.0 {
        theta.nugget + theta.sill
    } else {
        theta.nugget + theta.sill * corr(h.abs())
    }
}

/// `σ_e² + σ² (η/h) sin(h/η)`.
pub fn hole_effect(theta: &ParameterVector, h: f64) -> f64 {
    with_nugget(theta, h, |h| hole_effect_unscaled(h / theta.range))
}

/// `σ_e² + σ² (3η/h)[sin(h/η) η²/h² - cos(h/η) η/h]`.
pub fn sine_cosine(theta: &ParameterVector, h: f64) -> f64 {
    with_nugget(theta, h, |h| sine_cosine_unscaled(h / theta.range))
}

/// `σ_e² + σ² exp(-3h/ν) cos(h/η)`.
///
/// # Panics
///
/// If `theta` carries no decay parameter.
pub fn cosine_exponential(theta: &ParameterVector, h: f64) -> f64 {
    let decay = theta
        .decay
        .expect("cosine-exponential model needs a decay parameter");
    with_nugget(theta, h, |h| {
        cosine_exponential_unscaled(h, decay, theta.range)
    })
}
