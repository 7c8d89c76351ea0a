//! Higher-order kernels on the real line.
//!
//! Two families are provided: Müller's `s`-smooth kernels of order `2r` with
//! support `[-1, 1]`, in Hansen's product form `B_{r,s}(x) M_s(x)`, and the
//! higher-order Gaussian kernels `G_{2r}` that arise as their limit when
//! `s → ∞` after rescaling by `√(2s)`.

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::factorial;

pub const MAX_R: u32 = 8;
pub const MAX_S: u32 = 32;

/// Absolute tolerance used for moment quadrature.
pub const MOMENT_TOL: f64 = 1e-10;

/// Integration half-width for the Gaussian-type kernels.
pub const GAUSSIAN_TRUNCATION: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Muller,
    GaussianHigherOrder,
}

/// A validated kernel: family, half-order `r` and, for Müller kernels, the
/// smoothness `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelSpec {
    family: KernelFamily,
    r: u32,
    s: u32,
}

impl KernelSpec {
    pub fn muller(r: u32, s: u32) -> Result<Self> {
        check_r(r)?;
        if s > MAX_S {
            return Err(Error::InvalidParameter(format!(
                "smoothness s = {s} exceeds the supported maximum {MAX_S}"
            )));
        }
        Ok(Self {
            family: KernelFamily::Muller,
            r,
            s,
        })
    }

    pub fn gaussian(r: u32) -> Result<Self> {
        check_r(r)?;
        Ok(Self {
            family: KernelFamily::GaussianHigherOrder,
            r,
            s: 0,
        })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// Half the kernel order.
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Kernel order `2r`.
    pub fn order(&self) -> u32 {
        2 * self.r
    }

    /// `None` for kernels with unbounded support.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self.family {
            KernelFamily::Muller => Some((-1.0, 1.0)),
            KernelFamily::GaussianHigherOrder => None,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match self.family {
            KernelFamily::Muller => muller_kernel(self.r, self.s, x),
            KernelFamily::GaussianHigherOrder => gaussian_ho_kernel(self.r, x),
        }
    }
}

fn check_r(r: u32) -> Result<()> {
    if r == 0 || r > MAX_R {
        return Err(Error::InvalidParameter(format!(
            "kernel half-order r = {r} must lie in 1..={MAX_R}"
        )));
    }
    Ok(())
}

/// Müller's kernel `M_{2r,s}(x)`.
///
/// Every Pochhammer quotient is accumulated as a product of ratios, which
/// keeps the evaluation finite for large `s` (the Gaussian-limit check uses
/// `s` in the thousands). Callers that need the construction-time limits
/// should go through [`KernelSpec`].
pub fn muller_kernel(r: u32, s: u32, x: f64) -> f64 {
    if x.abs() > 1.0 {
        return 0.0;
    }
    let sf = f64::from(s);
    let x2 = x * x;

    // (1/2)_{s+1} / s!  =  1/2 · Π_{j=1}^{s} (j + 1/2) / j
    let mut base = 0.5;
    for j in 1..=s {
        let jf = f64::from(j);
        base *= (jf + 0.5) / jf;
    }
    let m_s = base * (1.0 - x2).powi(s as i32);

    // (3/2)_{r-1} (3/2+s)_{r-1} / (s+1)_{r-1}
    let mut prefactor = 1.0;
    for j in 0..r.saturating_sub(1) {
        let jf = f64::from(j);
        prefactor *= (1.5 + jf) * (1.5 + sf + jf) / (sf + 1.0 + jf);
    }

    let a = 0.5 + sf + f64::from(r);
    let mut sum = 0.0;
    let mut rising = 1.0; // (a)_k
    let mut three_halves = 1.0; // (3/2)_k
    let mut x_pow = 1.0; // x^{2k}
    for k in 0..r {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * rising * x_pow / (factorial(k) * factorial(r - 1 - k) * three_halves);
        let kf = f64::from(k);
        rising *= a + kf;
        three_halves *= 1.5 + kf;
        x_pow *= x2;
    }

    prefactor * sum * m_s
}

/// Coefficients of `He_n(x) / x` for odd `n`, lowest power first, in powers
/// of `x^2`.
fn hermite_over_x(n: u32) -> Vec<f64> {
    debug_assert!(n % 2 == 1);
    let half = (n - 1) / 2;
    let nf = factorial(n);
    // He_n(x) = n! Σ_k (-1)^k x^{n-2k} / (k! (n-2k)! 2^k); after dividing by x
    // the k-th term carries x^{2(half - k)}.
    let mut coeffs = vec![0.0; half as usize + 1];
    for k in 0..=half {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * nf / (factorial(k) * factorial(n - 2 * k) * 2f64.powi(k as i32));
        coeffs[(half - k) as usize] = c;
    }
    coeffs
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Higher-order Gaussian kernel
/// `G_{2r}(x) = (-1)^r φ^{(2r-1)}(x) / (2^{r-1} (r-1)! x)`.
///
/// Uses `φ^{(n)}(x) = (-1)^n He_n(x) φ(x)`; the division by `x` is carried
/// out on the Hermite coefficients, so `x = 0` needs no special case.
pub fn gaussian_ho_kernel(r: u32, x: f64) -> f64 {
    assert!(r >= 1, "kernel half-order must be positive");
    let coeffs = hermite_over_x(2 * r - 1);
    let x2 = x * x;
    let poly = coeffs.iter().rev().fold(0.0, |acc, &c| acc * x2 + c);
    // (-1)^r · (-1)^{2r-1} = (-1)^{r+1}
    let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
    let denom = 2f64.powi(r as i32 - 1) * factorial(r - 1);
    sign * poly * std_normal_pdf(x) / denom
}

/// `μ_j(K) = ∫ x^j K(x) dx` by adaptive quadrature over the support (or over
/// `[-12, 12]` for Gaussian-type kernels).
pub fn kernel_moment(spec: &KernelSpec, j: u32) -> Result<f64> {
    let (a, b) = spec
        .support()
        .unwrap_or((-GAUSSIAN_TRUNCATION, GAUSSIAN_TRUNCATION));
    quad::integrate(
        |x| x.powi(j as i32) * spec.evaluate(x),
        a,
        b,
        MOMENT_TOL,
    )
}

/// `(1/√(2s)) M_{2r,s}(x/√(2s))`, which tends to `G_{2r}(x)` as `s` grows.
pub fn muller_gaussian_limit_check(r: u32, s: u32, x: f64) -> f64 {
    assert!(s >= 1, "limit check needs s >= 1");
    let scale = (2.0 * f64::from(s)).sqrt();
    muller_kernel(r, s, x / scale) / scale
}
