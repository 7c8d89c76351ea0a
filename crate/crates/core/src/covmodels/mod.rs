//! Stationary isotropic covariance models.
//!
//! A [`CovarianceModel`] pairs a [`Family`] (with its structural constants
//! `r`, `s` where applicable) with a [`ParameterVector`]. Evaluation follows
//! the usual geostatistical convention:
//!
//! ```text
//! C(0) = σ_e² + σ²
//! C(h) = σ² ρ(h)          h > 0
//! γ(h) = C(0) - C(h)      (so γ(0⁺) = σ_e², the nugget jump)
//! ```
//!
//! where `ρ` is the unscaled family evaluated at `h/η`.

mod families;
mod pd;
mod spacetime;

use std::fmt;
use std::str::FromStr;

pub use families::{
    bessel_c1, cosine_exponential, cosine_exponential_unscaled, gaussian_ho_cov, hole_effect,
    hole_effect_unscaled, muller_c2, sine_cosine, sine_cosine_unscaled,
};
pub use pd::{covariance_matrix, min_eigenvalue, pd_diagnostic, MAX_PD_POINTS};
pub use spacetime::{spacetime_eval, SpatioTemporalModel};

use crate::error::{Error, Result};
use crate::kernels::{MAX_R, MAX_S};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamName {
    Nugget,
    Sill,
    Range,
    Decay,
}

impl ParamName {
    pub const ALL: [ParamName; 4] = [
        ParamName::Nugget,
        ParamName::Sill,
        ParamName::Range,
        ParamName::Decay,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ParamName::Nugget => "nugget",
            ParamName::Sill => "sill",
            ParamName::Range => "range",
            ParamName::Decay => "decay",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nugget" => Ok(ParamName::Nugget),
            "sill" => Ok(ParamName::Sill),
            "range" => Ok(ParamName::Range),
            "decay" => Ok(ParamName::Decay),
            other => Err(Error::InvalidParameter(format!(
                "unknown parameter name `{other}`"
            ))),
        }
    }
}

/// Model parameters `θ = (σ_e², σ², η[, ν])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterVector {
    /// Nugget effect σ_e².
    pub nugget: f64,
    /// Partial sill σ².
    pub sill: f64,
    /// Range / smoothing parameter η.
    pub range: f64,
    /// Decay ν, used by the cosine-exponential model only.
    pub decay: Option<f64>,
}

impl ParameterVector {
    pub fn new(nugget: f64, sill: f64, range: f64) -> Self {
        Self {
            nugget,
            sill,
            range,
            decay: None,
        }
    }

    pub fn with_decay(nugget: f64, sill: f64, range: f64, decay: f64) -> Self {
        Self {
            nugget,
            sill,
            range,
            decay: Some(decay),
        }
    }

    pub fn get(&self, name: ParamName) -> Option<f64> {
        match name {
            ParamName::Nugget => Some(self.nugget),
            ParamName::Sill => Some(self.sill),
            ParamName::Range => Some(self.range),
            ParamName::Decay => self.decay,
        }
    }

    pub fn set(&mut self, name: ParamName, value: f64) {
        match name {
            ParamName::Nugget => self.nugget = value,
            ParamName::Sill => self.sill = value,
            ParamName::Range => self.range = value,
            ParamName::Decay => self.decay = Some(value),
        }
    }

    /// Checks finiteness and sign constraints.
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, strict: bool| {
            if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
                let rel = if strict { "> 0" } else { ">= 0" };
                Err(Error::InvalidParameter(format!(
                    "{name} must be finite and {rel}, got {v}"
                )))
            } else {
                Ok(())
            }
        };
        check("nugget", self.nugget, false)?;
        check("sill", self.sill, false)?;
        check("range", self.range, true)?;
        if let Some(d) = self.decay {
            check("decay", d, true)?;
        }
        Ok(())
    }
}

/// Covariance family together with its structural constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Characteristic function of the higher-order Gaussian kernel `G_{2r}`.
    GaussianHo { r: u32 },
    /// Characteristic function of `M_s`.
    BesselC1 { s: u32 },
    /// Characteristic function of `M_{2r,s}`.
    MullerC2 { r: u32, s: u32 },
    HoleEffect,
    SineCosine,
    CosineExponential,
}

impl Family {
    pub const NAMES: [&'static str; 6] = [
        "gaussian_ho",
        "bessel_c1",
        "muller_c2",
        "hole_effect",
        "sine_cosine",
        "cosine_exponential",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::GaussianHo { .. } => "gaussian_ho",
            Family::BesselC1 { .. } => "bessel_c1",
            Family::MullerC2 { .. } => "muller_c2",
            Family::HoleEffect => "hole_effect",
            Family::SineCosine => "sine_cosine",
            Family::CosineExponential => "cosine_exponential",
        }
    }

    /// Builds a family from its name and structural constants; `r` and `s`
    /// are ignored by families that do not use them.
    pub fn from_parts(name: &str, r: u32, s: u32) -> Result<Self> {
        let family = match name {
            "gaussian_ho" => Family::GaussianHo { r },
            "bessel_c1" => Family::BesselC1 { s },
            "muller_c2" => Family::MullerC2 { r, s },
            "hole_effect" => Family::HoleEffect,
            "sine_cosine" => Family::SineCosine,
            "cosine_exponential" => Family::CosineExponential,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown covariance family `{other}`"
                )))
            }
        };
        family.validate()?;
        Ok(family)
    }

    pub fn r(&self) -> Option<u32> {
        match *self {
            Family::GaussianHo { r } | Family::MullerC2 { r, .. } => Some(r),
            _ => None,
        }
    }

    pub fn s(&self) -> Option<u32> {
        match *self {
            Family::BesselC1 { s } | Family::MullerC2 { s, .. } => Some(s),
            _ => None,
        }
    }

    pub fn uses_decay(&self) -> bool {
        matches!(self, Family::CosineExponential)
    }

    /// Parameters this family reads, in canonical order.
    pub fn parameter_names(&self) -> &'static [ParamName] {
        if self.uses_decay() {
            &ParamName::ALL
        } else {
            &ParamName::ALL[..3]
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.r() {
            if r == 0 || r > MAX_R {
                return Err(Error::InvalidParameter(format!(
                    "{}: r = {r} must lie in 1..={MAX_R}",
                    self.name()
                )));
            }
        }
        if let Some(s) = self.s() {
            if s > MAX_S {
                return Err(Error::InvalidParameter(format!(
                    "{}: s = {s} exceeds {MAX_S}",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::GaussianHo { r } => write!(f, "gaussian_ho(r={r})"),
            Family::BesselC1 { s } => write!(f, "bessel_c1(s={s})"),
            Family::MullerC2 { r, s } => write!(f, "muller_c2(r={r}, s={s})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A parametrized stationary isotropic covariance model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceModel {
    family: Family,
    params: ParameterVector,
}

impl CovarianceModel {
    pub fn new(family: Family, params: ParameterVector) -> Result<Self> {
        family.validate()?;
        params.validate()?;
        if family.uses_decay() && params.decay.is_none() {
            return Err(Error::InvalidParameter(format!(
                "{family} requires a decay parameter"
            )));
        }
        Ok(Self { family, params })
    }

    /// Unit sill, no nugget, unit range: the bare family.
    pub fn unscaled(family: Family) -> Result<Self> {
        let params = if family.uses_decay() {
            ParameterVector::with_decay(0.0, 1.0, 1.0, 1.0)
        } else {
            ParameterVector::new(0.0, 1.0, 1.0)
        };
        Self::new(family, params)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &ParameterVector {
        &self.params
    }

    pub fn with_params(&self, params: ParameterVector) -> Result<Self> {
        Self::new(self.family, params)
    }

    /// Total sill `σ_e² + σ²`.
    pub fn total_sill(&self) -> f64 {
        self.params.nugget + self.params.sill
    }

    /// Correlation of the structured part, `ρ(h)` with `ρ(0) = 1`.
    pub fn correlation(&self, h: f64) -> f64 {
        let h = h.abs();
        let p = &self.params;
        let x = h / p.range;
        match self.family {
            Family::GaussianHo { r } => gaussian_ho_cov(r, x),
            Family::BesselC1 { s } => bessel_c1(s, x),
            Family::MullerC2 { r, s } => muller_c2(r, s, x),
            Family::HoleEffect => hole_effect_unscaled(x),
            Family::SineCosine => sine_cosine_unscaled(x),
            Family::CosineExponential => {
                cosine_exponential_unscaled(h, p.decay.unwrap_or(f64::NAN), p.range)
            }
        }
    }

    /// `C(h)`, with the nugget contributing at lag zero only.
    pub fn covariance(&self, h: f64) -> f64 {
        if h == 0.0 {
            self.total_sill()
        } else {
            self.params.sill * self.correlation(h)
        }
    }

    /// `γ(h) = C(0) - C(h)`.
    pub fn semivariogram(&self, h: f64) -> f64 {
        if h == 0.0 {
            0.0
        } else {
            self.covariance(0.0) - self.covariance(h)
        }
    }
}

/// `γ(h) = C(0) - C(h)` with `γ(0) = 0`.
pub fn semivariogram_of(model: &CovarianceModel, h: f64) -> f64 {
    model.semivariogram(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn all_families() -> Vec<Family> {
        vec![
            Family::GaussianHo { r: 1 },
            Family::GaussianHo { r: 3 },
            Family::BesselC1 { s: 0 },
            Family::BesselC1 { s: 4 },
            Family::MullerC2 { r: 2, s: 1 },
            Family::MullerC2 { r: 3, s: 3 },
            Family::HoleEffect,
            Family::SineCosine,
            Family::CosineExponential,
        ]
    }

    #[test]
    fn lag_zero_returns_total_sill() {
        for family in all_families() {
            let params = ParameterVector::with_decay(0.3, 2.0, 1.5, 4.0);
            let model = CovarianceModel::new(family, params).unwrap();
            assert_eq!(model.covariance(0.0), 2.3);
            let unit = CovarianceModel::unscaled(family).unwrap();
            assert_eq!(unit.covariance(0.0), 1.0);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        let f = Family::SineCosine;
        assert!(CovarianceModel::new(f, ParameterVector::new(-1.0, 1.0, 1.0)).is_err());
        assert!(CovarianceModel::new(f, ParameterVector::new(0.0, 1.0, 0.0)).is_err());
        assert!(CovarianceModel::new(f, ParameterVector::new(0.0, f64::NAN, 1.0)).is_err());
        assert!(CovarianceModel::new(
            Family::CosineExponential,
            ParameterVector::new(0.0, 1.0, 1.0)
        )
        .is_err());
        assert!(Family::from_parts("muller_c2", 0, 1).is_err());
        assert!(Family::from_parts("muller_c2", 2, 40).is_err());
        assert!(Family::from_parts("matern", 1, 1).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for family in all_families() {
            let back =
                Family::from_parts(family.name(), family.r().unwrap_or(1), family.s().unwrap_or(0))
                    .unwrap();
            assert_eq!(back, family);
        }
    }

    #[test]
    fn semivariogram_examples() {
        let hole = CovarianceModel::new(Family::HoleEffect, ParameterVector::new(0.0, 1.0, 3.0))
            .unwrap();
        assert!(hole.semivariogram(1e-9).abs() < 1e-15);
        let sc = CovarianceModel::new(Family::SineCosine, ParameterVector::new(0.0, 1.0, 3.0))
            .unwrap();
        let expected = 1.0 - 3.0 / (PI * PI);
        assert!((semivariogram_of(&sc, 3.0 * PI) - expected).abs() < 1e-14);
        assert_eq!(semivariogram_of(&sc, 0.0), 0.0);
    }

    #[test]
    fn nugget_is_a_jump_in_the_semivariogram() {
        let model =
            CovarianceModel::new(Family::HoleEffect, ParameterVector::new(0.7, 1.0, 3.0)).unwrap();
        assert_eq!(model.semivariogram(0.0), 0.0);
        assert!((model.semivariogram(1e-9) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn bridge_holds_on_grid() {
        for family in all_families() {
            let model =
                CovarianceModel::new(family, ParameterVector::with_decay(0.4, 1.3, 2.0, 7.0))
                    .unwrap();
            for i in 1..500 {
                let h = f64::from(i) * 0.05;
                let lhs = model.semivariogram(h) + model.covariance(h);
                assert!((lhs - model.covariance(0.0)).abs() <= 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn bounded_by_value_at_zero() {
        for family in all_families() {
            for params in [
                ParameterVector::with_decay(0.0, 1.0, 1.0, 3.0),
                ParameterVector::with_decay(0.5, 2.0, 0.3, 0.5),
                ParameterVector::with_decay(1.0, 0.1, 7.0, 40.0),
            ] {
                let model = CovarianceModel::new(family, params).unwrap();
                let c0 = model.covariance(0.0);
                for i in 0..=10_000 {
                    let h = f64::from(i) * 0.01;
                    assert!(model.covariance(h).abs() <= c0 * (1.0 + 1e-12), "{family} h={h}");
                }
            }
        }
    }

    #[test]
    fn sinc_identities() {
        use crate::specfun::sph_bessel;
        let hole = CovarianceModel::unscaled(Family::HoleEffect).unwrap();
        let sc = CovarianceModel::unscaled(Family::SineCosine).unwrap();
        for i in 1..400 {
            let h = f64::from(i) * 0.125;
            assert!((hole.covariance(h) - sph_bessel(0, h)).abs() < 1e-12);
            assert!((sc.covariance(h) - 3.0 * sph_bessel(1, h) / h).abs() < 1e-12);
        }
    }

    #[test]
    fn wrappers_agree_with_parametrized_forms_without_nugget() {
        let theta = ParameterVector::new(0.0, 2.5, 1.7);
        let hole = CovarianceModel::new(Family::HoleEffect, theta).unwrap();
        let sc = CovarianceModel::new(Family::SineCosine, theta).unwrap();
        for &h in &[0.0, 0.4, 3.3, 12.0] {
            assert_eq!(hole.covariance(h), hole_effect(&theta, h));
            assert_eq!(sc.covariance(h), sine_cosine(&theta, h));
        }
    }
}
