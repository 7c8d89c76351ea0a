//! Space-time covariances obtained by shifting the spatial lag,
//! `C(h; t) = C_S(h + βt)`.

use super::CovarianceModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatioTemporalModel {
    pub spatial: CovarianceModel,
    /// Space-time shift, in distance per unit time.
    pub beta: f64,
}

impl SpatioTemporalModel {
    pub fn new(spatial: CovarianceModel, beta: f64) -> Self {
        Self { spatial, beta }
    }

    /// Evaluates the spatial model at `|h + βt|`; every family here is even,
    /// so negative shifted lags use the reflection.
    pub fn covariance(&self, h: f64, t: f64) -> f64 {
        self.spatial.covariance((h + self.beta * t).abs())
    }
}

pub fn spacetime_eval(model: &SpatioTemporalModel, h: f64, t: f64) -> f64 {
    model.covariance(h, t)
}
