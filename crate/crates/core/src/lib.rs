pub mod covmodels;
pub mod error;
pub mod fit;
pub mod kernels;
mod quad;
pub mod simulate;
pub mod specfun;
pub mod variogram;

pub use covmodels::{CovarianceModel, Family, ParamName, ParameterVector, SpatioTemporalModel};
pub use error::{Error, ErrorCategory, Result};
pub use fit::{FitProblem, FitResult, FreeParam};
pub use simulate::{EnvelopeResult, SimulatedField};
pub use variogram::{BinningConfig, Dataset, EmpiricalVariogram, Point};
