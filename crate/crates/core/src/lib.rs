//! Adaptive sup-norm estimation of densities and distribution functions with
//! spline (Battle-Lemarié) projection kernels and Lepski-type level selection
//! driven by Rademacher-symmetrized thresholds.

pub mod cli;
pub mod error;
pub mod estimator;
pub mod lepski;
pub mod piecewise;
mod poly;
pub mod rademacher;
pub mod risk_lab;
pub mod rng;
pub mod spline_kernel;

pub use error::{Error, Result};
pub use estimator::{CdfEstimate, DensityEstimate, Sample};
pub use piecewise::{CumulativePoly, DyadicPiecewisePoly, SupNorm};
pub use rng::StreamKey;
pub use spline_kernel::{ProjectionKernel, SplineOrder};
