//! Estimation of the error distribution in nonparametric regression
//! `Y = r(Z) + ε`.
//!
//! The regression function is estimated by an under-smoothed local
//! polynomial fit ([`localpoly`]); the residuals feed a kernel-smoothed
//! empirical distribution function ([`estimators::SmoothedEdf`]). The
//! remaining modules supply the simulation models and asymptotic variance
//! formulas ([`models`]) and a Monte Carlo engine ([`montecarlo`]) that
//! checks the estimator's first-order expansion and variance empirically.

pub mod error;
pub mod estimators;
pub mod kernels;
pub mod linalg;
pub mod localpoly;
pub mod models;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use estimators::{
    c0_hat, el_cdf_eval, el_weights, influence_function, meanzero_corrected_eval, BandwidthSchedule,
    Bandwidths, EdfCurve, ElWeights, EmpiricalLikelihood, MeanZeroCorrected, SmoothedEdf,
};
pub use kernels::{Kernel, KernelFamily};
pub use localpoly::{Dataset, LocalPolyConfig, LocalPolyFit};
pub use models::{
    sample_scenario, var_efficient_meanzero, var_empirical, var_smoothed, variance_gap,
    CovariateModel, ErrorModel, RegressionModel,
};
