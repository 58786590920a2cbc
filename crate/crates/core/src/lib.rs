//! # flowqmc
//!
//! Randomized quasi-Monte Carlo point sets pushed through coupling
//! normalizing flows, and the estimators built on top of them.
//!
//! The crate has three layers:
//!
//! - **Uniform point sets** ([`qmc`]): plain Monte Carlo, scrambled Sobol',
//!   randomized Halton, and shifted rank-1 lattice generators on `[0,1)^d`,
//!   plus an exact small-instance star-discrepancy evaluator.
//! - **Flows** ([`gaussian`], [`flow`], [`train`]): the map from the unit
//!   hypercube to a standard Gaussian (inverse CDF or Box-Muller), coupling
//!   flows (affine and rational-quadratic-spline transforms) with exact
//!   forward/inverse maps and log-determinants, and a small tape-based
//!   reverse-mode trainer for forward-KL and reverse-KL objectives.
//! - **Estimators** ([`targets`], [`estimators`]): benchmark targets
//!   (a 40-component Gaussian mixture, the dualmoon family), importance
//!   sampling, self-normalized importance sampling, the independent MRTH
//!   chain, the independent importance Markov chain, effective sample size,
//!   and MC/RQMC standard-deviation ratio diagnostics.
//!
//! ## Example
//!
//! ```
//! use flowqmc::estimators::{make_weighted_sample, snis_estimate};
//! use flowqmc::flow::{Activation, FlowModel, TransformKind};
//! use flowqmc::gaussian::MapKind;
//! use flowqmc::qmc::sobol_points;
//! use flowqmc::targets::{dualmoon_target, test_function};
//!
//! // An untrained (identity) flow still gives a valid, if inefficient,
//! // proposal: weights correct the mismatch.
//! let flow = FlowModel::coupling_stack(
//!     2,
//!     4,
//!     TransformKind::RqSpline { bins: 8, bound: 4.0 },
//!     &[16, 16],
//!     Activation::Tanh,
//! )
//! .unwrap();
//! let target = dualmoon_target(2);
//! let phi1 = test_function("dualmoon:phi1").unwrap();
//!
//! let points = sobol_points(10, 2, Some(7)).unwrap();
//! let ws = make_weighted_sample(&flow, &target, &points, MapKind::Inverse).unwrap();
//! let estimate = snis_estimate(&ws, &phi1).unwrap();
//! assert!(estimate.is_finite());
//! ```

pub mod autodiff;
pub mod estimators;
pub mod flow;
pub mod gaussian;
pub mod matrix;
pub mod qmc;
pub mod scalar;
pub mod seeding;
pub mod targets;
pub mod train;

pub use matrix::Matrix;
