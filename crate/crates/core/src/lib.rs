//! Condition numbers of Riemannian least-squares problems on embedded
//! submanifolds of Euclidean space.
//!
//! The crate computes the sensitivity of critical points of
//! `min_{x ∈ I} ½‖x − a‖²` (and of the generalized problem where an output
//! is attached to `x` through a smooth solution manifold) from the Riemannian
//! Hessian `H_η = I − S_η`, where `S_η` is the Weingarten map of the input
//! manifold in the normal direction `η = a − x`.
//!
//! Modules, bottom-up:
//!
//! - [`manifold`]: local parametrizations, tangent frames, projections and
//!   built-in test manifolds.
//! - [`curvature`]: second fundamental form contraction, Weingarten map,
//!   principal curvatures and critical radii.
//! - [`condition`]: condition numbers of the critical point problem and its
//!   generalization, metric-aware spectral norms and curvature bounds.
//! - [`multiview`]: the pinhole multiview manifold, linear triangulation and
//!   the closed-form Weingarten map used for triangulation.
//! - [`solver`]: Levenberg–Marquardt for projections and triangulation.
//! - [`experiments`]: synthetic camera rigs, normal-ray sweeps and
//!   perturbation-based validation.

pub mod condition;
pub mod curvature;
mod error;
pub mod experiments;
pub mod linalg;
pub mod manifold;
pub mod multiview;
pub mod solver;

pub use error::{Error, Result};
