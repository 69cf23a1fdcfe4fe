//! Approximation of smooth maps from boxes in ℝᵐ into Riemannian manifolds.
//!
//! A map `f` is pulled back to a single tangent space through the
//! logarithm, the resulting vector-valued function is sampled on a
//! Chebyshev tensor grid, compressed with a truncated Tucker decomposition
//! and interpolated, and the approximant is pushed back with the
//! exponential map. The curvature-based bounds in [`bounds`] turn the
//! tangent-space error into a certified error on the manifold.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod approximator;
pub mod bounds;
pub mod chebyshev;
pub mod linalg;
pub mod manifolds;
mod parallel;
pub mod tucker;

pub use error::{Error, Result};
pub use manifolds::{
    karcher_mean_estimate, ManifoldHandle, ManifoldKind, ManifoldPoint, RetractionMethod, SegrePoint,
    SegreTangent, TangentBasis, TangentVector,
};
