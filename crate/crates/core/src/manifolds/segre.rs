//! Rank-one matrices λ·x₁x₂ᵀ as a cone over S^{n₁−1} × S^{n₂−1}.
//!
//! The metric induced by the embedding is dλ² + λ²(g₁ + g₂), so a geodesic
//! is a straight line in the plane spanned by the radial direction and one
//! great-circle direction of the product sphere. Points (λ, x₁, x₂) and
//! (λ, −x₁, −x₂) are the same matrix.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::sphere;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SegrePoint {
    pub scale: f64,
    pub left: DVector<f64>,
    pub right: DVector<f64>,
}

/// Velocity (λ′, x₁′, x₂′) with xᵢ′ ⊥ xᵢ.
#[derive(Debug, Clone, PartialEq)]
pub struct SegreTangent {
    pub radial: f64,
    pub left: DVector<f64>,
    pub right: DVector<f64>,
}

impl SegrePoint {
    pub fn new(scale: f64, left: DVector<f64>, right: DVector<f64>) -> Self {
        Self { scale, left, right }
    }

    /// The matrix λ·x₁x₂ᵀ.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        &self.left * self.right.transpose() * self.scale
    }
}

impl SegreTangent {
    /// The ambient matrix λ′x₁x₂ᵀ + λ(x₁′x₂ᵀ + x₁x₂′ᵀ).
    pub fn to_matrix(&self, at: &SegrePoint) -> DMatrix<f64> {
        &at.left * at.right.transpose() * self.radial
            + (&self.left * at.right.transpose() + &at.left * self.right.transpose()) * at.scale
    }
}

pub(super) fn point_residual(n1: usize, n2: usize, p: &SegrePoint) -> Result<f64> {
    if p.left.len() != n1 || p.right.len() != n2 {
        return Err(Error::ShapeMismatch(format!(
            "expected factors of lengths {n1} and {n2}, got {} and {}",
            p.left.len(),
            p.right.len()
        )));
    }
    if !(p.scale > 0.0) || !p.scale.is_finite() {
        return Ok(f64::INFINITY);
    }
    let r = (p.left.norm() - 1.0).abs().max((p.right.norm() - 1.0).abs());
    Ok(if r.is_nan() { f64::INFINITY } else { r })
}

pub(super) fn tangent_residual(p: &SegrePoint, v: &SegreTangent) -> Result<f64> {
    if p.left.len() != v.left.len() || p.right.len() != v.right.len() {
        return Err(Error::ShapeMismatch("Segre tangent factor lengths differ".into()));
    }
    let r1 = p.left.dot(&v.left).abs() / (1.0 + v.left.norm());
    let r2 = p.right.dot(&v.right).abs() / (1.0 + v.right.norm());
    let r = r1.max(r2);
    Ok(if r.is_nan() || !v.radial.is_finite() { f64::INFINITY } else { r })
}

pub(super) fn inner(p: &SegrePoint, u: &SegreTangent, v: &SegreTangent) -> f64 {
    u.radial * v.radial + p.scale * p.scale * (u.left.dot(&v.left) + u.right.dot(&v.right))
}

pub(super) fn exp(p: &SegrePoint, v: &SegreTangent) -> Result<SegrePoint> {
    let s = (v.left.norm_squared() + v.right.norm_squared()).sqrt();
    let x = p.scale + v.radial;
    let y = p.scale * s;
    let scale = x.hypot(y);
    if !(scale > 1e-14 * p.scale) {
        return Err(Error::Domain("geodesic reaches the zero matrix".into()));
    }
    if s == 0.0 {
        return Ok(SegrePoint {
            scale,
            left: p.left.clone(),
            right: p.right.clone(),
        });
    }
    let phi = y.atan2(x);
    let ratio = phi / s;
    Ok(SegrePoint {
        scale,
        left: sphere::exp(&p.left, &(&v.left * ratio)),
        right: sphere::exp(&p.right, &(&v.right * ratio)),
    })
}

/// Angle φ on the product sphere to the closer of the two representatives
/// of `q`, and the sign of that representative.
fn base_angle(p: &SegrePoint, q: &SegrePoint) -> (f64, f64) {
    let t1 = sphere::distance(&p.left, &q.left);
    let t2 = sphere::distance(&p.right, &q.right);
    let f1 = sphere::distance(&p.left, &-&q.left);
    let f2 = sphere::distance(&p.right, &-&q.right);
    let direct = t1.hypot(t2);
    let flipped = f1.hypot(f2);
    if flipped < direct {
        (flipped, -1.0)
    } else {
        (direct, 1.0)
    }
}

pub(super) fn distance(p: &SegrePoint, q: &SegrePoint) -> Result<f64> {
    let (phi, _) = base_angle(p, q);
    if phi >= PI {
        return Ok(p.scale + q.scale);
    }
    let half = (0.5 * phi).sin();
    let d2 = (q.scale - p.scale).powi(2) + 4.0 * p.scale * q.scale * half * half;
    Ok(d2.sqrt())
}

pub(super) fn log(p: &SegrePoint, q: &SegrePoint) -> Result<SegreTangent> {
    let (phi, sign) = base_angle(p, q);
    if phi > PI - 1e-8 {
        return Err(Error::chart("Segre logarithm: geodesic would pass through zero"));
    }
    let y1 = &q.left * sign;
    let y2 = &q.right * sign;
    let w1 = sphere::log(&p.left, &y1)?;
    let w2 = sphere::log(&p.right, &y2)?;
    let half = (0.5 * phi).sin();
    let radial = (q.scale - p.scale) - 2.0 * q.scale * half * half;
    // λ₀·s = λ₁ sin φ and the sphere logs have total length φ.
    let ratio = q.scale * sphere::sinc(phi) / p.scale;
    Ok(SegreTangent {
        radial,
        left: w1 * ratio,
        right: w2 * ratio,
    })
}

/// −1/(λ_p − σ)²: the curvature of the cone grows like the inverse squared
/// distance to the apex.
pub(super) fn curvature_lower_bound(p: &SegrePoint, sigma: f64) -> Result<f64> {
    let lambda = p.scale - sigma;
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "chart radius {sigma} reaches the zero matrix from scale {}",
            p.scale
        )));
    }
    Ok(-1.0 / (lambda * lambda))
}
