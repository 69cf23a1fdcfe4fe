use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// sin(t)/t, accurate near zero.
pub(super) fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

pub(super) fn point_residual(n: usize, p: &DVector<f64>) -> Result<f64> {
    if p.len() != n {
        return Err(Error::ShapeMismatch(format!("expected a vector of length {n}, got {}", p.len())));
    }
    let r = (p.norm() - 1.0).abs();
    Ok(if r.is_nan() { f64::INFINITY } else { r })
}

pub(super) fn tangent_residual(p: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if p.len() != v.len() {
        return Err(Error::ShapeMismatch(format!(
            "tangent of length {} at a point of length {}",
            v.len(),
            p.len()
        )));
    }
    let r = p.dot(v).abs() / (1.0 + v.norm());
    Ok(if r.is_nan() { f64::INFINITY } else { r })
}

pub(super) fn exp(p: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let t = v.norm();
    let q = p * t.cos() + v * sinc(t);
    let len = q.norm();
    q / len
}

/// Great-circle angle, symmetric in its arguments.
pub(super) fn distance(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    2.0 * (p - q).norm().atan2((p + q).norm())
}

pub(super) fn log(p: &DVector<f64>, q: &DVector<f64>) -> Result<DVector<f64>> {
    let theta = distance(p, q);
    if theta > PI - 1e-8 {
        return Err(Error::chart("sphere logarithm at an antipodal point"));
    }
    let w = q - p * p.dot(q);
    let s = w.norm();
    if s == 0.0 {
        return Ok(DVector::zeros(p.len()));
    }
    Ok(w * (theta / s))
}

/// Orthonormal columns spanning the complement of `p`.
pub(super) fn tangent_frame(p: &DVector<f64>) -> DMatrix<f64> {
    let a = DMatrix::from_column_slice(p.len(), 1, p.as_slice());
    crate::linalg::orthonormal_complement(&a)
}
