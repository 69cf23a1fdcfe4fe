use nalgebra::DVector;

use crate::error::{Error, Result};

pub(super) fn point_residual(n: usize, p: &DVector<f64>) -> Result<f64> {
    if p.len() != n {
        return Err(Error::ShapeMismatch(format!("expected a vector of length {n}, got {}", p.len())));
    }
    Ok(if p.iter().all(|x| x.is_finite()) { 0.0 } else { f64::INFINITY })
}

pub(super) fn tangent_residual(p: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if p.len() != v.len() {
        return Err(Error::ShapeMismatch(format!(
            "tangent of length {} at a point of length {}",
            v.len(),
            p.len()
        )));
    }
    Ok(if v.iter().all(|x| x.is_finite()) { 0.0 } else { f64::INFINITY })
}
