use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Minkowski product −x₀y₀ + Σ xᵢyᵢ.
pub(crate) fn minkowski(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    -x[0] * y[0] + x.rows(1, x.len() - 1).dot(&y.rows(1, y.len() - 1))
}

/// The hyperboloid point above the spatial coordinates `x`.
pub(super) fn lift(x: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(x.len() + 1);
    out[0] = (1.0 + x.norm_squared()).sqrt();
    out.rows_mut(1, x.len()).copy_from(x);
    out
}

fn check_len(n: usize, p: &DVector<f64>) -> Result<()> {
    if p.len() != n + 1 {
        return Err(Error::ShapeMismatch(format!(
            "expected a vector of length {}, got {}",
            n + 1,
            p.len()
        )));
    }
    Ok(())
}

pub(super) fn point_residual(n: usize, p: &DVector<f64>) -> Result<f64> {
    check_len(n, p)?;
    if !(p[0] > 0.0) {
        return Ok(f64::INFINITY);
    }
    let r = (minkowski(p, p) + 1.0).abs() / p[0].powi(2);
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
    let r = minkowski(p, v).abs() / (1.0 + p.norm() * v.norm());
    Ok(if r.is_nan() { f64::INFINITY } else { r })
}

fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 + t * t / 6.0
    } else {
        t.sinh() / t
    }
}

pub(super) fn exp(p: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let t = minkowski(v, v).max(0.0).sqrt();
    let q = p * t.cosh() + v * sinhc(t);
    lift(&q.rows(1, q.len() - 1).into_owned())
}

/// 2·asinh(½‖p − q‖_M): the chord form stays accurate for nearby points.
pub(super) fn distance(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    let d = p - q;
    let chord = minkowski(&d, &d).max(0.0).sqrt();
    2.0 * (0.5 * chord).asinh()
}

pub(super) fn log(p: &DVector<f64>, q: &DVector<f64>) -> DVector<f64> {
    let d = distance(p, q);
    let a = -minkowski(p, q);
    let u = q - p * a;
    u / sinhc(d)
}

/// Columns of the Lorentz boost taking e₀ to `p`, minus the first.
pub(super) fn tangent_frame(p: &DVector<f64>) -> DMatrix<f64> {
    let n = p.len() - 1;
    let p0 = p[0];
    let bar = p.rows(1, n);
    DMatrix::from_fn(n + 1, n, |r, c| {
        if r == 0 {
            bar[c]
        } else {
            let delta = if r - 1 == c { 1.0 } else { 0.0 };
            delta + bar[r - 1] * bar[c] / (1.0 + p0)
        }
    })
}
