use nalgebra::{DMatrix, DVector};

use super::RetractionMethod;
use crate::error::{Error, Result};
use crate::linalg::{self, SymFn};

/// Smallest singular value of UᵀY accepted by the logarithm; below it the
/// subspaces have a principal angle numerically equal to π/2.
const MIN_OVERLAP: f64 = 1e-8;

pub(super) fn point_residual(n: usize, k: usize, u: &DMatrix<f64>) -> Result<f64> {
    if u.shape() != (n, k) {
        return Err(Error::ShapeMismatch(format!(
            "expected a {n}x{k} matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let r = linalg::orthonormality_residual(u);
    Ok(if r.is_nan() { f64::INFINITY } else { r })
}

pub(super) fn tangent_residual(u: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<f64> {
    if u.shape() != d.shape() {
        return Err(Error::ShapeMismatch(format!(
            "tangent of shape {}x{} at a point of shape {}x{}",
            d.nrows(),
            d.ncols(),
            u.nrows(),
            u.ncols()
        )));
    }
    let r = (u.transpose() * d).norm() / (1.0 + d.norm());
    Ok(if r.is_nan() { f64::INFINITY } else { r })
}

pub(super) fn exp(u: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = linalg::thin_svd(d);
    let cos = DMatrix::from_diagonal(&svd.singular_values.map(f64::cos));
    let sin = DMatrix::from_diagonal(&svd.singular_values.map(f64::sin));
    let vt = svd.v.transpose();
    let y = u * &svd.v * cos * &vt + &svd.u * sin * &vt;
    linalg::thin_qr(&y).0
}

/// (I − UUᵀ)Y(UᵀY)⁻¹, the tangent whose span-retraction reaches span(Y).
fn tangent_of_tan(u: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = u.transpose() * y;
    let smin = linalg::thin_svd(&m).singular_values.min();
    if !(smin > MIN_OVERLAP) {
        return Err(Error::chart("subspaces have a principal angle of π/2"));
    }
    let z = y - u * &m;
    // Z M⁻¹ = (M⁻ᵀ Zᵀ)ᵀ
    Ok(linalg::solve(&m.transpose(), &z.transpose())?.transpose())
}

pub(super) fn log(u: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let l = tangent_of_tan(u, y)?;
    let svd = linalg::thin_svd(&l);
    let angles = DMatrix::from_diagonal(&svd.singular_values.map(f64::atan));
    let d = &svd.u * angles * svd.v.transpose();
    Ok(&d - u * (u.transpose() * &d))
}

pub(super) fn principal_angles(u: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DVector<f64>> {
    let l = tangent_of_tan(u, y)?;
    Ok(linalg::thin_svd(&l).singular_values.map(f64::atan))
}

pub(super) fn distance(u: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64> {
    Ok(principal_angles(u, y)?.norm())
}

pub(super) fn retract(u: &DMatrix<f64>, d: &DMatrix<f64>, method: RetractionMethod) -> Result<DMatrix<f64>> {
    let a = u + d;
    match method {
        RetractionMethod::Qr => Ok(linalg::thin_qr(&a).0),
        RetractionMethod::Polar => {
            let gram = linalg::symmetrize(&(a.transpose() * &a));
            Ok(&a * linalg::sym_funm(&gram, SymFn::InvSqrt)?)
        }
        RetractionMethod::Exponential => Ok(exp(u, d)),
    }
}

/// Both QR and polar retractions map Δ to span(U + Δ), so they share the
/// inverse Y(UᵀY)⁻¹ − U.
pub(super) fn inverse_retract(u: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    tangent_of_tan(u, y)
}
