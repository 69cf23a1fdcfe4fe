use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, SymFn};

pub(super) fn point_residual(n: usize, p: &DMatrix<f64>) -> Result<f64> {
    if p.shape() != (n, n) {
        return Err(Error::ShapeMismatch(format!(
            "expected a {n}x{n} matrix, got {}x{}",
            p.nrows(),
            p.ncols()
        )));
    }
    let asym = linalg::asymmetry(p);
    if asym.is_nan() || !p.iter().all(|x| x.is_finite()) {
        return Ok(f64::INFINITY);
    }
    let min_eig = linalg::symmetrize(p).symmetric_eigenvalues().min();
    if !(min_eig > 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok(asym)
}

pub(super) fn tangent_residual(p: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if p.shape() != v.shape() {
        return Err(Error::ShapeMismatch(format!(
            "tangent of shape {}x{} at a point of shape {}x{}",
            v.nrows(),
            v.ncols(),
            p.nrows(),
            p.ncols()
        )));
    }
    let r = linalg::asymmetry(v);
    Ok(if r.is_nan() { f64::INFINITY } else { r })
}

pub(super) fn sqrt_pair(p: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let p = linalg::symmetrize(p);
    Ok((linalg::sym_funm(&p, SymFn::Sqrt)?, linalg::sym_funm(&p, SymFn::InvSqrt)?))
}

fn congruence(a: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    linalg::symmetrize(&(a * x * a))
}

pub(super) fn exp(p: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (s, si) = sqrt_pair(p)?;
    let inner = congruence(&si, &linalg::symmetrize(v));
    Ok(congruence(&s, &linalg::sym_funm(&inner, SymFn::Exp)?))
}

pub(super) fn log(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (s, si) = sqrt_pair(p)?;
    let inner = congruence(&si, &linalg::symmetrize(q));
    Ok(congruence(&s, &linalg::sym_funm(&inner, SymFn::Log)?))
}

pub(super) fn distance(p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<f64> {
    let (_, si) = sqrt_pair(p)?;
    let inner = congruence(&si, &linalg::symmetrize(q));
    let eig = inner.symmetric_eigenvalues();
    if eig.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Domain("matrix is not positive definite".into()));
    }
    Ok(eig.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

pub(super) fn inner(p: &DMatrix<f64>, u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if u.shape() != p.shape() || v.shape() != p.shape() {
        return Err(Error::ShapeMismatch("tangent shape does not match the point".into()));
    }
    let lu = nalgebra::LU::new(p.clone());
    let a = lu
        .solve(u)
        .ok_or_else(|| Error::Numerical("singular base point".into()))?;
    let b = lu
        .solve(v)
        .ok_or_else(|| Error::Numerical("singular base point".into()))?;
    Ok((a * b).trace())
}
