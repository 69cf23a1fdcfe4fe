use nalgebra::DMatrix;

use super::RetractionMethod;
use crate::error::{Error, Result};
use crate::linalg::{self, SymFn};

fn check_shape(n: usize, q: &DMatrix<f64>) -> Result<()> {
    if q.shape() != (n, n) {
        return Err(Error::ShapeMismatch(format!(
            "expected a {n}x{n} matrix, got {}x{}",
            q.nrows(),
            q.ncols()
        )));
    }
    Ok(())
}

pub(super) fn point_residual(n: usize, q: &DMatrix<f64>) -> Result<f64> {
    check_shape(n, q)?;
    let r = linalg::orthonormality_residual(q);
    if r.is_nan() || q.determinant() <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(r)
}

pub(super) fn tangent_residual(q: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    check_shape(q.nrows(), v)?;
    let omega = q.transpose() * v;
    let r = linalg::symmetrize(&omega).norm() / (1.0 + v.norm());
    Ok(if r.is_nan() { f64::INFINITY } else { r })
}

/// The skew generator Qᵀv.
fn generator(q: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    linalg::skew_part(&(q.transpose() * v))
}

pub(super) fn exp(q: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(q * linalg::expm(&generator(q, v))?)
}

pub(super) fn log(q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(q * linalg::logm_rotation(&(q.transpose() * r))?)
}

pub(super) fn distance(q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<f64> {
    Ok(linalg::logm_rotation(&(q.transpose() * r))?.norm())
}

pub(super) fn retract(q: &DMatrix<f64>, v: &DMatrix<f64>, method: RetractionMethod) -> Result<DMatrix<f64>> {
    let a = q + v;
    match method {
        RetractionMethod::Qr => Ok(linalg::thin_qr(&a).0),
        RetractionMethod::Polar => {
            let gram = linalg::symmetrize(&(a.transpose() * &a));
            Ok(&a * linalg::sym_funm(&gram, SymFn::InvSqrt)?)
        }
        RetractionMethod::Exponential => exp(q, v),
    }
}

pub(super) fn inverse_retract(
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    method: RetractionMethod,
) -> Result<DMatrix<f64>> {
    let p = q.transpose() * r;
    let omega = match method {
        RetractionMethod::Qr => inverse_qr(&p)?,
        RetractionMethod::Polar => {
            let s = linalg::symmetrize(&p);
            let min_eig = s.clone().symmetric_eigenvalues().min();
            if !(min_eig > 1e-10) {
                return Err(Error::chart("rotation is outside the image of the polar retraction"));
            }
            let w = linalg::skew_part(&p);
            let omega = linalg::solve(&s, &w.transpose())?.transpose();
            linalg::skew_part(&omega)
        }
        RetractionMethod::Exponential => return log(q, r),
    };
    Ok(q * omega)
}

/// Finds the skew Ω with qf(I + Ω) = P: the strictly lower part of
/// Pᵀ(I + Ω) must vanish, which is linear in the n(n−1)/2 unknowns.
fn inverse_qr(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = p.nrows();
    let m = n * (n - 1) / 2;
    let mut index = vec![vec![usize::MAX; n]; n];
    let mut idx = 0;
    for j in 0..n {
        for i in 0..j {
            index[i][j] = idx;
            idx += 1;
        }
    }
    let pt = p.transpose();
    let mut a = DMatrix::zeros(m, m);
    let mut rhs = DMatrix::zeros(m, 1);
    let mut row = 0;
    for col in 0..n {
        for r in col + 1..n {
            // (PᵀΩ)_{r,col} = Σ_c Pᵀ_{r,c} Ω_{c,col}
            for c in 0..n {
                match c.cmp(&col) {
                    std::cmp::Ordering::Less => a[(row, index[c][col])] += pt[(r, c)],
                    std::cmp::Ordering::Greater => a[(row, index[col][c])] -= pt[(r, c)],
                    std::cmp::Ordering::Equal => {}
                }
            }
            rhs[(row, 0)] = -pt[(r, col)];
            row += 1;
        }
    }
    let w = linalg::solve(&a, &rhs)
        .map_err(|_| Error::chart("rotation is outside the image of the QR retraction"))?;
    let mut omega = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            omega[(i, j)] = w[(index[i][j], 0)];
            omega[(j, i)] = -w[(index[i][j], 0)];
        }
    }
    let t = &pt * (DMatrix::identity(n, n) + &omega);
    if (0..n).any(|i| !(t[(i, i)] > 0.0)) {
        return Err(Error::chart("rotation is outside the image of the QR retraction"));
    }
    Ok(omega)
}
