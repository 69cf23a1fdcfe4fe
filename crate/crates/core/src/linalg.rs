//! Dense matrix kernels used by the matrix manifolds.
//!
//! Everything here works on `nalgebra::DMatrix<f64>`. Factorizations carry
//! deterministic sign conventions so that Tucker factors and retractions are
//! reproducible bit-for-bit across runs.

use nalgebra::{DMatrix, DVector, SymmetricEigen, LU, QR};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;

/// Scalar functions that [`sym_funm`] can lift to symmetric matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymFn {
    Exp,
    Log,
    InvSqrt,
    Sqrt,
}

const SYMMETRY_TOL: f64 = 1e-12;

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn skew_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a - a.transpose()) * 0.5
}

fn require_square(a: &DMatrix<f64>, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::ShapeMismatch(format!(
            "{what} needs a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

fn require_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical("matrix has non-finite entries".into()))
    }
}

/// Relative asymmetry ‖A − Aᵀ‖_F / max(1, ‖A‖_F).
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    (a - a.transpose()).norm() / a.norm().max(1.0)
}

/// Applies a scalar function to a symmetric matrix through its
/// eigendecomposition, `Q f(Λ) Qᵀ`.
pub fn sym_funm(a: &DMatrix<f64>, f: SymFn) -> Result<DMatrix<f64>> {
    require_square(a, "sym_funm")?;
    require_finite(a)?;
    let asym = asymmetry(a);
    if asym > SYMMETRY_TOL {
        return Err(Error::invalid(format!(
            "sym_funm needs a symmetric matrix (asymmetry {asym:.3e})"
        )));
    }
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut values = eig.eigenvalues.clone();
    for lam in values.iter_mut() {
        *lam = match f {
            SymFn::Exp => lam.exp(),
            SymFn::Log | SymFn::Sqrt | SymFn::InvSqrt => {
                if *lam <= 0.0 {
                    return Err(Error::Domain(format!(
                        "{f:?} of a matrix with nonpositive eigenvalue {lam:.3e}"
                    )));
                }
                match f {
                    SymFn::Log => lam.ln(),
                    SymFn::Sqrt => lam.sqrt(),
                    _ => 1.0 / lam.sqrt(),
                }
            }
        };
    }
    let q = &eig.eigenvectors;
    let out = q * DMatrix::from_diagonal(&values) * q.transpose();
    Ok(symmetrize(&out))
}

// Padé [13/13] numerator coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    require_square(a, "expm")?;
    require_finite(a)?;
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * 2f64.powi(-squarings);
    let b = &PADE13;
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = LU::new(lhs)
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Padé denominator in expm".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// θ / sin θ expressed through c = cos θ, for θ ∈ [0, π).
fn angle_over_sine(c: f64) -> f64 {
    let c = c.clamp(-1.0, 1.0);
    let delta = 1.0 - c;
    if delta < 1e-6 {
        1.0 + delta / 3.0 + 2.0 * delta * delta / 15.0
    } else {
        c.acos() / ((1.0 - c) * (1.0 + c)).sqrt()
    }
}

/// Principal logarithm of a special orthogonal matrix.
///
/// Uses the commuting split Q = C + S into symmetric and skew parts; on each
/// rotation plane C = cos θ and S = sin θ J, so log Q = (θ / sin θ)(C) · S.
/// Rotations by π (eigenvalue −1) have no unique real logarithm and are
/// rejected.
pub fn logm_rotation(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    require_square(q, "logm_rotation")?;
    require_finite(q)?;
    let n = q.nrows();
    let orth = (q.transpose() * q - DMatrix::<f64>::identity(n, n)).norm();
    if orth > 1e-8 {
        return Err(Error::invalid(format!(
            "logm_rotation needs an orthogonal matrix (residual {orth:.3e})"
        )));
    }
    if q.determinant() <= 0.0 {
        return Err(Error::invalid("logm_rotation needs det Q = +1"));
    }
    let c = symmetrize(q);
    let s = skew_part(q);
    let eig = SymmetricEigen::new(c);
    let min_cos = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_cos <= -1.0 + 1e-10 {
        return Err(Error::chart(
            "rotation by π has no unique logarithm (eigenvalue −1)",
        ));
    }
    let g_vals = eig.eigenvalues.map(angle_over_sine);
    let z = &eig.eigenvectors;
    let g = z * DMatrix::from_diagonal(&g_vals) * z.transpose();
    let w = (&g * &s + &s * &g) * 0.5;
    Ok(skew_part(&w))
}

/// Thin singular value decomposition `A = U diag(s) Vᵀ`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.singular_values) * self.v.transpose()
    }
}

/// Thin SVD with singular values sorted nonincreasing and the first
/// nonzero entry of every left singular vector made positive.
pub fn thin_svd(a: &DMatrix<f64>) -> ThinSvd {
    let (m, n) = a.shape();
    let r = m.min(n);
    if r == 0 {
        return ThinSvd {
            u: DMatrix::zeros(m, 0),
            singular_values: DVector::zeros(0),
            v: DMatrix::zeros(n, 0),
        };
    }
    if !a.iter().all(|x| x.is_finite()) {
        return ThinSvd {
            u: DMatrix::from_element(m, r, f64::NAN),
            singular_values: DVector::from_element(r, f64::NAN),
            v: DMatrix::from_element(n, r, f64::NAN),
        };
    }
    // nalgebra's bidiagonal SVD loses accuracy on clustered spectra
    let fa = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let svd = fa
        .thin_svd()
        .unwrap_or_else(|_| panic!("SVD of a finite {m}x{n} matrix did not converge"));
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let u_raw = DMatrix::from_fn(m, r, |i, j| fu[(i, j)]);
    let vt_raw = DMatrix::from_fn(r, n, |i, j| fv[(j, i)]);
    let s_raw = DVector::from_fn(r, |i, _| fs[i]);

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| s_raw[j].total_cmp(&s_raw[i]).then(i.cmp(&j)));

    let mut u = DMatrix::zeros(m, r);
    let mut v = DMatrix::zeros(n, r);
    let mut s = DVector::zeros(r);
    for (dst, &src) in order.iter().enumerate() {
        let mut ucol = u_raw.column(src).clone_owned();
        let mut vcol = vt_raw.row(src).transpose();
        let lead = ucol.iter().copied().find(|x| x.abs() > 1e-10).unwrap_or(0.0);
        if lead < 0.0 {
            ucol.neg_mut();
            vcol.neg_mut();
        }
        u.set_column(dst, &ucol);
        v.set_column(dst, &vcol);
        s[dst] = s_raw[src];
    }
    ThinSvd {
        u,
        singular_values: s,
        v,
    }
}

/// Thin QR with a nonnegative diagonal in R.
pub fn thin_qr(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = QR::new(a.clone());
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows() {
        if r[(i, i)] < 0.0 {
            q.column_mut(i).neg_mut();
            r.row_mut(i).neg_mut();
        }
    }
    (q, r)
}

/// Orthonormal basis of the orthogonal complement of the column span of an
/// orthonormal `n × k` matrix, as an `n × (n − k)` matrix.
pub fn orthonormal_complement(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = a.shape();
    if k == 0 {
        return DMatrix::identity(n, n);
    }
    let qr = QR::new(a.clone());
    let mut qt = DMatrix::<f64>::identity(n, n);
    qr.q_tr_mul(&mut qt);
    qt.transpose().columns(k, n - k).into_owned()
}

/// Solves `A X = B` for square `A`.
pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    LU::new(a.clone())
        .solve(b)
        .ok_or_else(|| Error::Numerical("singular linear system".into()))
}

/// ‖AᵀA − I‖_F.
pub fn orthonormality_residual(a: &DMatrix<f64>) -> f64 {
    let k = a.ncols();
    (a.transpose() * a - DMatrix::<f64>::identity(k, k)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, m: usize, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn random_skew(rng: &mut impl Rng, n: usize, spectral: f64) -> DMatrix<f64> {
        let w = skew_part(&random_matrix(rng, n, n));
        let s2 = thin_svd(&w).singular_values[0];
        w * (spectral / s2)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(sym_funm(&z, SymFn::Exp).unwrap(), DMatrix::identity(3, 3));
        assert!((expm(&z).unwrap() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn sym_exp_of_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0]));
        let e = sym_funm(&a, SymFn::Exp).unwrap();
        assert!((e[(0, 0)] - 2f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)] - 1.0).abs() < 1e-15);
        assert!(e[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn sym_exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let a = symmetrize(&random_matrix(&mut rng, n, n));
            let a = &a / a.norm().max(1.0);
            let back = sym_funm(&sym_funm(&a, SymFn::Exp).unwrap(), SymFn::Log).unwrap();
            assert!((back - &a).norm() < 1e-10);
        }
    }

    #[test]
    fn sym_funm_rejects_bad_input() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_funm(&a, SymFn::Exp), Err(Error::InvalidArgument(_))));
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(sym_funm(&b, SymFn::Log), Err(Error::Domain(_))));
        assert!(matches!(sym_funm(&b, SymFn::Sqrt), Err(Error::Domain(_))));
        assert!(sym_funm(&b, SymFn::Exp).is_ok());
    }

    #[test]
    fn sym_funm_commutes_with_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = symmetrize(&random_matrix(&mut rng, 4, 4));
        let (q, _) = thin_qr(&random_matrix(&mut rng, 4, 4));
        let lhs = sym_funm(&(&q * &a * q.transpose()), SymFn::Exp).unwrap();
        let rhs = &q * sym_funm(&a, SymFn::Exp).unwrap() * q.transpose();
        assert!((lhs - rhs).norm() < 1e-10);
        let spd = sym_funm(&a, SymFn::Exp).unwrap();
        assert!(SymmetricEigen::new(spd).eigenvalues.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn planar_rotation_generator() {
        let theta = std::f64::consts::FRAC_PI_3;
        let w = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
        let r = expm(&w).unwrap();
        let expected =
            DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        assert!((r - expected).norm() < 1e-14);
    }

    #[test]
    fn expm_matches_sym_funm_and_taylor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = symmetrize(&random_matrix(&mut rng, 5, 5)) * 4.0;
        let e1 = expm(&a).unwrap();
        let e2 = sym_funm(&a, SymFn::Exp).unwrap();
        assert!((&e1 - &e2).norm() / e2.norm() < 1e-13);

        // Non-normal input against a long Taylor sum.
        let b = random_matrix(&mut rng, 4, 4) * 0.5;
        let mut term = DMatrix::<f64>::identity(4, 4);
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * &b / k as f64;
            sum += &term;
        }
        assert!((expm(&b).unwrap() - sum).norm() < 1e-13);
    }

    #[test]
    fn logm_rotation_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..7 {
            for _ in 0..10 {
                let scale = rng.random_range(0.0..1.0);
                let w = random_skew(&mut rng, n, scale);
                let q = expm(&w).unwrap();
                let back = logm_rotation(&q).unwrap();
                assert!((&back - &w).norm() < 1e-10, "n={n}");
                assert!((expm(&back).unwrap() - &q).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn logm_rotation_rejects_half_turn() {
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -1.0, 1.0]));
        assert!(matches!(logm_rotation(&q), Err(Error::ChartViolation(_))));
    }

    #[test]
    fn svd_of_identity_and_rank_one() {
        let svd = thin_svd(&DMatrix::identity(3, 3));
        assert!((svd.u.clone() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-15);
        assert!(svd.singular_values.iter().all(|&s| (s - 1.0).abs() < 1e-15));

        let a = DVector::from_vec(vec![1.0, 2.0, 2.0]);
        let b = DVector::from_vec(vec![3.0, 4.0]);
        let svd = thin_svd(&(&a * b.transpose()));
        assert!((svd.singular_values[0] - 15.0).abs() < 1e-13);
        assert!(svd.singular_values[1].abs() < 1e-13);
    }

    #[test]
    fn svd_reconstruction_and_conventions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(20, 5), (5, 20), (7, 7)] {
            let a = random_matrix(&mut rng, m, n);
            let svd = thin_svd(&a);
            assert!((svd.reconstruct() - &a).norm() <= 1e-10 * a.norm());
            assert!(orthonormality_residual(&svd.u) < 1e-12);
            assert!(orthonormality_residual(&svd.v) < 1e-12);
            let s = &svd.singular_values;
            assert!(s.iter().zip(s.iter().skip(1)).all(|(a, b)| a >= b));
            for col in svd.u.column_iter() {
                let lead = col.iter().find(|x| x.abs() > 1e-10).unwrap();
                assert!(*lead > 0.0);
            }
        }
    }

    #[test]
    fn qr_conventions_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_matrix(&mut rng, 9, 4);
        let (q, r) = thin_qr(&a);
        assert!((&q * &r - &a).norm() <= 1e-12 * a.norm());
        assert!(orthonormality_residual(&q) < 1e-12);
        for i in 0..4 {
            assert!(r[(i, i)] >= 0.0);
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
        let (q2, r2) = thin_qr(&a);
        assert_eq!(q, q2);
        assert_eq!(r, r2);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (u, _) = thin_qr(&random_matrix(&mut rng, 8, 3));
        let c = orthonormal_complement(&u);
        assert_eq!(c.shape(), (8, 5));
        assert!(orthonormality_residual(&c) < 1e-12);
        assert!((u.transpose() * &c).norm() < 1e-12);
    }
}
