use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approximator::Domain;
use crate::error::{Error, Result};
use crate::manifolds::{ManifoldHandle, ManifoldPoint, SegrePoint};

/// f(x) = e^{x₁} (e^{x₂W₁}e₁)(e^{x₃W₂}e₁)ᵀ with random skew W₁, W₂ of unit
/// Frobenius norm.
#[derive(Debug, Clone)]
pub struct SegreProblem {
    w1: DMatrix<f64>,
    w2: DMatrix<f64>,
}

/// Skew-symmetric matrix with independent U[−1, 1] entries above the
/// diagonal, scaled to unit Frobenius norm.
pub fn random_unit_skew<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            let a = rng.random_range(-1.0..=1.0);
            w[(i, j)] = a;
            w[(j, i)] = -a;
        }
    }
    let norm = w.norm();
    w / norm
}

/// e^{tW}v by its Taylor series; accurate for ‖tW‖ ≲ 1.
pub fn exp_action(w: &DMatrix<f64>, t: f64, v: &DVector<f64>) -> DVector<f64> {
    let mut sum = v.clone();
    let mut term = v.clone();
    for j in 1..60 {
        term = (w * &term) * (t / j as f64);
        sum += &term;
        if j >= 4 && term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

impl SegreProblem {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("Segre scenario needs n ≥ 2, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1 = random_unit_skew(&mut rng, n);
        let w2 = random_unit_skew(&mut rng, n);
        Ok(Self { w1, w2 })
    }

    pub fn n(&self) -> usize {
        self.w1.nrows()
    }

    pub fn generators(&self) -> (&DMatrix<f64>, &DMatrix<f64>) {
        (&self.w1, &self.w2)
    }

    pub fn domain() -> Domain {
        Domain::cube(3).expect("unit cube")
    }

    /// Seg(ℝⁿ × ℝⁿ) with H = −e², the curvature bound for λ ≥ e⁻¹.
    pub fn manifold(&self) -> ManifoldHandle {
        let n = self.n();
        ManifoldHandle::segre(n, n)
            .expect("n ≥ 2")
            .with_curvature_bound(-std::f64::consts::E.powi(2))
    }

    pub fn point(&self, x: &[f64]) -> Result<ManifoldPoint> {
        let e1 = DVector::from_fn(self.n(), |i, _| if i == 0 { 1.0 } else { 0.0 });
        Ok(ManifoldPoint::Segre(SegrePoint::new(
            x[0].exp(),
            exp_action(&self.w1, x[1], &e1),
            exp_action(&self.w2, x[2], &e1),
        )))
    }
}
