use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::approximator::Domain;
use crate::error::{Error, Result};
use crate::manifolds::{ManifoldHandle, ManifoldPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    None,
    /// P = diag(A).
    Jacobi,
}

/// Finite-difference operator of y'' + x₁y' + x₂y = t(1 − t) on the n
/// interior points of a uniform grid of [0, 1], and the Krylov subspace map
/// (x₁, x₂) ↦ span{v, P⁻¹Av, …, (P⁻¹A)^{k−1}v} with v = B.
#[derive(Debug, Clone)]
pub struct KrylovProblem {
    n: usize,
    k: usize,
    preconditioner: Preconditioner,
    rhs: DVector<f64>,
}

/// Tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: f64,
    pub diag: f64,
    pub upper: f64,
}

impl Tridiagonal {
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = v.len();
        DVector::from_fn(n, |i, _| {
            let mut s = self.diag * v[i];
            if i > 0 {
                s += self.lower * v[i - 1];
            }
            if i + 1 < n {
                s += self.upper * v[i + 1];
            }
            s
        })
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| match j as isize - i as isize {
            0 => self.diag,
            -1 => self.lower,
            1 => self.upper,
            _ => 0.0,
        })
    }
}

impl KrylovProblem {
    pub fn new(n: usize, k: usize, preconditioner: Preconditioner) -> Result<Self> {
        if k == 0 || n < 2 * k {
            return Err(Error::invalid(format!("Krylov problem needs 1 ≤ k and n ≥ 2k, got n={n}, k={k}")));
        }
        let delta = 1.0 / (n + 1) as f64;
        let rhs = DVector::from_fn(n, |i, _| {
            let t = (i + 1) as f64 * delta;
            t * (1.0 - t)
        });
        Ok(Self {
            n,
            k,
            preconditioner,
            rhs,
        })
    }

    pub fn delta(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn domain() -> Domain {
        Domain::new(vec![1.0, 1.0], vec![2.0, 2.0]).expect("parameter box")
    }

    pub fn manifold(&self) -> ManifoldHandle {
        ManifoldHandle::grassmannian(self.n, self.k).expect("validated in new")
    }

    pub fn operator(&self, x1: f64, x2: f64) -> Tridiagonal {
        let d = self.delta();
        Tridiagonal {
            lower: 1.0 / (d * d) - x1 / (2.0 * d),
            diag: -2.0 / (d * d) + x2,
            upper: 1.0 / (d * d) + x1 / (2.0 * d),
        }
    }

    fn step(&self, a: &Tridiagonal, v: &DVector<f64>) -> DVector<f64> {
        let w = a.apply(v);
        match self.preconditioner {
            Preconditioner::None => w,
            Preconditioner::Jacobi => w / a.diag,
        }
    }

    /// Orthonormal basis of the Krylov space by Arnoldi with modified
    /// Gram–Schmidt and one reorthogonalization pass.
    pub fn basis(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let a = self.operator(x[0], x[1]);
        let mut q = DMatrix::zeros(self.n, self.k);
        q.set_column(0, &(&self.rhs / self.rhs.norm()));
        for j in 1..self.k {
            let mut w = self.step(&a, &q.column(j - 1).clone_owned());
            let scale = w.norm();
            for _ in 0..2 {
                for i in 0..j {
                    let c = q.column(i).dot(&w);
                    w.axpy(-c, &q.column(i), 1.0);
                }
            }
            let norm = w.norm();
            if !(norm > 1e-12 * scale) {
                return Err(Error::Numerical(format!(
                    "Krylov breakdown at ({}, {}): dimension {j} < {}",
                    x[0], x[1], self.k
                )));
            }
            q.set_column(j, &(w / norm));
        }
        Ok(q)
    }

    pub fn point(&self, x: &[f64]) -> Result<ManifoldPoint> {
        self.basis(x).map(ManifoldPoint::Matrix)
    }
}
