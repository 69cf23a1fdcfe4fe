//! Dense tensors and the sequentially truncated higher-order SVD.
//!
//! Tensors are stored column-major (the first index varies fastest). The
//! mode-k unfolding has rows indexed by i_k and columns by the remaining
//! indices in increasing mode order, again first-fastest.

use nalgebra::{DMatrix, DMatrixView, DMatrixViewMut};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::ShapeMismatch("a tensor needs at least one mode".into()));
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} holds {len} entries but {} were given",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![0.0; len],
        }
    }

    /// Builds a tensor entry by entry from its multi-index.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let len: usize = shape.iter().product();
        let mut idx = vec![0; shape.len()];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            for (i, &n) in idx.iter_mut().zip(&shape) {
                *i += 1;
                if *i < n {
                    break;
                }
                *i = 0;
            }
        }
        Self { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn linear_index(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        let mut lin = 0;
        let mut stride = 1;
        for (&i, &n) in index.iter().zip(&self.shape) {
            debug_assert!(i < n);
            lin += i * stride;
            stride *= n;
        }
        lin
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.linear_index(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let lin = self.linear_index(index);
        self.data[lin] = value;
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.shape.len() {
            return Err(Error::ShapeMismatch(format!(
                "mode {mode} out of range for an order-{} tensor",
                self.shape.len()
            )));
        }
        Ok(())
    }

    /// (left, size, right) with left = Π_{j<k} n_j and right = Π_{j>k} n_j.
    fn split(&self, mode: usize) -> (usize, usize, usize) {
        let left = self.shape[..mode].iter().product();
        let right = self.shape[mode + 1..].iter().product();
        (left, self.shape[mode], right)
    }

    /// Mode-k unfolding, n_k × Π_{j≠k} n_j.
    pub fn unfold(&self, mode: usize) -> Result<DMatrix<f64>> {
        self.check_mode(mode)?;
        let (left, n, right) = self.split(mode);
        let mut out = DMatrix::zeros(n, left * right);
        for r in 0..right {
            let block = &self.data[left * n * r..left * n * (r + 1)];
            for i in 0..n {
                for l in 0..left {
                    out[(i, l + left * r)] = block[l + left * i];
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`DenseTensor::unfold`].
    pub fn fold(matrix: &DMatrix<f64>, mode: usize, shape: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(shape.to_vec());
        t.check_mode(mode)?;
        let (left, n, right) = t.split(mode);
        if matrix.shape() != (n, left * right) {
            return Err(Error::ShapeMismatch(format!(
                "cannot fold a {}x{} matrix into shape {shape:?} along mode {mode}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for r in 0..right {
            let block = &mut t.data[left * n * r..left * n * (r + 1)];
            for i in 0..n {
                for l in 0..left {
                    block[l + left * i] = matrix[(i, l + left * r)];
                }
            }
        }
        Ok(t)
    }

    /// T ×_k M: replaces mode k (size n_k) by M's rows, with M of shape
    /// p × n_k.
    pub fn mode_multiply(&self, m: &DMatrix<f64>, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let (left, n, right) = self.split(mode);
        if m.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "mode-{mode} product needs {n} columns, matrix has {}",
                m.ncols()
            )));
        }
        let p = m.nrows();
        let mut shape = self.shape.clone();
        shape[mode] = p;
        let mut out = Self::zeros(shape);
        let mt = m.transpose();
        for r in 0..right {
            let src = DMatrixView::from_slice(&self.data[left * n * r..left * n * (r + 1)], left, n);
            let mut dst =
                DMatrixViewMut::from_slice(&mut out.data[left * p * r..left * p * (r + 1)], left, p);
            dst.gemm(1.0, &src, &mt, 0.0);
        }
        Ok(out)
    }
}

/// How ST-HOSVD chooses its ranks.
#[derive(Debug, Clone, PartialEq)]
pub enum Truncation {
    /// Keep every singular vector.
    Full,
    /// Explicit ranks, one per mode.
    Ranks(Vec<usize>),
    /// Relative tolerance τ: the error budget (τ‖G‖)² is split evenly over
    /// the modes.
    Tolerance(f64),
}

/// Tucker model Ĝ = C ×₁ U⁽¹⁾ ×₂ ⋯ ×_d U⁽ᵈ⁾ with orthonormal factors.
#[derive(Debug, Clone, PartialEq)]
pub struct TuckerModel {
    pub core: DenseTensor,
    /// n_k × r_k factor of every mode, sample modes first and the component
    /// mode last.
    pub factors: Vec<DMatrix<f64>>,
}

impl TuckerModel {
    pub fn ranks(&self) -> Vec<usize> {
        self.core.shape().to_vec()
    }

    /// The component factor V (r_c × n, orthonormal rows).
    pub fn component_factor(&self) -> DMatrix<f64> {
        self.factors.last().expect("a Tucker model has modes").transpose()
    }

    pub fn reconstruct(&self) -> Result<DenseTensor> {
        if self.factors.len() != self.core.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} factors for an order-{} core",
                self.factors.len(),
                self.core.order()
            )));
        }
        let mut t = self.core.clone();
        for (k, u) in self.factors.iter().enumerate() {
            t = t.mode_multiply(u, k)?;
        }
        Ok(t)
    }
}

/// Per-mode diagnostics of an ST-HOSVD run.
#[derive(Debug, Clone, PartialEq)]
pub struct SthosvdInfo {
    /// Singular values of each processed unfolding.
    pub singular_values: Vec<Vec<f64>>,
    /// Squared singular values discarded in each mode.
    pub discarded_energy: Vec<f64>,
}

impl SthosvdInfo {
    /// Σ of discarded energies; an upper bound on ‖G − Ĝ‖_F².
    pub fn error_bound_squared(&self) -> f64 {
        self.discarded_energy.iter().sum()
    }
}

/// Sequentially truncated HOSVD, processing modes in index order.
pub fn sthosvd(g: &DenseTensor, truncation: &Truncation) -> Result<(TuckerModel, SthosvdInfo)> {
    if g.is_empty() {
        return Err(Error::invalid("ST-HOSVD of an empty tensor"));
    }
    let d = g.order();
    let budget = match truncation {
        Truncation::Full => None,
        Truncation::Ranks(r) => {
            if r.len() != d {
                return Err(Error::invalid(format!("{} ranks given for {d} modes", r.len())));
            }
            if let Some(k) = (0..d).find(|&k| r[k] == 0 || r[k] > g.shape()[k]) {
                return Err(Error::invalid(format!(
                    "rank {} invalid for mode {k} of size {}",
                    r[k],
                    g.shape()[k]
                )));
            }
            None
        }
        Truncation::Tolerance(tau) => {
            if !(*tau >= 0.0) || !tau.is_finite() {
                return Err(Error::invalid(format!("tolerance must be finite and ≥ 0, got {tau}")));
            }
            Some((tau * g.norm()).powi(2) / d as f64)
        }
    };

    let mut current = g.clone();
    let mut factors = Vec::with_capacity(d);
    let mut info = SthosvdInfo {
        singular_values: Vec::with_capacity(d),
        discarded_energy: Vec::with_capacity(d),
    };
    for k in 0..d {
        let svd = linalg::thin_svd(&current.unfold(k)?);
        let s = svd.singular_values.as_slice();
        let available = s.len();
        let rank = match (truncation, budget) {
            (Truncation::Ranks(r), _) => r[k].min(available),
            (_, Some(budget)) => {
                // smallest r ≥ 1 whose tail energy fits the budget
                let mut tail = 0.0;
                let mut r = available;
                while r > 1 && tail + s[r - 1] * s[r - 1] <= budget {
                    tail += s[r - 1] * s[r - 1];
                    r -= 1;
                }
                r
            }
            _ => available,
        };
        let discarded: f64 = s[rank..].iter().map(|x| x * x).sum();
        let u = svd.u.columns(0, rank).into_owned();
        current = current.mode_multiply(&u.transpose(), k)?;
        info.singular_values.push(s.to_vec());
        info.discarded_energy.push(discarded);
        factors.push(u);
    }
    Ok((TuckerModel { core: current, factors }, info))
}
