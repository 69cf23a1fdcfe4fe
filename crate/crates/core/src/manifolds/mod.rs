//! Riemannian geometries behind a single handle.
//!
//! A [`ManifoldHandle`] names one of seven concrete geometries and exposes
//! the exponential and logarithm, geodesic distance, the metric, a lower
//! bound on sectional curvature over a chart, and (where implemented) QR and
//! polar retractions. Points and tangent vectors are plain values; all
//! operations are pure.

mod euclidean;
mod grassmann;
mod hyperbolic;
mod rotations;
mod segre;
mod spd;
mod sphere;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use segre::{SegrePoint, SegreTangent};

/// Tolerance for point membership and tangency checks.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Curvature lower bound used for SPD matrices unless overridden.
pub const SPD_DEFAULT_CURVATURE: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldKind {
    /// ℝⁿ with the dot product.
    Euclidean { n: usize },
    /// Unit sphere in ℝⁿ (intrinsic dimension n − 1).
    Sphere { n: usize },
    /// Hyperbolic n-space in the hyperboloid model inside ℝⁿ⁺¹.
    Hyperbolic { n: usize },
    /// SO(n) with the bi-invariant Frobenius metric.
    Rotations { n: usize },
    /// k-dimensional subspaces of ℝⁿ with the canonical metric.
    Grassmannian { n: usize, k: usize },
    /// Symmetric positive definite n × n matrices, affine-invariant metric.
    Spd { n: usize },
    /// Rank-one n1 × n2 matrices with the metric induced by the embedding.
    Segre { n1: usize, n2: usize },
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ManifoldKind::Euclidean { n } => write!(f, "Euclidean({n})"),
            ManifoldKind::Sphere { n } => write!(f, "Sphere({n})"),
            ManifoldKind::Hyperbolic { n } => write!(f, "Hyperbolic({n})"),
            ManifoldKind::Rotations { n } => write!(f, "Rotations({n})"),
            ManifoldKind::Grassmannian { n, k } => write!(f, "Grassmannian({n},{k})"),
            ManifoldKind::Spd { n } => write!(f, "SPD({n})"),
            ManifoldKind::Segre { n1, n2 } => write!(f, "Segre({n1},{n2})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetractionMethod {
    Exponential,
    Qr,
    Polar,
}

impl fmt::Display for RetractionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RetractionMethod::Exponential => "exponential",
            RetractionMethod::Qr => "QR retraction",
            RetractionMethod::Polar => "polar retraction",
        };
        f.write_str(s)
    }
}

/// A point on a manifold. The variant depends on the manifold kind: vectors
/// for Euclidean, sphere and hyperbolic space; matrices for rotations,
/// Grassmannians (orthonormal representatives) and SPD; a scale and two unit
/// factors for Segre.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldPoint {
    Vector(DVector<f64>),
    Matrix(DMatrix<f64>),
    Segre(SegrePoint),
}

/// A tangent vector, in the same representation family as its base point.
#[derive(Debug, Clone, PartialEq)]
pub enum TangentVector {
    Vector(DVector<f64>),
    Matrix(DMatrix<f64>),
    Segre(SegreTangent),
}

impl ManifoldPoint {
    pub fn as_vector(&self) -> Result<&DVector<f64>> {
        match self {
            ManifoldPoint::Vector(v) => Ok(v),
            _ => Err(Error::ShapeMismatch("expected a vector point".into())),
        }
    }

    pub fn as_matrix(&self) -> Result<&DMatrix<f64>> {
        match self {
            ManifoldPoint::Matrix(m) => Ok(m),
            _ => Err(Error::ShapeMismatch("expected a matrix point".into())),
        }
    }

    pub fn as_segre(&self) -> Result<&SegrePoint> {
        match self {
            ManifoldPoint::Segre(s) => Ok(s),
            _ => Err(Error::ShapeMismatch("expected a Segre point".into())),
        }
    }

    /// Flat list of the representation's numbers (column-major for
    /// matrices; λ, x₁, x₂ for Segre).
    pub fn to_flat(&self) -> Vec<f64> {
        match self {
            ManifoldPoint::Vector(v) => v.as_slice().to_vec(),
            ManifoldPoint::Matrix(m) => m.as_slice().to_vec(),
            ManifoldPoint::Segre(s) => {
                let mut out = vec![s.scale];
                out.extend_from_slice(s.left.as_slice());
                out.extend_from_slice(s.right.as_slice());
                out
            }
        }
    }
}

impl TangentVector {
    fn shape_error() -> Error {
        Error::ShapeMismatch("tangent vectors have different representations".into())
    }

    pub fn as_vector(&self) -> Result<&DVector<f64>> {
        match self {
            TangentVector::Vector(v) => Ok(v),
            _ => Err(Error::ShapeMismatch("expected a vector tangent".into())),
        }
    }

    pub fn as_matrix(&self) -> Result<&DMatrix<f64>> {
        match self {
            TangentVector::Matrix(m) => Ok(m),
            _ => Err(Error::ShapeMismatch("expected a matrix tangent".into())),
        }
    }

    pub fn as_segre(&self) -> Result<&SegreTangent> {
        match self {
            TangentVector::Segre(s) => Ok(s),
            _ => Err(Error::ShapeMismatch("expected a Segre tangent".into())),
        }
    }

    pub fn scale(&self, alpha: f64) -> TangentVector {
        match self {
            TangentVector::Vector(v) => TangentVector::Vector(v * alpha),
            TangentVector::Matrix(m) => TangentVector::Matrix(m * alpha),
            TangentVector::Segre(s) => TangentVector::Segre(SegreTangent {
                radial: s.radial * alpha,
                left: &s.left * alpha,
                right: &s.right * alpha,
            }),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &TangentVector, beta: f64) -> Result<TangentVector> {
        Ok(match (self, other) {
            (TangentVector::Vector(a), TangentVector::Vector(b)) if a.len() == b.len() => {
                TangentVector::Vector(a * alpha + b * beta)
            }
            (TangentVector::Matrix(a), TangentVector::Matrix(b)) if a.shape() == b.shape() => {
                TangentVector::Matrix(a * alpha + b * beta)
            }
            (TangentVector::Segre(a), TangentVector::Segre(b))
                if a.left.len() == b.left.len() && a.right.len() == b.right.len() =>
            {
                TangentVector::Segre(SegreTangent {
                    radial: a.radial * alpha + b.radial * beta,
                    left: &a.left * alpha + &b.left * beta,
                    right: &a.right * alpha + &b.right * beta,
                })
            }
            _ => return Err(Self::shape_error()),
        })
    }

    pub fn add(&self, other: &TangentVector) -> Result<TangentVector> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &TangentVector) -> Result<TangentVector> {
        self.combine(1.0, other, -1.0)
    }
}

/// Orthonormal basis of a tangent space, stored as a compact frame.
///
/// Coordinates in this basis identify T_pM with ℝⁿ isometrically, so the
/// Euclidean norm of [`TangentBasis::coordinates`] equals the Riemannian
/// norm of the vector.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    base: ManifoldPoint,
    frame: Frame,
    dim: usize,
}

#[derive(Debug, Clone)]
enum Frame {
    Identity,
    /// Orthonormal columns spanning the tangent space (sphere).
    Columns(DMatrix<f64>),
    /// Minkowski-orthonormal columns (hyperboloid).
    Lorentz(DMatrix<f64>),
    /// Skew generators at the base rotation.
    Rotation,
    /// Complement of the base subspace; Δ = C·B with B (n−k)×k.
    Grassmann(DMatrix<f64>),
    Spd {
        sqrt: DMatrix<f64>,
        inv_sqrt: DMatrix<f64>,
    },
    Segre {
        left: DMatrix<f64>,
        right: DMatrix<f64>,
    },
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

impl TangentBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }

    /// Coordinates of a tangent vector at the base point.
    pub fn coordinates(&self, v: &TangentVector) -> Result<DVector<f64>> {
        let out = match &self.frame {
            Frame::Identity => v.as_vector()?.clone(),
            Frame::Columns(c) => c.transpose() * v.as_vector()?,
            Frame::Lorentz(b) => {
                let v = v.as_vector()?;
                DVector::from_fn(b.ncols(), |i, _| {
                    hyperbolic::minkowski(&b.column(i).clone_owned(), v)
                })
            }
            Frame::Rotation => {
                let p = self.base.as_matrix()?;
                let omega = p.transpose() * v.as_matrix()?;
                let n = omega.nrows();
                let mut out = Vec::with_capacity(self.dim);
                for j in 0..n {
                    for i in 0..j {
                        out.push(SQRT2 * 0.5 * (omega[(i, j)] - omega[(j, i)]));
                    }
                }
                DVector::from_vec(out)
            }
            Frame::Grassmann(c) => {
                let b = c.transpose() * v.as_matrix()?;
                DVector::from_column_slice(b.as_slice())
            }
            Frame::Spd { inv_sqrt, .. } => {
                let s = inv_sqrt * v.as_matrix()? * inv_sqrt;
                sym_to_coords(&s)
            }
            Frame::Segre { left, right } => {
                let p = self.base.as_segre()?;
                let t = v.as_segre()?;
                let mut out = Vec::with_capacity(self.dim);
                out.push(t.radial);
                out.extend((left.transpose() * &t.left * p.scale).iter());
                out.extend((right.transpose() * &t.right * p.scale).iter());
                DVector::from_vec(out)
            }
        };
        debug_assert_eq!(out.len(), self.dim);
        Ok(out)
    }

    /// The tangent vector with the given coordinates.
    pub fn vector(&self, coeffs: &[f64]) -> Result<TangentVector> {
        if coeffs.len() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {} tangent coordinates, got {}",
                self.dim,
                coeffs.len()
            )));
        }
        let c = DVector::from_column_slice(coeffs);
        Ok(match &self.frame {
            Frame::Identity => TangentVector::Vector(c),
            Frame::Columns(q) | Frame::Lorentz(q) => TangentVector::Vector(q * c),
            Frame::Rotation => {
                let p = self.base.as_matrix()?;
                let n = p.nrows();
                let mut omega = DMatrix::zeros(n, n);
                let mut idx = 0;
                for j in 0..n {
                    for i in 0..j {
                        omega[(i, j)] = coeffs[idx] / SQRT2;
                        omega[(j, i)] = -coeffs[idx] / SQRT2;
                        idx += 1;
                    }
                }
                TangentVector::Matrix(p * omega)
            }
            Frame::Grassmann(comp) => {
                let k = self.base.as_matrix()?.ncols();
                let b = DMatrix::from_column_slice(comp.ncols(), k, coeffs);
                TangentVector::Matrix(comp * b)
            }
            Frame::Spd { sqrt, .. } => {
                let n = sqrt.nrows();
                let s = coords_to_sym(coeffs, n);
                TangentVector::Matrix(crate::linalg::symmetrize(&(sqrt * s * sqrt)))
            }
            Frame::Segre { left, right } => {
                let p = self.base.as_segre()?;
                let d1 = left.ncols();
                let c1 = DVector::from_column_slice(&coeffs[1..1 + d1]);
                let c2 = DVector::from_column_slice(&coeffs[1 + d1..]);
                TangentVector::Segre(SegreTangent {
                    radial: coeffs[0],
                    left: left * c1 / p.scale,
                    right: right * c2 / p.scale,
                })
            }
        })
    }

    /// All basis vectors, materialized.
    pub fn vectors(&self) -> Vec<TangentVector> {
        (0..self.dim)
            .map(|i| {
                let mut e = vec![0.0; self.dim];
                e[i] = 1.0;
                self.vector(&e).expect("coordinate length matches basis dimension")
            })
            .collect()
    }
}

fn sym_to_coords(s: &DMatrix<f64>) -> DVector<f64> {
    let n = s.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        out.push(s[(i, i)]);
    }
    for j in 0..n {
        for i in 0..j {
            out.push(SQRT2 * 0.5 * (s[(i, j)] + s[(j, i)]));
        }
    }
    DVector::from_vec(out)
}

fn coords_to_sym(c: &[f64], n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = c[i];
    }
    let mut idx = n;
    for j in 0..n {
        for i in 0..j {
            s[(i, j)] = c[idx] / SQRT2;
            s[(j, i)] = c[idx] / SQRT2;
            idx += 1;
        }
    }
    s
}

/// A named Riemannian geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldHandle {
    kind: ManifoldKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curvature_override: Option<f64>,
}

impl ManifoldHandle {
    pub fn new(kind: ManifoldKind) -> Result<Self> {
        let ok = match kind {
            ManifoldKind::Euclidean { n } | ManifoldKind::Hyperbolic { n } | ManifoldKind::Spd { n } => n >= 1,
            ManifoldKind::Sphere { n } | ManifoldKind::Rotations { n } => n >= 2,
            ManifoldKind::Grassmannian { n, k } => k >= 1 && k < n,
            ManifoldKind::Segre { n1, n2 } => n1 >= 2 && n2 >= 2,
        };
        if !ok {
            return Err(Error::invalid(format!("invalid dimensions for {kind}")));
        }
        Ok(Self {
            kind,
            curvature_override: None,
        })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(ManifoldKind::Euclidean { n })
    }
    pub fn sphere(n: usize) -> Result<Self> {
        Self::new(ManifoldKind::Sphere { n })
    }
    pub fn hyperbolic(n: usize) -> Result<Self> {
        Self::new(ManifoldKind::Hyperbolic { n })
    }
    pub fn rotations(n: usize) -> Result<Self> {
        Self::new(ManifoldKind::Rotations { n })
    }
    pub fn grassmannian(n: usize, k: usize) -> Result<Self> {
        Self::new(ManifoldKind::Grassmannian { n, k })
    }
    pub fn spd(n: usize) -> Result<Self> {
        Self::new(ManifoldKind::Spd { n })
    }
    pub fn segre(n1: usize, n2: usize) -> Result<Self> {
        Self::new(ManifoldKind::Segre { n1, n2 })
    }

    /// Replaces the built-in curvature lower bound (e.g. the SPD default of
    /// −1/2) with a caller-supplied constant.
    pub fn with_curvature_bound(mut self, h: f64) -> Self {
        self.curvature_override = Some(h);
        self
    }

    pub fn curvature_override(&self) -> Option<f64> {
        self.curvature_override
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    /// Number of reals in the point representation.
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Euclidean { n } | ManifoldKind::Sphere { n } => n,
            ManifoldKind::Hyperbolic { n } => n + 1,
            ManifoldKind::Rotations { n } | ManifoldKind::Spd { n } => n * n,
            ManifoldKind::Grassmannian { n, k } => n * k,
            ManifoldKind::Segre { n1, n2 } => n1 * n2,
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Euclidean { n } | ManifoldKind::Hyperbolic { n } => n,
            ManifoldKind::Sphere { n } => n - 1,
            ManifoldKind::Rotations { n } => n * (n - 1) / 2,
            ManifoldKind::Grassmannian { n, k } => k * (n - k),
            ManifoldKind::Spd { n } => n * (n + 1) / 2,
            ManifoldKind::Segre { n1, n2 } => n1 + n2 - 1,
        }
    }

    fn not_on(&self, residual: f64) -> Error {
        Error::NotOnManifold {
            manifold: self.name(),
            residual,
        }
    }

    fn not_tangent(&self, residual: f64) -> Error {
        Error::NotTangent {
            manifold: self.name(),
            residual,
        }
    }

    /// Membership residual of a point; errors on a wrong shape.
    pub fn point_residual(&self, p: &ManifoldPoint) -> Result<f64> {
        match self.kind {
            ManifoldKind::Euclidean { n } => euclidean::point_residual(n, p.as_vector()?),
            ManifoldKind::Sphere { n } => sphere::point_residual(n, p.as_vector()?),
            ManifoldKind::Hyperbolic { n } => hyperbolic::point_residual(n, p.as_vector()?),
            ManifoldKind::Rotations { n } => rotations::point_residual(n, p.as_matrix()?),
            ManifoldKind::Grassmannian { n, k } => grassmann::point_residual(n, k, p.as_matrix()?),
            ManifoldKind::Spd { n } => spd::point_residual(n, p.as_matrix()?),
            ManifoldKind::Segre { n1, n2 } => segre::point_residual(n1, n2, p.as_segre()?),
        }
    }

    pub fn check_point(&self, p: &ManifoldPoint) -> Result<()> {
        let r = self.point_residual(p)?;
        if r <= MEMBERSHIP_TOL {
            Ok(())
        } else {
            Err(self.not_on(r))
        }
    }

    /// Tangency residual of `v` at `p`; errors on a wrong shape.
    pub fn tangent_residual(&self, p: &ManifoldPoint, v: &TangentVector) -> Result<f64> {
        match self.kind {
            ManifoldKind::Euclidean { .. } => euclidean::tangent_residual(p.as_vector()?, v.as_vector()?),
            ManifoldKind::Sphere { .. } => sphere::tangent_residual(p.as_vector()?, v.as_vector()?),
            ManifoldKind::Hyperbolic { .. } => hyperbolic::tangent_residual(p.as_vector()?, v.as_vector()?),
            ManifoldKind::Rotations { .. } => rotations::tangent_residual(p.as_matrix()?, v.as_matrix()?),
            ManifoldKind::Grassmannian { .. } => grassmann::tangent_residual(p.as_matrix()?, v.as_matrix()?),
            ManifoldKind::Spd { .. } => spd::tangent_residual(p.as_matrix()?, v.as_matrix()?),
            ManifoldKind::Segre { .. } => segre::tangent_residual(p.as_segre()?, v.as_segre()?),
        }
    }

    pub fn check_tangent(&self, p: &ManifoldPoint, v: &TangentVector) -> Result<()> {
        let r = self.tangent_residual(p, v)?;
        if r <= MEMBERSHIP_TOL {
            Ok(())
        } else {
            Err(self.not_tangent(r))
        }
    }

    pub fn zero_tangent(&self, p: &ManifoldPoint) -> TangentVector {
        match p {
            ManifoldPoint::Vector(v) => TangentVector::Vector(DVector::zeros(v.len())),
            ManifoldPoint::Matrix(m) => TangentVector::Matrix(DMatrix::zeros(m.nrows(), m.ncols())),
            ManifoldPoint::Segre(s) => TangentVector::Segre(SegreTangent {
                radial: 0.0,
                left: DVector::zeros(s.left.len()),
                right: DVector::zeros(s.right.len()),
            }),
        }
    }

    /// Riemannian exponential `exp_p(v)`.
    pub fn exp(&self, p: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
        self.check_point(p)?;
        self.check_tangent(p, v)?;
        self.exp_unchecked(p, v)
    }

    fn exp_unchecked(&self, p: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
        Ok(match self.kind {
            ManifoldKind::Euclidean { .. } => ManifoldPoint::Vector(p.as_vector()? + v.as_vector()?),
            ManifoldKind::Sphere { .. } => ManifoldPoint::Vector(sphere::exp(p.as_vector()?, v.as_vector()?)),
            ManifoldKind::Hyperbolic { .. } => {
                ManifoldPoint::Vector(hyperbolic::exp(p.as_vector()?, v.as_vector()?))
            }
            ManifoldKind::Rotations { .. } => {
                ManifoldPoint::Matrix(rotations::exp(p.as_matrix()?, v.as_matrix()?)?)
            }
            ManifoldKind::Grassmannian { .. } => {
                ManifoldPoint::Matrix(grassmann::exp(p.as_matrix()?, v.as_matrix()?))
            }
            ManifoldKind::Spd { .. } => ManifoldPoint::Matrix(spd::exp(p.as_matrix()?, v.as_matrix()?)?),
            ManifoldKind::Segre { .. } => ManifoldPoint::Segre(segre::exp(p.as_segre()?, v.as_segre()?)?),
        })
    }

    /// Riemannian logarithm `log_p(q)`. Points on (or numerically at) the
    /// cut locus of `p` are rejected with [`Error::ChartViolation`].
    pub fn log(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<TangentVector> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(match self.kind {
            ManifoldKind::Euclidean { .. } => TangentVector::Vector(q.as_vector()? - p.as_vector()?),
            ManifoldKind::Sphere { .. } => TangentVector::Vector(sphere::log(p.as_vector()?, q.as_vector()?)?),
            ManifoldKind::Hyperbolic { .. } => {
                TangentVector::Vector(hyperbolic::log(p.as_vector()?, q.as_vector()?))
            }
            ManifoldKind::Rotations { .. } => {
                TangentVector::Matrix(rotations::log(p.as_matrix()?, q.as_matrix()?)?)
            }
            ManifoldKind::Grassmannian { .. } => {
                TangentVector::Matrix(grassmann::log(p.as_matrix()?, q.as_matrix()?)?)
            }
            ManifoldKind::Spd { .. } => TangentVector::Matrix(spd::log(p.as_matrix()?, q.as_matrix()?)?),
            ManifoldKind::Segre { .. } => TangentVector::Segre(segre::log(p.as_segre()?, q.as_segre()?)?),
        })
    }

    /// Geodesic distance.
    pub fn distance(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        match self.kind {
            ManifoldKind::Euclidean { .. } => Ok((q.as_vector()? - p.as_vector()?).norm()),
            ManifoldKind::Sphere { .. } => Ok(sphere::distance(p.as_vector()?, q.as_vector()?)),
            ManifoldKind::Hyperbolic { .. } => Ok(hyperbolic::distance(p.as_vector()?, q.as_vector()?)),
            ManifoldKind::Rotations { .. } => rotations::distance(p.as_matrix()?, q.as_matrix()?),
            ManifoldKind::Grassmannian { .. } => grassmann::distance(p.as_matrix()?, q.as_matrix()?),
            ManifoldKind::Spd { .. } => spd::distance(p.as_matrix()?, q.as_matrix()?),
            ManifoldKind::Segre { .. } => segre::distance(p.as_segre()?, q.as_segre()?),
        }
    }

    /// Riemannian inner product ⟨u, v⟩_p.
    pub fn inner(&self, p: &ManifoldPoint, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        match self.kind {
            ManifoldKind::Euclidean { .. } | ManifoldKind::Sphere { .. } => {
                let (u, v) = (u.as_vector()?, v.as_vector()?);
                same_len(u.len(), v.len())?;
                Ok(u.dot(v))
            }
            ManifoldKind::Hyperbolic { .. } => {
                let (u, v) = (u.as_vector()?, v.as_vector()?);
                same_len(u.len(), v.len())?;
                Ok(hyperbolic::minkowski(u, v))
            }
            ManifoldKind::Rotations { .. } | ManifoldKind::Grassmannian { .. } => {
                let (u, v) = (u.as_matrix()?, v.as_matrix()?);
                same_len(u.len(), v.len())?;
                Ok(u.dot(v))
            }
            ManifoldKind::Spd { .. } => spd::inner(p.as_matrix()?, u.as_matrix()?, v.as_matrix()?),
            ManifoldKind::Segre { .. } => Ok(segre::inner(p.as_segre()?, u.as_segre()?, v.as_segre()?)),
        }
    }

    pub fn norm(&self, p: &ManifoldPoint, v: &TangentVector) -> Result<f64> {
        Ok(self.inner(p, v, v)?.max(0.0).sqrt())
    }

    /// A constant H with sectional curvature K ≥ H on the geodesic ball of
    /// radius `sigma` about `p`.
    pub fn curvature_lower_bound(&self, sigma: f64, p: &ManifoldPoint) -> Result<f64> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!("chart radius must be finite and ≥ 0, got {sigma}")));
        }
        if let Some(h) = self.curvature_override {
            return Ok(h);
        }
        Ok(match self.kind {
            ManifoldKind::Euclidean { .. }
            | ManifoldKind::Sphere { .. }
            | ManifoldKind::Rotations { .. }
            | ManifoldKind::Grassmannian { .. } => 0.0,
            ManifoldKind::Hyperbolic { .. } => -1.0,
            ManifoldKind::Spd { .. } => SPD_DEFAULT_CURVATURE,
            ManifoldKind::Segre { .. } => segre::curvature_lower_bound(p.as_segre()?, sigma)?,
        })
    }

    /// Retraction at `p`. [`RetractionMethod::Exponential`] is the exponential
    /// map; QR and polar retractions exist for Grassmannians and rotations.
    pub fn retract(
        &self,
        p: &ManifoldPoint,
        v: &TangentVector,
        method: RetractionMethod,
    ) -> Result<ManifoldPoint> {
        if method == RetractionMethod::Exponential {
            return self.exp(p, v);
        }
        self.check_point(p)?;
        self.check_tangent(p, v)?;
        match self.kind {
            ManifoldKind::Grassmannian { .. } => Ok(ManifoldPoint::Matrix(grassmann::retract(
                p.as_matrix()?,
                v.as_matrix()?,
                method,
            )?)),
            ManifoldKind::Rotations { .. } => Ok(ManifoldPoint::Matrix(rotations::retract(
                p.as_matrix()?,
                v.as_matrix()?,
                method,
            )?)),
            _ => Err(self.unsupported(method)),
        }
    }

    pub fn inverse_retract(
        &self,
        p: &ManifoldPoint,
        q: &ManifoldPoint,
        method: RetractionMethod,
    ) -> Result<TangentVector> {
        if method == RetractionMethod::Exponential {
            return self.log(p, q);
        }
        self.check_point(p)?;
        self.check_point(q)?;
        match self.kind {
            ManifoldKind::Grassmannian { .. } => Ok(TangentVector::Matrix(grassmann::inverse_retract(
                p.as_matrix()?,
                q.as_matrix()?,
            )?)),
            ManifoldKind::Rotations { .. } => Ok(TangentVector::Matrix(rotations::inverse_retract(
                p.as_matrix()?,
                q.as_matrix()?,
                method,
            )?)),
            _ => Err(self.unsupported(method)),
        }
    }

    fn unsupported(&self, method: RetractionMethod) -> Error {
        Error::Unsupported {
            manifold: self.name(),
            method: method.to_string(),
        }
    }

    pub fn supports(&self, method: RetractionMethod) -> bool {
        method == RetractionMethod::Exponential
            || matches!(
                self.kind,
                ManifoldKind::Grassmannian { .. } | ManifoldKind::Rotations { .. }
            )
    }

    /// An orthonormal basis of T_pM.
    pub fn tangent_basis(&self, p: &ManifoldPoint) -> Result<TangentBasis> {
        self.check_point(p)?;
        let frame = match self.kind {
            ManifoldKind::Euclidean { .. } => Frame::Identity,
            ManifoldKind::Sphere { .. } => Frame::Columns(sphere::tangent_frame(p.as_vector()?)),
            ManifoldKind::Hyperbolic { .. } => Frame::Lorentz(hyperbolic::tangent_frame(p.as_vector()?)),
            ManifoldKind::Rotations { .. } => Frame::Rotation,
            ManifoldKind::Grassmannian { .. } => {
                Frame::Grassmann(crate::linalg::orthonormal_complement(p.as_matrix()?))
            }
            ManifoldKind::Spd { .. } => {
                let (sqrt, inv_sqrt) = spd::sqrt_pair(p.as_matrix()?)?;
                Frame::Spd { sqrt, inv_sqrt }
            }
            ManifoldKind::Segre { .. } => {
                let s = p.as_segre()?;
                Frame::Segre {
                    left: sphere::tangent_frame(&s.left),
                    right: sphere::tangent_frame(&s.right),
                }
            }
        };
        Ok(TangentBasis {
            base: p.clone(),
            frame,
            dim: self.intrinsic_dim(),
        })
    }

    /// A conservative radius below which exp/log at `p` are inverse to each
    /// other (the injectivity radius, or a practical surrogate for complete
    /// manifolds without cut locus).
    pub fn chart_radius_hint(&self, p: &ManifoldPoint) -> f64 {
        use std::f64::consts::{FRAC_PI_2, PI};
        match self.kind {
            ManifoldKind::Euclidean { .. } => 10.0,
            ManifoldKind::Sphere { .. } | ManifoldKind::Rotations { .. } => PI,
            ManifoldKind::Hyperbolic { .. } | ManifoldKind::Spd { .. } => 5.0,
            ManifoldKind::Grassmannian { .. } => FRAC_PI_2,
            ManifoldKind::Segre { .. } => p.as_segre().map(|s| s.scale).unwrap_or(0.0),
        }
    }

    /// A random point, drawn from a simple distribution concentrated near a
    /// canonical origin for non-compact kinds.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> ManifoldPoint {
        let mut normal = |len: usize| DVector::from_fn(len, |_, _| rng.sample::<f64, _>(StandardNormal));
        match self.kind {
            ManifoldKind::Euclidean { n } => ManifoldPoint::Vector(normal(n)),
            ManifoldKind::Sphere { n } => ManifoldPoint::Vector(normal(n).normalize()),
            ManifoldKind::Hyperbolic { n } => {
                let x = normal(n) * 0.5;
                ManifoldPoint::Vector(hyperbolic::lift(&x))
            }
            ManifoldKind::Rotations { n } => {
                let a = DMatrix::from_column_slice(n, n, normal(n * n).as_slice());
                let (mut q, _) = crate::linalg::thin_qr(&a);
                if q.determinant() < 0.0 {
                    q.column_mut(0).neg_mut();
                }
                ManifoldPoint::Matrix(q)
            }
            ManifoldKind::Grassmannian { n, k } => {
                let a = DMatrix::from_column_slice(n, k, normal(n * k).as_slice());
                ManifoldPoint::Matrix(crate::linalg::thin_qr(&a).0)
            }
            ManifoldKind::Spd { n } => {
                let a = DMatrix::from_column_slice(n, n, normal(n * n).as_slice()) * 0.5;
                let s = crate::linalg::symmetrize(&a);
                ManifoldPoint::Matrix(
                    crate::linalg::sym_funm(&s, crate::linalg::SymFn::Exp).expect("symmetric input"),
                )
            }
            ManifoldKind::Segre { n1, n2 } => {
                let scale = (normal(1)[0] * 0.3).exp();
                ManifoldPoint::Segre(SegrePoint {
                    scale,
                    left: normal(n1).normalize(),
                    right: normal(n2).normalize(),
                })
            }
        }
    }

    /// A tangent vector at `p` with a uniformly random direction and the
    /// given Riemannian norm.
    pub fn random_tangent<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        p: &ManifoldPoint,
        norm: f64,
    ) -> Result<TangentVector> {
        let basis = self.tangent_basis(p)?;
        let c = DVector::from_fn(basis.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let c = c.normalize() * norm;
        basis.vector(c.as_slice())
    }
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("tangent sizes differ ({a} vs {b})")))
    }
}

/// Successive geodesic interpolation estimate of the Karcher mean:
/// m(p₁) = p₁ and m(p₁..p_N) = exp_{p_N}(((N−1)/N) · log_{p_N} m(p₁..p_{N−1})).
///
/// The result depends on the order of the points except on flat spaces,
/// where it is the arithmetic mean.
pub fn karcher_mean_estimate(m: &ManifoldHandle, points: &[ManifoldPoint]) -> Result<ManifoldPoint> {
    let (first, rest) = points
        .split_first()
        .ok_or_else(|| Error::invalid("Karcher mean of an empty list"))?;
    m.check_point(first)?;
    let mut mean = first.clone();
    for (i, p) in rest.iter().enumerate() {
        let count = (i + 2) as f64;
        let v = m.log(p, &mean)?;
        mean = m.exp(p, &v.scale((count - 1.0) / count))?;
    }
    Ok(mean)
}
