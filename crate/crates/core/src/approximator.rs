//! Approximating maps from a box in ℝᵐ into a manifold.
//!
//! The map is pulled back to the tangent space at a base point p, sampled on
//! a Chebyshev tensor grid, compressed with ST-HOSVD and interpolated factor
//! by factor. Evaluation contracts the interpolated factors with the core
//! and pushes the resulting tangent vector forward with exp_p (or a
//! retraction).

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundForm, BoundInputs};
use crate::chebyshev::{self, ChebyshevGrid, LagrangeBasis};
use crate::error::{Error, Result};
use crate::manifolds::{
    karcher_mean_estimate, ManifoldHandle, ManifoldPoint, RetractionMethod, SegrePoint, TangentBasis,
    TangentVector,
};
use crate::parallel;
use crate::tucker::{self, DenseTensor, Truncation};

pub const DEFAULT_KARCHER_SAMPLES: usize = 100;

/// Axis-aligned box ∏[lower_k, upper_k].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid("domain bounds must be nonempty and of equal length"));
        }
        for (k, (&a, &b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::invalid(format!("axis {k} has invalid bounds [{a}, {b}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// [−1, 1]ᵐ.
    pub fn cube(m: usize) -> Result<Self> {
        Self::new(vec![-1.0; m], vec![1.0; m])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Affine image of a point of [−1, 1]ᵐ.
    pub fn from_unit(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&t, (&a, &b))| 0.5 * (a + b) + 0.5 * (b - a) * t)
            .collect()
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&a, &b))| (2.0 * x - a - b) / (b - a))
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&a, &b)| rng.random_range(a..=b))
            .collect()
    }
}

/// Where and how densely to sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub domain: Domain,
    /// Chebyshev node count per input variable (degree + 1).
    pub counts: Vec<usize>,
    pub karcher_samples: usize,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn new(domain: Domain, counts: Vec<usize>) -> Self {
        Self {
            domain,
            counts,
            karcher_samples: DEFAULT_KARCHER_SAMPLES,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_karcher_samples(mut self, n: usize) -> Self {
        self.karcher_samples = n;
        self
    }

    pub fn grid(&self) -> Result<ChebyshevGrid> {
        ChebyshevGrid::new(&self.counts)
    }

    fn validate(&self) -> Result<()> {
        if self.counts.len() != self.domain.dim() {
            return Err(Error::invalid(format!(
                "{} node counts for a {}-dimensional domain",
                self.counts.len(),
                self.domain.dim()
            )));
        }
        if self.karcher_samples == 0 {
            return Err(Error::invalid("the Karcher estimate needs at least one sample"));
        }
        self.grid().map(|_| ())
    }
}

/// How tangent vectors are mapped to and from the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapVariant {
    ExpLog,
    Retraction(RetractionMethod),
}

impl MapVariant {
    fn method(self) -> RetractionMethod {
        match self {
            MapVariant::ExpLog => RetractionMethod::Exponential,
            MapVariant::Retraction(m) => m,
        }
    }
}

/// A map that can be evaluated at points of its domain.
pub trait SampleableMap: Sync {
    fn eval(&self, x: &[f64]) -> Result<ManifoldPoint>;
}

impl<F> SampleableMap for F
where
    F: Fn(&[f64]) -> Result<ManifoldPoint> + Sync,
{
    fn eval(&self, x: &[f64]) -> Result<ManifoldPoint> {
        self(x)
    }
}

/// Karcher mean estimate of f at `karcher_samples` seeded uniform draws, in
/// draw order.
pub fn choose_base_point<F: SampleableMap + ?Sized>(
    f: &F,
    m: &ManifoldHandle,
    plan: &SamplingPlan,
) -> Result<ManifoldPoint> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let draws: Vec<Vec<f64>> = (0..plan.karcher_samples).map(|_| plan.domain.sample(&mut rng)).collect();
    let points = parallel::map(draws.len(), |i| f.eval(&draws[i]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    karcher_mean_estimate(m, &points)
}

fn pull_back(
    m: &ManifoldHandle,
    p: &ManifoldPoint,
    q: &ManifoldPoint,
    method: RetractionMethod,
) -> Result<TangentVector> {
    m.inverse_retract(p, q, method)
}

fn push_forward(
    m: &ManifoldHandle,
    p: &ManifoldPoint,
    v: &TangentVector,
    method: RetractionMethod,
) -> Result<ManifoldPoint> {
    m.retract(p, v, method)
}

/// G[i₁, …, i_m, j]: the j-th basis coordinate of the pulled-back map at
/// grid node (i₁, …, i_m).
pub fn sample_tensor<F: SampleableMap + ?Sized>(
    f: &F,
    m: &ManifoldHandle,
    basis: &TangentBasis,
    plan: &SamplingPlan,
    variant: MapVariant,
) -> Result<DenseTensor> {
    plan.validate()?;
    let grid = plan.grid()?;
    let p = basis.base();
    let method = variant.method();
    let points = grid.total_points();
    let dim = basis.dim();
    let columns = parallel::map(points, |lin| -> Result<DVector<f64>> {
        let idx = grid.multi_index(lin);
        let x = plan.domain.from_unit(&grid.point(&idx));
        let node_err = |e: Error| match e {
            Error::ChartViolation(msg) => Error::ChartViolation(format!("at node {idx:?}: {msg}")),
            other => other,
        };
        let q = f.eval(&x).map_err(node_err)?;
        let v = pull_back(m, p, &q, method).map_err(node_err)?;
        basis.coordinates(&v)
    });
    let mut data = vec![0.0; points * dim];
    for (lin, col) in columns.into_iter().enumerate() {
        let col = col?;
        for j in 0..dim {
            data[lin + points * j] = col[j];
        }
    }
    let mut shape = plan.counts.clone();
    shape.push(dim);
    DenseTensor::new(shape, data)
}

/// Output of [`build`] besides the approximant itself.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildDiagnostics {
    pub ranks: Vec<usize>,
    pub discarded_energy: Vec<f64>,
    pub sample_norm: f64,
    pub max_sample_norm: f64,
}

/// f̂ = exp_p ∘ ĝ with ĝ stored in Tucker form.
#[derive(Debug, Clone)]
pub struct ManifoldApproximant {
    manifold: ManifoldHandle,
    base_point: ManifoldPoint,
    basis: TangentBasis,
    domain: Domain,
    variant: MapVariant,
    /// r₁ × ⋯ × r_m × r_c.
    core: DenseTensor,
    /// r_c × n.
    component: DMatrix<f64>,
    /// Node values of the factor interpolants, (N_k + 1) × r_k.
    factors: Vec<DMatrix<f64>>,
    lagrange: Vec<LagrangeBasis>,
}

/// Runs the full construction: base point, sampling, ST-HOSVD and factor
/// interpolation.
pub fn build<F: SampleableMap + ?Sized>(
    f: &F,
    m: &ManifoldHandle,
    plan: &SamplingPlan,
    truncation: &Truncation,
    variant: MapVariant,
) -> Result<(ManifoldApproximant, BuildDiagnostics)> {
    if !m.supports(variant.method()) {
        return Err(Error::Unsupported {
            manifold: m.name(),
            method: variant.method().to_string(),
        });
    }
    let p = choose_base_point(f, m, plan)?;
    build_at(f, m, &p, plan, truncation, variant)
}

/// [`build`] with a caller-chosen base point.
pub fn build_at<F: SampleableMap + ?Sized>(
    f: &F,
    m: &ManifoldHandle,
    p: &ManifoldPoint,
    plan: &SamplingPlan,
    truncation: &Truncation,
    variant: MapVariant,
) -> Result<(ManifoldApproximant, BuildDiagnostics)> {
    let basis = m.tangent_basis(p)?;
    let g = sample_tensor(f, m, &basis, plan, variant)?;
    let points: usize = plan.counts.iter().product();
    let max_sample_norm = (0..points)
        .map(|lin| {
            (0..basis.dim())
                .map(|j| g.as_slice()[lin + points * j].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let (model, info) = tucker::sthosvd(&g, truncation)?;
    let diagnostics = BuildDiagnostics {
        ranks: model.ranks(),
        discarded_energy: info.discarded_energy.clone(),
        sample_norm: g.norm(),
        max_sample_norm,
    };
    let component = model.component_factor();
    let mut factors = model.factors;
    factors.pop();
    let approx = ManifoldApproximant {
        manifold: *m,
        base_point: p.clone(),
        basis,
        domain: plan.domain.clone(),
        variant,
        core: model.core,
        component,
        lagrange: plan.counts.iter().map(|&c| LagrangeBasis::new(c)).collect(),
        factors,
    };
    Ok((approx, diagnostics))
}

impl ManifoldApproximant {
    pub fn manifold(&self) -> &ManifoldHandle {
        &self.manifold
    }

    pub fn base_point(&self) -> &ManifoldPoint {
        &self.base_point
    }

    pub fn basis(&self) -> &TangentBasis {
        &self.basis
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn variant(&self) -> MapVariant {
        self.variant
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    /// Degree per input variable.
    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|u| u.nrows() - 1).collect()
    }

    /// Tucker ranks, sample modes first and the component mode last.
    pub fn ranks(&self) -> Vec<usize> {
        self.core.shape().to_vec()
    }

    /// Π_k Λ_{N_k}: the max-norm of the tensorized interpolation operator
    /// is at most this.
    pub fn lebesgue_product(&self) -> f64 {
        self.degrees().into_iter().map(chebyshev::lebesgue_bound).product()
    }

    /// Coordinates of ĝ(x) in the tangent basis.
    pub fn evaluate_coordinates(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.domain.dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected a point with {} coordinates, got {}",
                self.domain.dim(),
                x.len()
            )));
        }
        let t = self.domain.to_unit(x);
        let mut acc = self.core.as_slice().to_vec();
        for (k, u) in self.factors.iter().enumerate() {
            let ell = self.lagrange[k].values(t[k])?;
            let h = u.transpose() * DVector::from_vec(ell);
            let r = h.len();
            let rest = acc.len() / r;
            acc = (0..rest)
                .map(|j| (0..r).map(|a| h[a] * acc[a + r * j]).sum())
                .collect();
        }
        Ok(self.component.transpose() * DVector::from_vec(acc))
    }

    /// The tangent vector ĝ(x) at the base point.
    pub fn evaluate_tangent(&self, x: &[f64]) -> Result<TangentVector> {
        let c = self.evaluate_coordinates(x)?;
        self.basis.vector(c.as_slice())
    }

    /// f̂(x).
    pub fn evaluate(&self, x: &[f64]) -> Result<ManifoldPoint> {
        let v = self.evaluate_tangent(x)?;
        push_forward(&self.manifold, &self.base_point, &v, self.variant.method())
    }
}

/// Measured errors on a validation set together with the certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// max ‖g − ĝ‖ (for retraction variants, ‖r⁻¹∘f − ĝ‖).
    pub epsilon: f64,
    /// max of the tangent norms involved.
    pub sigma: f64,
    /// max d_M(f, f̂).
    pub manifold_error: f64,
    /// Curvature lower bound used by the certificate.
    pub curvature: f64,
    pub bound: f64,
    /// Points evaluated successfully.
    pub evaluated: usize,
    /// Points skipped because of a chart violation.
    pub skipped: usize,
    /// Measured retraction terms, for retraction variants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retraction: Option<bounds::RetractionTerms>,
}

struct PointErrors {
    eps: f64,
    sigma: f64,
    dist: f64,
    eta: f64,
    zeta: f64,
}

fn point_errors<F: SampleableMap + ?Sized>(
    f: &F,
    approx: &ManifoldApproximant,
    x: &[f64],
) -> Result<PointErrors> {
    let m = &approx.manifold;
    let p = &approx.base_point;
    let q = f.eval(x)?;
    let g = approx.basis.coordinates(&m.log(p, &q)?)?;
    let gh = approx.evaluate_coordinates(x)?;
    let gh_vec = approx.basis.vector(gh.as_slice())?;
    let fh = push_forward(m, p, &gh_vec, approx.variant.method())?;
    let dist = m.distance(&q, &fh)?;
    match approx.variant {
        MapVariant::ExpLog => Ok(PointErrors {
            eps: (&g - &gh).norm(),
            sigma: g.norm().max(gh.norm()),
            dist,
            eta: 0.0,
            zeta: 0.0,
        }),
        MapVariant::Retraction(method) => {
            let gr = approx.basis.coordinates(&m.inverse_retract(p, &q, method)?)?;
            let exp = m.exp(p, &gh_vec)?;
            Ok(PointErrors {
                eps: (&gr - &gh).norm(),
                sigma: g.norm().max(gh.norm()).max(gr.norm()),
                dist,
                eta: (&gr - &g).norm(),
                zeta: m.distance(&fh, &exp)?,
            })
        }
    }
}

/// Validates on explicit points.
pub fn validate_points<F: SampleableMap + ?Sized>(
    f: &F,
    approx: &ManifoldApproximant,
    points: &[Vec<f64>],
) -> Result<ErrorReport> {
    let results = parallel::map(points.len(), |i| point_errors(f, approx, &points[i]));
    let mut agg = PointErrors {
        eps: 0.0,
        sigma: 0.0,
        dist: 0.0,
        eta: 0.0,
        zeta: 0.0,
    };
    let (mut evaluated, mut skipped) = (0, 0);
    for r in results {
        match r {
            Ok(e) => {
                agg.eps = agg.eps.max(e.eps);
                agg.sigma = agg.sigma.max(e.sigma);
                agg.dist = agg.dist.max(e.dist);
                agg.eta = agg.eta.max(e.eta);
                agg.zeta = agg.zeta.max(e.zeta);
                evaluated += 1;
            }
            Err(Error::ChartViolation(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let m = &approx.manifold;
    let curvature = m.curvature_lower_bound(agg.sigma, &approx.base_point)?;
    let inputs = BoundInputs::new(agg.eps, agg.sigma, curvature);
    let (bound, retraction) = match approx.variant {
        MapVariant::ExpLog => (bounds::forward_error_bound(&inputs, BoundForm::Exact)?, None),
        MapVariant::Retraction(_) => {
            let inputs = inputs.with_retraction(agg.zeta, agg.eta, approx.lebesgue_product());
            (bounds::retraction_error_bound(&inputs)?, inputs.retraction)
        }
    };
    Ok(ErrorReport {
        epsilon: agg.eps,
        sigma: agg.sigma,
        manifold_error: agg.dist,
        curvature,
        bound,
        evaluated,
        skipped,
        retraction,
    })
}

/// Validates on `count` seeded uniform draws from the domain.
pub fn validate<F: SampleableMap + ?Sized>(
    f: &F,
    approx: &ManifoldApproximant,
    count: usize,
    seed: u64,
) -> Result<ErrorReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..count).map(|_| approx.domain.sample(&mut rng)).collect();
    validate_points(f, approx, &points)
}

const FORMAT_NAME: &str = "manifold-approx/approximant";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    /// Column-major.
    data: Vec<f64>,
}

impl From<&DMatrix<f64>> for MatrixRepr {
    fn from(m: &DMatrix<f64>) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.as_slice().to_vec(),
        }
    }
}

impl MatrixRepr {
    fn into_matrix(self) -> Result<DMatrix<f64>> {
        if self.rows * self.cols != self.data.len() {
            return Err(Error::Format("matrix data length does not match its shape".into()));
        }
        Ok(DMatrix::from_vec(self.rows, self.cols, self.data))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum PointRepr {
    Vector { data: Vec<f64> },
    Matrix(MatrixRepr),
    Segre { scale: f64, left: Vec<f64>, right: Vec<f64> },
}

impl From<&ManifoldPoint> for PointRepr {
    fn from(p: &ManifoldPoint) -> Self {
        match p {
            ManifoldPoint::Vector(v) => PointRepr::Vector {
                data: v.as_slice().to_vec(),
            },
            ManifoldPoint::Matrix(m) => PointRepr::Matrix(m.into()),
            ManifoldPoint::Segre(s) => PointRepr::Segre {
                scale: s.scale,
                left: s.left.as_slice().to_vec(),
                right: s.right.as_slice().to_vec(),
            },
        }
    }
}

impl PointRepr {
    fn into_point(self) -> Result<ManifoldPoint> {
        Ok(match self {
            PointRepr::Vector { data } => ManifoldPoint::Vector(DVector::from_vec(data)),
            PointRepr::Matrix(m) => ManifoldPoint::Matrix(m.into_matrix()?),
            PointRepr::Segre { scale, left, right } => ManifoldPoint::Segre(SegrePoint::new(
                scale,
                DVector::from_vec(left),
                DVector::from_vec(right),
            )),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ApproximantRepr {
    format: String,
    version: u32,
    manifold: ManifoldHandle,
    variant: MapVariant,
    domain: Domain,
    base_point: PointRepr,
    core_shape: Vec<usize>,
    core: Vec<f64>,
    component: MatrixRepr,
    factors: Vec<MatrixRepr>,
}

impl ManifoldApproximant {
    /// Versioned JSON; floats round-trip exactly.
    pub fn to_json(&self) -> Result<String> {
        let repr = ApproximantRepr {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            manifold: self.manifold,
            variant: self.variant,
            domain: self.domain.clone(),
            base_point: (&self.base_point).into(),
            core_shape: self.core.shape().to_vec(),
            core: self.core.as_slice().to_vec(),
            component: (&self.component).into(),
            factors: self.factors.iter().map(MatrixRepr::from).collect(),
        };
        serde_json::to_string(&repr).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: ApproximantRepr = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        if repr.format != FORMAT_NAME {
            return Err(Error::Format(format!("unexpected format tag {:?}", repr.format)));
        }
        if repr.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {}", repr.version)));
        }
        let manifold = ManifoldHandle::new(repr.manifold.kind())
            .map_err(|e| Error::Format(e.to_string()))?;
        let manifold = match repr.manifold.curvature_override() {
            Some(h) => manifold.with_curvature_bound(h),
            None => manifold,
        };
        let base_point = repr.base_point.into_point()?;
        let basis = manifold.tangent_basis(&base_point)?;
        let core = DenseTensor::new(repr.core_shape, repr.core)?;
        let component = repr.component.into_matrix()?;
        let factors = repr
            .factors
            .into_iter()
            .map(MatrixRepr::into_matrix)
            .collect::<Result<Vec<_>>>()?;
        let m = factors.len();
        let consistent = core.order() == m + 1
            && repr.domain.dim() == m
            && factors.iter().zip(core.shape()).all(|(u, &r)| u.ncols() == r && u.nrows() > 0)
            && component.nrows() == core.shape()[m]
            && component.ncols() == basis.dim();
        if !consistent {
            return Err(Error::Format("approximant shapes are inconsistent".into()));
        }
        Ok(Self {
            manifold,
            base_point,
            basis,
            domain: repr.domain,
            variant: repr.variant,
            core,
            component,
            lagrange: factors.iter().map(|u| LagrangeBasis::new(u.nrows())).collect(),
            factors,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&s)
    }
}
