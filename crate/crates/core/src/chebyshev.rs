//! Chebyshev points of the first kind and barycentric interpolation.
//!
//! With n nodes t_i = cos((2i−1)π/(2n)) the node polynomial is
//! 2^{1−n}·T_n, which gives the closed-form weights used below and lets the
//! first-kind barycentric formula be evaluated without overflow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on |x| − 1 accepted by evaluation.
const DOMAIN_SLACK: f64 = 1e-14;

/// The n first-kind Chebyshev nodes in decreasing order.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| ((2 * i + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// Scaled barycentric weights (−1)^i sin((2i+1)π/(2n)) / n, arranged so
/// that p(x) = T_n(x) Σ w_i f_i / (x − t_i).
fn weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let s = ((2 * i + 1) as f64 * PI / (2 * n) as f64).sin() / n as f64;
            if i % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect()
}

fn check_domain(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(Error::invalid(format!("evaluation point {x} lies outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Tensor grid of Chebyshev nodes, one node list per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevGrid {
    counts: Vec<usize>,
    nodes: Vec<Vec<f64>>,
}

impl ChebyshevGrid {
    /// A grid with `counts[k]` nodes (degree `counts[k] − 1`) in mode k.
    pub fn new(counts: &[usize]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("a Chebyshev grid needs at least one mode"));
        }
        if let Some(k) = counts.iter().position(|&c| c == 0) {
            return Err(Error::invalid(format!("mode {k} has zero Chebyshev nodes")));
        }
        Ok(Self {
            counts: counts.to_vec(),
            nodes: counts.iter().map(|&c| nodes(c)).collect(),
        })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.counts.iter().map(|c| c - 1).collect()
    }

    pub fn modes(&self) -> usize {
        self.counts.len()
    }

    pub fn nodes(&self, mode: usize) -> &[f64] {
        &self.nodes[mode]
    }

    pub fn total_points(&self) -> usize {
        self.counts.iter().product()
    }

    /// The grid point with the given multi-index.
    pub fn point(&self, index: &[usize]) -> Vec<f64> {
        index.iter().zip(&self.nodes).map(|(&i, t)| t[i]).collect()
    }

    /// Multi-index of a linear index, first mode fastest.
    pub fn multi_index(&self, mut linear: usize) -> Vec<usize> {
        self.counts
            .iter()
            .map(|&c| {
                let i = linear % c;
                linear /= c;
                i
            })
            .collect()
    }

    pub fn basis(&self, mode: usize) -> LagrangeBasis {
        LagrangeBasis::new(self.counts[mode])
    }
}

/// Lagrange basis ℓ_0..ℓ_{n−1} on n first-kind Chebyshev nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeBasis {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a Lagrange basis needs at least one node");
        Self {
            nodes: nodes(n),
            weights: weights(n),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Values ℓ_i(x) for all i, written into `out`.
    pub fn values_into(&self, x: f64, out: &mut [f64]) -> Result<()> {
        let x = check_domain(x)?;
        assert_eq!(out.len(), self.len());
        if let Some(hit) = self.nodes.iter().position(|&t| t == x) {
            out.fill(0.0);
            out[hit] = 1.0;
            return Ok(());
        }
        // T_n(x) = ½ Π 2(x − t_j)
        let mut tn = 0.5;
        for &t in &self.nodes {
            tn *= 2.0 * (x - t);
        }
        for ((o, &t), &w) in out.iter_mut().zip(&self.nodes).zip(&self.weights) {
            *o = tn * w / (x - t);
        }
        Ok(())
    }

    pub fn values(&self, x: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.values_into(x, &mut out)?;
        Ok(out)
    }

    /// Σ_i |ℓ_i(x)|.
    pub fn lebesgue_function(&self, x: f64) -> Result<f64> {
        Ok(self.values(x)?.iter().map(|v| v.abs()).sum())
    }
}

/// Polynomial interpolant of degree ≤ n − 1 through values at the n
/// first-kind Chebyshev nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateInterpolant {
    basis: LagrangeBasis,
    values: Vec<f64>,
}

impl UnivariateInterpolant {
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("interpolation needs at least one node value"));
        }
        Ok(Self {
            basis: LagrangeBasis::new(values.len()),
            values: values.to_vec(),
        })
    }

    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let l = self.basis.values(x)?;
        Ok(l.iter().zip(&self.values).map(|(a, b)| a * b).sum())
    }
}

/// Upper bound (2/π)·ln(N + 1) + 1 on the Lebesgue constant of degree-N
/// interpolation in first-kind Chebyshev nodes.
pub fn lebesgue_bound(degree: usize) -> f64 {
    2.0 / PI * ((degree + 1) as f64).ln() + 1.0
}

/// Per-mode analyticity data: g extends analytically in mode k to the
/// Bernstein ellipse with parameter ρ_k, where it is bounded by C_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticityData {
    pub rho: Vec<f64>,
    pub bound: Vec<f64>,
    /// Sup-norm of the error in the sampled values.
    pub eval_error: f64,
}

impl AnalyticityData {
    pub fn uniform(modes: usize, rho: f64, bound: f64, eval_error: f64) -> Self {
        Self {
            rho: vec![rho; modes],
            bound: vec![bound; modes],
            eval_error,
        }
    }
}

/// A-priori sup-norm error of tensorized interpolation with the given
/// per-mode degrees:
/// Σ_k 4 Λ_{N_1}⋯Λ_{N_{k−1}} C_k / ((ρ_k − 1) ρ_k^{N_k}) + Λ_{N_1}⋯Λ_{N_m} ‖e‖.
pub fn apriori_error_bound(data: &AnalyticityData, degrees: &[usize]) -> Result<f64> {
    let m = degrees.len();
    if data.rho.len() != m || data.bound.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "analyticity data has {} / {} entries for {m} modes",
            data.rho.len(),
            data.bound.len()
        )));
    }
    if let Some(r) = data.rho.iter().find(|&&r| !(r > 1.0)) {
        return Err(Error::invalid(format!("Bernstein parameter must exceed 1, got {r}")));
    }
    if data.bound.iter().any(|&c| !(c >= 0.0)) || !(data.eval_error >= 0.0) {
        return Err(Error::invalid("analyticity bounds must be nonnegative"));
    }
    let mut total = 0.0;
    let mut lam = 1.0;
    for ((&rho, &c), &n) in data.rho.iter().zip(&data.bound).zip(degrees) {
        if c > 0.0 {
            total += 4.0 * lam * c / ((rho - 1.0) * rho.powf(n as f64));
        }
        lam *= lebesgue_bound(n);
    }
    if data.eval_error > 0.0 {
        total += lam * data.eval_error;
    }
    Ok(total)
}

/// The closed form of [`apriori_error_bound`] when every mode shares N, ρ
/// and C.
pub fn apriori_error_bound_uniform(modes: usize, degree: usize, rho: f64, bound: f64, eval_error: f64) -> f64 {
    let lam = lebesgue_bound(degree);
    let lam_m = lam.powi(modes as i32);
    let geometric = if degree == 0 {
        modes as f64
    } else {
        (lam_m - 1.0) / (lam - 1.0)
    };
    4.0 * geometric * bound / ((rho - 1.0) * rho.powf(degree as f64)) + lam_m * eval_error
}

/// The point (ρe^{iθ} + ρ⁻¹e^{−iθ})/2 of the Bernstein ellipse, as (re, im).
pub fn bernstein_ellipse_point(rho: f64, theta: f64) -> (f64, f64) {
    let a = 0.5 * (rho + 1.0 / rho);
    let b = 0.5 * (rho - 1.0 / rho);
    (a * theta.cos(), b * theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn chebyshev_t(n: usize, x: f64) -> f64 {
        let (mut a, mut b) = (1.0, x);
        if n == 0 {
            return a;
        }
        for _ in 1..n {
            let c = 2.0 * x * b - a;
            a = b;
            b = c;
        }
        b
    }

    #[test]
    fn node_examples() {
        assert_eq!(nodes(1).len(), 1);
        assert!(nodes(1)[0].abs() < 1e-16);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t2 = nodes(2);
        assert!((t2[0] - h).abs() < 1e-15 && (t2[1] + h).abs() < 1e-15);
        let t3 = nodes(3);
        let c = (PI / 6.0).cos();
        assert!((t3[0] - c).abs() < 1e-16 && t3[1].abs() < 1e-16 && (t3[2] + c).abs() < 1e-15);
    }

    #[test]
    fn nodes_are_decreasing_and_interior() {
        for n in 1..60 {
            let t = nodes(n);
            assert!(t.iter().all(|x| x.abs() < 1.0));
            assert!(t.windows(2).all(|w| w[0] > w[1]));
        }
        assert!(ChebyshevGrid::new(&[3, 0]).is_err());
        assert!(ChebyshevGrid::new(&[]).is_err());
    }

    #[test]
    fn grid_indexing() {
        let g = ChebyshevGrid::new(&[2, 3, 4]).unwrap();
        assert_eq!(g.total_points(), 24);
        assert_eq!(g.multi_index(0), vec![0, 0, 0]);
        assert_eq!(g.multi_index(1), vec![1, 0, 0]);
        assert_eq!(g.multi_index(2), vec![0, 1, 0]);
        assert_eq!(g.multi_index(23), vec![1, 2, 3]);
        assert_eq!(g.point(&[1, 1, 0])[1], g.nodes(1)[1]);
        assert_eq!(g.degrees(), vec![1, 2, 3]);
    }

    #[test]
    fn interpolation_examples() {
        let h = UnivariateInterpolant::fit(&[2.5; 7]).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.77, 1.0] {
            assert!((h.eval(x).unwrap() - 2.5).abs() < 1e-14);
        }
        let lin: Vec<f64> = nodes(2).to_vec();
        let h = UnivariateInterpolant::fit(&lin).unwrap();
        assert!((h.eval(0.3).unwrap() - 0.3).abs() < 1e-15);

        let t = nodes(6);
        let vals: Vec<f64> = t.iter().map(|&x| chebyshev_t(5, x)).collect();
        let h = UnivariateInterpolant::fit(&vals).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = rng.random_range(-1.0..=1.0);
            assert!((h.eval(x).unwrap() - chebyshev_t(5, x)).abs() < 1e-12);
        }
        assert!(h.eval(1.5).is_err());
    }

    #[test]
    fn exact_at_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..30 {
            let vals: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let h = UnivariateInterpolant::fit(&vals).unwrap();
            for (t, v) in nodes(n).iter().zip(&vals) {
                assert!((h.eval(*t).unwrap() - v).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn reproduces_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..16 {
            let coeffs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let poly = |x: f64| coeffs.iter().enumerate().map(|(k, c)| c * chebyshev_t(k, x)).sum::<f64>();
            let vals: Vec<f64> = nodes(n).iter().map(|&x| poly(x)).collect();
            let h = UnivariateInterpolant::fit(&vals).unwrap();
            for _ in 0..50 {
                let x = rng.random_range(-1.0..=1.0);
                assert!((h.eval(x).unwrap() - poly(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lebesgue_bound_examples() {
        assert_eq!(lebesgue_bound(0), 1.0);
        assert!((lebesgue_bound(1) - 1.441_271_200_305_303).abs() < 1e-14);
        assert!((lebesgue_bound(9) - 2.465_871_197_758_855).abs() < 1e-14);
    }

    #[test]
    fn measured_lebesgue_constant_is_below_bound() {
        for deg in 0..=20 {
            let basis = LagrangeBasis::new(deg + 1);
            let measured = (0..10_000)
                .map(|j| -1.0 + 2.0 * j as f64 / 9_999.0)
                .map(|x| basis.lebesgue_function(x).unwrap())
                .fold(0.0, f64::max);
            assert!(measured <= lebesgue_bound(deg), "N={deg}: {measured}");
        }
    }

    #[test]
    fn apriori_examples() {
        let zero = AnalyticityData::uniform(3, 2.0, 0.0, 0.0);
        assert_eq!(apriori_error_bound(&zero, &[4, 4, 4]).unwrap(), 0.0);
        let one = AnalyticityData::uniform(1, 2.0, 1.0, 0.0);
        assert!((apriori_error_bound(&one, &[3]).unwrap() - 0.5).abs() < 1e-15);
        for (n, rho, c, e) in [(5, 1.7, 2.0, 1e-3), (0, 3.0, 1.0, 0.1), (12, 2.5, 0.4, 0.0)] {
            let data = AnalyticityData::uniform(2, rho, c, e);
            let full = apriori_error_bound(&data, &[n, n]).unwrap();
            let closed = apriori_error_bound_uniform(2, n, rho, c, e);
            assert!((full - closed).abs() <= 1e-12 * full.max(1.0));
        }
        let bad = AnalyticityData::uniform(1, 1.0, 1.0, 0.0);
        assert!(apriori_error_bound(&bad, &[3]).is_err());
    }

    #[test]
    fn ellipse_point_foci() {
        let (re, im) = bernstein_ellipse_point(2.0, 0.0);
        assert!((re - 1.25).abs() < 1e-15 && im == 0.0);
        let (re, im) = bernstein_ellipse_point(2.0, PI / 2.0);
        assert!(re.abs() < 1e-15 && (im - 0.75).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn interpolation_is_linear(seed in any::<u64>(), n in 1usize..25, x in -1.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let w: Vec<f64> = u.iter().zip(&v).map(|(p, q)| a * p + b * q).collect();
            let hu = UnivariateInterpolant::fit(&u).unwrap().eval(x).unwrap();
            let hv = UnivariateInterpolant::fit(&v).unwrap().eval(x).unwrap();
            let hw = UnivariateInterpolant::fit(&w).unwrap().eval(x).unwrap();
            prop_assert!((hw - (a * hu + b * hv)).abs() <= 1e-12);
        }
    }
}
