use manifold_approx::approximator::{build, Domain, ManifoldApproximant, MapVariant, SamplingPlan};
use manifold_approx::bounds::{self, BoundForm, BoundInputs};
use manifold_approx::experiments::{sphere_manifold, stereographic_square};
use manifold_approx::tucker::Truncation;
use manifold_approx::{Error, Result};

const MAX_NODES: usize = 40;
const MAX_SAMPLES: usize = 4096;

fn check_count(name: &str, value: usize, lo: usize, hi: usize) -> Result<()> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must lie in {lo}..={hi}, got {value}")))
    }
}

fn fit(nodes: usize) -> Result<ManifoldApproximant> {
    check_count("nodes", nodes, 1, MAX_NODES)?;
    let plan = SamplingPlan::new(Domain::cube(2)?, vec![nodes, nodes]).with_karcher_samples(50);
    build(&stereographic_square, &sphere_manifold(), &plan, &Truncation::Full, MapVariant::ExpLog).map(|(a, _)| a)
}

pub fn sphere_errors(nodes: usize, side: usize) -> Result<Vec<f64>> {
    check_count("side", side, 2, 256)?;
    let approx = fit(nodes)?;
    let m = approx.manifold();
    let t = |i: usize| -1.0 + 2.0 * i as f64 / (side - 1) as f64;
    let mut out = vec![0.0];
    for i in 0..side {
        for j in 0..side {
            let x = [t(i), t(j)];
            out.push(m.distance(&stereographic_square(&x)?, &approx.evaluate(&x)?)?);
        }
    }
    out[0] = out[1..].iter().copied().fold(0.0, f64::max);
    Ok(out)
}

pub fn sphere_slice(nodes: usize, y: f64, samples: usize) -> Result<Vec<f64>> {
    check_count("samples", samples, 2, MAX_SAMPLES)?;
    let approx = fit(nodes)?;
    let mut out = Vec::with_capacity(7 * samples);
    for i in 0..samples {
        let x = [-1.0 + 2.0 * i as f64 / (samples - 1) as f64, y];
        let q = stereographic_square(&x)?;
        let qh = approx.evaluate(&x)?;
        out.push(x[0]);
        out.extend(q.as_vector()?.iter());
        out.extend(qh.as_vector()?.iter());
    }
    Ok(out)
}

pub fn bound_curve(sigma: f64, curvature: f64, eps_min: f64, eps_max: f64, samples: usize) -> Result<Vec<f64>> {
    check_count("samples", samples, 2, MAX_SAMPLES)?;
    if !(eps_min > 0.0 && eps_max > eps_min) {
        return Err(Error::InvalidArgument("need 0 < eps_min < eps_max".into()));
    }
    let (lo, hi) = (eps_min.ln(), eps_max.ln());
    let mut out = Vec::with_capacity(3 * samples);
    for i in 0..samples {
        let eps = (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp();
        let inputs = BoundInputs::new(eps, sigma, curvature);
        out.push(eps);
        out.push(bounds::forward_error_bound(&inputs, BoundForm::Exact)?);
        out.push(bounds::forward_error_bound(&inputs, BoundForm::Simplified)?);
    }
    Ok(out)
}

pub fn triangle_side(a: f64, b: f64, c: f64, curvature: f64) -> Result<f64> {
    bounds::model_triangle_side(a, b, c, curvature)
}

pub fn condition_bounds(sigma: f64, curvature: f64) -> Result<Vec<f64>> {
    let c = bounds::condition_number_bounds(sigma, curvature)?;
    Ok(vec![c.lower, c.upper, c.model_lower])
}
