use nalgebra::dvector;

use crate::approximator::{Domain, ManifoldApproximant};
use crate::error::Result;
use crate::manifolds::{ManifoldHandle, ManifoldPoint};

/// Inverse stereographic projection (from the north pole) of
/// (u, v) = (x² − y², 2xy).
pub fn stereographic_square(x: &[f64]) -> Result<ManifoldPoint> {
    let u = x[0] * x[0] - x[1] * x[1];
    let v = 2.0 * x[0] * x[1];
    let r2 = u * u + v * v;
    Ok(ManifoldPoint::Vector(dvector![
        2.0 * u / (r2 + 1.0),
        2.0 * v / (r2 + 1.0),
        (r2 - 1.0) / (r2 + 1.0)
    ]))
}

pub fn sphere_domain() -> Domain {
    Domain::cube(2).expect("unit square")
}

pub fn sphere_manifold() -> ManifoldHandle {
    ManifoldHandle::sphere(3).expect("S²")
}

/// One point of the plotting grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub degree: usize,
    pub x: [f64; 2],
    pub exact: [f64; 3],
    pub approx: [f64; 3],
    pub distance: f64,
}

pub const GRID_SIDE: usize = 10;

/// f and f̂ on an equispaced GRID_SIDE × GRID_SIDE grid of the square.
pub fn evaluation_grid(approx: &ManifoldApproximant, degree: usize) -> Result<Vec<GridSample>> {
    let m = approx.manifold();
    let mut out = Vec::with_capacity(GRID_SIDE * GRID_SIDE);
    let t = |i: usize| -1.0 + 2.0 * i as f64 / (GRID_SIDE - 1) as f64;
    for i in 0..GRID_SIDE {
        for j in 0..GRID_SIDE {
            let x = [t(i), t(j)];
            let q = stereographic_square(&x)?;
            let qh = approx.evaluate(&x)?;
            let (a, b) = (q.as_vector()?, qh.as_vector()?);
            out.push(GridSample {
                degree,
                x,
                exact: [a[0], a[1], a[2]],
                approx: [b[0], b[1], b[2]],
                distance: m.distance(&q, &qh)?,
            });
        }
    }
    Ok(out)
}
