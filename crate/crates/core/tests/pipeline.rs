use manifold_approx::approximator::{build, validate, Domain, ManifoldApproximant, MapVariant, SamplingPlan};
use manifold_approx::tucker::Truncation;
use manifold_approx::{ManifoldHandle, ManifoldPoint};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn manifold(which: usize) -> ManifoldHandle {
    match which {
        0 => ManifoldHandle::hyperbolic(2),
        1 => ManifoldHandle::sphere(3),
        2 => ManifoldHandle::spd(2),
        _ => ManifoldHandle::rotations(3),
    }
    .unwrap()
}

/// f(x) = exp_q(x0 u + x1 v + x0 x1 w) for seeded q, u, v, w.
fn geodesic_patch(m: &ManifoldHandle, seed: u64, size: f64) -> impl Fn(&[f64]) -> manifold_approx::Result<ManifoldPoint> + Sync {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = m.random_point(&mut rng);
    let u = m.random_tangent(&mut rng, &q, size).unwrap();
    let v = m.random_tangent(&mut rng, &q, size).unwrap();
    let w = m.random_tangent(&mut rng, &q, 0.5 * size).unwrap();
    let m = *m;
    move |x: &[f64]| {
        let t = u.combine(x[0], &v, x[1])?.combine(1.0, &w, x[0] * x[1])?;
        m.exp(&q, &t)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certificate_dominates_measured_error(which in 0usize..4, seed in any::<u64>(), nodes in 2usize..7) {
        let m = manifold(which);
        let f = geodesic_patch(&m, seed, 0.3);
        let plan = SamplingPlan::new(Domain::cube(2).unwrap(), vec![nodes, nodes]).with_seed(seed).with_karcher_samples(20);
        let (approx, _) = build(&f, &m, &plan, &Truncation::Full, MapVariant::ExpLog).unwrap();
        let r = validate(&f, &approx, 60, seed ^ 1).unwrap();
        prop_assert_eq!(r.skipped, 0);
        prop_assert!(r.manifold_error <= r.bound * (1.0 + 1e-9) + 1e-13, "{} > {}", r.manifold_error, r.bound);
        if r.curvature >= 0.0 {
            prop_assert!(r.manifold_error <= r.epsilon * (1.0 + 1e-9) + 1e-13);
        }
    }

    #[test]
    fn tensor_polynomials_are_reproduced(
        coeffs in prop::collection::vec(-2.0f64..2.0, 12),
        lo in prop::collection::vec(-3.0f64..0.0, 2),
        width in prop::collection::vec(0.5f64..4.0, 2),
    ) {
        // degree 3 in x and 2 in y, so 4 x 3 nodes suffice
        let f = move |x: &[f64]| {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..3 {
                    s += coeffs[3 * i + j] * x[0].powi(i as i32) * x[1].powi(j as i32);
                }
            }
            Ok(ManifoldPoint::Vector(DVector::from_vec(vec![s, -s])))
        };
        let domain = Domain::new(lo.clone(), vec![lo[0] + width[0], lo[1] + width[1]]).unwrap();
        let plan = SamplingPlan::new(domain, vec![4, 3]);
        let (approx, _) = build(&f, &ManifoldHandle::euclidean(2).unwrap(), &plan, &Truncation::Full, MapVariant::ExpLog).unwrap();
        let r = validate(&f, &approx, 40, 5).unwrap();
        prop_assert!(r.manifold_error < 1e-9, "{}", r.manifold_error);
    }

    #[test]
    fn serialization_preserves_evaluation(which in 0usize..4, seed in any::<u64>()) {
        let m = manifold(which);
        let f = geodesic_patch(&m, seed, 0.2);
        let plan = SamplingPlan::new(Domain::cube(2).unwrap(), vec![3, 4]).with_seed(seed).with_karcher_samples(10);
        let (approx, _) = build(&f, &m, &plan, &Truncation::Full, MapVariant::ExpLog).unwrap();
        let back = ManifoldApproximant::from_json(&approx.to_json().unwrap()).unwrap();
        for x in [[0.1, -0.7], [0.9, 0.9], [-0.33, 0.5]] {
            prop_assert_eq!(approx.evaluate(&x).unwrap(), back.evaluate(&x).unwrap());
        }
    }
}
