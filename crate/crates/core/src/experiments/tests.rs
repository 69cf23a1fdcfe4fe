use nalgebra::{dvector, DVector};

use super::*;
use crate::linalg;

fn small(scenario: Scenario) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(scenario);
    c.validation_count = 100;
    c.karcher_samples = 20;
    c.timing = false;
    match scenario {
        Scenario::GrassmannKrylov | Scenario::RetractionComparison => {
            c.n = 40;
            c.k = 3;
            c.degree_max = 6;
        }
        Scenario::SegreRank1 => {
            c.n = 8;
            c.degree_max = 6;
        }
        Scenario::SphereStereographic => {}
    }
    c
}

fn assert_sound(record: &RunRecord) {
    for r in &record.rows {
        if r.measured_error >= 1e-12 {
            assert!(r.measured_error <= r.bound + 1e-9, "N={}: {} > {}", r.degree, r.measured_error, r.bound);
        }
    }
    assert!(record.rows.windows(2).all(|w| w[0].degree < w[1].degree));
}

#[test]
fn stereographic_map_examples() {
    let q = stereographic_square(&[0.0, 0.0]).unwrap();
    assert_eq!(q.as_vector().unwrap(), &dvector![0.0, 0.0, -1.0]);
    // (1, 0) ↦ (u, v) = (1, 0) ↦ (1, 0, 0)
    let q = stereographic_square(&[1.0, 0.0]).unwrap();
    assert!((q.as_vector().unwrap() - dvector![1.0, 0.0, 0.0]).norm() < 1e-15);
    let m = sphere_manifold();
    for x in [[0.3, -0.8], [1.0, 1.0], [-1.0, 0.5]] {
        m.check_point(&stereographic_square(&x).unwrap()).unwrap();
    }
}

#[test]
fn sphere_scenario_improves_with_samples() {
    let out = scenario_sphere(&small(Scenario::SphereStereographic)).unwrap();
    let rec = out.primary();
    assert_eq!(rec.rows.iter().map(|r| r.degree).collect::<Vec<_>>(), vec![2, 3, 4]);
    assert_sound(rec);
    assert!(rec.rows.iter().all(|r| r.curvature == 0.0 && r.bound == r.epsilon));
    assert_eq!(out.grid.len(), 3 * GRID_SIDE * GRID_SIDE);
    let grid_max = |n: usize| {
        out.grid
            .iter()
            .filter(|g| g.degree == n)
            .map(|g| g.distance)
            .fold(0.0, f64::max)
    };
    assert!(grid_max(2) > grid_max(3) && grid_max(3) > grid_max(4));
}

#[test]
fn krylov_operator_matches_the_difference_scheme() {
    let p = KrylovProblem::new(6, 2, Preconditioner::None).unwrap();
    let d = 1.0 / 7.0;
    let a = p.operator(1.5, 0.25).to_dense(6);
    assert!((a[(2, 2)] - (-2.0 / (d * d) + 0.25)).abs() < 1e-12);
    assert!((a[(2, 1)] - (1.0 / (d * d) - 1.5 / (2.0 * d))).abs() < 1e-12);
    assert!((a[(2, 3)] - (1.0 / (d * d) + 1.5 / (2.0 * d))).abs() < 1e-12);
    assert_eq!(a[(0, 2)], 0.0);
    assert!((p.rhs()[0] - d * (1.0 - d)).abs() < 1e-16);
    let v = DVector::from_fn(6, |i, _| (i as f64).sin());
    assert!((p.operator(1.5, 0.25).apply(&v) - &a * &v).norm() < 1e-9);
    assert!(KrylovProblem::new(5, 3, Preconditioner::None).is_err());
}

#[test]
fn krylov_basis_spans_the_krylov_space() {
    let p = KrylovProblem::new(30, 4, Preconditioner::None).unwrap();
    let x = [1.3, 1.7];
    let q = p.basis(&x).unwrap();
    assert!(linalg::orthonormality_residual(&q) < 1e-14);
    // each power A^j v lies in span(Q), checked on normalized powers
    let a = p.operator(x[0], x[1]);
    let mut w = p.rhs().clone();
    for _ in 0..4 {
        let wn = &w / w.norm();
        assert!((&wn - &q * (q.transpose() * &wn)).norm() < 1e-10);
        w = a.apply(&wn);
    }
}

#[test]
fn jacobi_scaling_leaves_the_subspace_unchanged() {
    let none = KrylovProblem::new(30, 3, Preconditioner::None).unwrap();
    let jac = KrylovProblem::new(30, 3, Preconditioner::Jacobi).unwrap();
    let m = none.manifold();
    let x = [1.2, 1.9];
    let d = m.distance(&none.point(&x).unwrap(), &jac.point(&x).unwrap()).unwrap();
    assert!(d < 1e-10);
}

#[test]
fn one_dimensional_krylov_space_is_exact() {
    let mut c = small(Scenario::GrassmannKrylov);
    c.k = 1;
    c.degree_max = 4;
    let out = scenario_grassmann_krylov(&c).unwrap();
    for r in &out.primary().rows {
        assert!(r.measured_error < 1e-14 && r.epsilon < 1e-14, "{r:?}");
    }
}

#[test]
fn grassmann_scenario_is_sound_and_decays() {
    let out = scenario_grassmann_krylov(&small(Scenario::GrassmannKrylov)).unwrap();
    let rows = &out.primary().rows;
    assert_sound(out.primary());
    assert!(rows.last().unwrap().measured_error < 1e-3 * rows[0].measured_error);
}

#[test]
fn unit_skew_generators() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
    let w = random_unit_skew(&mut rng, 7);
    assert!((&w + w.transpose()).norm() == 0.0);
    assert!((w.norm() - 1.0).abs() < 1e-15);
    let v = DVector::from_fn(7, |i, _| 1.0 / (i + 1) as f64);
    for t in [-1.0, 0.3, 1.0] {
        let want = linalg::expm(&(&w * t)).unwrap() * &v;
        assert!((exp_action(&w, t, &v) - want).norm() < 1e-14);
    }
}

#[test]
fn segre_point_on_the_radial_slice() {
    let p = SegreProblem::new(6, 3).unwrap();
    let e1 = DVector::from_fn(6, |i, _| if i == 0 { 1.0 } else { 0.0 });
    for x1 in [-1.0, 0.0, 0.7] {
        let q = p.point(&[x1, 0.0, 0.0]).unwrap();
        let s = q.as_segre().unwrap();
        assert_eq!(s.scale, f64::exp(x1));
        assert_eq!(s.left, e1);
        assert_eq!(s.right, e1);
    }
    let q = p.point(&[0.2, -0.9, 0.4]).unwrap();
    p.manifold().check_point(&q).unwrap();
    let (w1, w2) = p.generators();
    let a = q.as_segre().unwrap().to_matrix();
    let want = linalg::expm(&(w1 * -0.9)).unwrap().column(0) * linalg::expm(&(w2 * 0.4)).unwrap().column(0).transpose()
        * 0.2f64.exp();
    assert!((a - want).norm() < 1e-14);
    assert_eq!(p.manifold().curvature_lower_bound(1.0, &q).unwrap(), -std::f64::consts::E.powi(2));
}

#[test]
fn segre_scenario_is_sound() {
    let out = scenario_segre(&small(Scenario::SegreRank1)).unwrap();
    assert_sound(out.primary());
    for r in &out.primary().rows {
        assert!(r.bound >= r.epsilon);
    }
}

#[test]
fn retraction_comparison_has_three_variants() {
    let mut c = small(Scenario::RetractionComparison);
    c.degree_max = 4;
    let out = scenario_retractions(&c).unwrap();
    let variants: Vec<_> = out.records.iter().map(|r| r.variant).collect();
    assert_eq!(
        variants,
        vec![
            MapVariant::ExpLog,
            MapVariant::Retraction(RetractionMethod::Qr),
            MapVariant::Retraction(RetractionMethod::Polar)
        ]
    );
    for r in &out.records {
        assert_sound(r);
        assert!(r.mean_eval_time_s.is_none());
    }
    let csv = comparison_csv(&out.records).unwrap();
    assert!(csv.starts_with("N,explog_error,qr_error,polar_error\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn identical_seeds_give_identical_csv() {
    let c = small(Scenario::GrassmannKrylov);
    let a = run(&c).unwrap();
    let b = run(&c).unwrap();
    assert_eq!(record_csv(a.primary()), record_csv(b.primary()));
    assert_eq!(run_manifest(&a).unwrap(), run_manifest(&b).unwrap());
}

#[test]
fn csv_round_trips() {
    let mut rec = RunRecord {
        config: ScenarioConfig::new(Scenario::SegreRank1),
        variant: MapVariant::ExpLog,
        rows: Vec::new(),
        skipped: 0,
        mean_eval_time_s: None,
    };
    assert_eq!(record_csv(&rec), format!("{CSV_HEADER}\n"));
    assert!(parse_csv(&record_csv(&rec)).unwrap().is_empty());
    let row = RunRow {
        degree: 7,
        epsilon: 0.1 + 0.2,
        sigma: std::f64::consts::PI,
        curvature: -std::f64::consts::E.powi(2),
        measured_error: 1.234_567_890_123_456_7e-13,
        bound: f64::MIN_POSITIVE,
        wall_time_s: 5e-324,
    };
    rec.rows.push(row);
    let text = record_csv(&rec);
    assert!(!text.contains('\r'));
    assert_eq!(parse_csv(&text).unwrap(), vec![row]);
    assert!(parse_csv("N,eps\n1,2\n").is_err());
    assert!(parse_csv(&format!("{CSV_HEADER}\n1,2,3\n")).is_err());
}

#[test]
fn outputs_are_written_with_path_context() {
    let dir = tempfile::tempdir().unwrap();
    let out = scenario_sphere(&small(Scenario::SphereStereographic)).unwrap();
    let paths = write_outputs(&out, dir.path()).unwrap();
    let names: Vec<_> = paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_owned()).collect();
    assert_eq!(names, vec!["sphere.csv", "sphere_grid.csv", "sphere.manifest.json"]);
    let csv = std::fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(parse_csv(&csv).unwrap(), out.primary().rows);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&paths[2]).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["library_version"], env!("CARGO_PKG_VERSION"));

    let blocked = dir.path().join("sphere.csv").join("nested");
    match emit_csv(out.primary(), &blocked) {
        Err(Error::Io { path, .. }) => assert_eq!(path, blocked),
        other => panic!("expected an i/o error, got {other:?}"),
    }
}

#[test]
fn configuration_errors() {
    let mut c = ScenarioConfig::new(Scenario::GrassmannKrylov);
    c.degree_min = 5;
    c.degree_max = 4;
    assert!(run(&c).unwrap_err().is_config_error());
    let mut c = ScenarioConfig::new(Scenario::GrassmannKrylov);
    c.validation_count = 0;
    assert!(run(&c).unwrap_err().is_config_error());
    let mut c = ScenarioConfig::new(Scenario::GrassmannKrylov);
    c.n = 9;
    assert!(run(&c).unwrap_err().is_config_error());
    let mut c = small(Scenario::GrassmannKrylov);
    c.ranks = Some(vec![2, 2, 2, 2]);
    assert!(run(&c).unwrap_err().is_config_error());
    assert!("torus".parse::<Scenario>().is_err());
    assert_eq!("segre".parse::<Scenario>().unwrap(), Scenario::SegreRank1);
}

#[test]
fn ranks_are_broadcast_and_clamped() {
    let mut c = small(Scenario::GrassmannKrylov);
    assert_eq!(truncation_for(&c, &[3, 3], 10).unwrap(), Truncation::Full);
    c.ranks = Some(vec![5]);
    assert_eq!(truncation_for(&c, &[3, 7], 10).unwrap(), Truncation::Ranks(vec![3, 5, 10]));
    c.ranks = Some(vec![2, 2, 4]);
    assert_eq!(truncation_for(&c, &[3, 7], 10).unwrap(), Truncation::Ranks(vec![2, 2, 4]));
    c.degree_max = 3;
    c.ranks = Some(vec![2]);
    let out = run(&c).unwrap();
    assert_sound(out.primary());
}

