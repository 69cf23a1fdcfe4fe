use std::process::Command;

fn approx(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_approx"))
        .args(args)
        .env("APPROX_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bound_prints_the_certificate() {
    let o = approx(&["bound", "--eps", "0.1", "--sigma", "1", "--H", "-1"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.2174525963981345).abs() < 1e-15);

    let o = approx(&["bound", "--eps", "0.1", "--sigma", "1", "--H", "0"]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 0.1);

    let o = approx(&["bound", "--eps", "0.1", "--sigma", "1", "--H", "-1", "--simplified"]);
    let s: f64 = stdout(&o).trim().parse().unwrap();
    assert!(s >= 0.2174525963981345);

    let o = approx(&["bound", "--eps", "0.1", "--sigma", "1", "--H", "0", "--zeta", "0.01", "--eta", "0.02", "--lambda", "3"]);
    assert!(o.status.success());
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - 0.17).abs() < 1e-15);
}

#[test]
fn triangle_prints_the_side() {
    let o = approx(&["triangle", "--A", "1", "--B", "1", "--c", "1.5707963267948966", "--H", "0"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 2f64.sqrt()).abs() < 1e-14);
}

#[test]
fn configuration_errors_exit_with_2() {
    let o = approx(&["bound", "--eps", "-1", "--sigma", "1", "--H", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = approx(&["run", "grassmann", "--n", "6", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = approx(&["run", "torus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = approx(&["run", "sphere", "--nmin", "4", "--nmax", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_writes_reproducible_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "run", "grassmann", "--n", "30", "--k", "3", "--nmax", "4", "--validation", "50", "--seed", "9", "--out", out,
        "--no-timing",
    ];
    let first = approx(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let csv = std::fs::read_to_string(dir.path().join("grassmann.csv")).unwrap();
    assert!(csv.starts_with("N,epsilon,sigma,H,measured_error,bound,wall_time_s\n"));
    assert_eq!(csv.lines().count(), 4);
    let again = approx(&args);
    assert!(again.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("grassmann.csv")).unwrap(), csv);
    let manifest = std::fs::read_to_string(dir.path().join("grassmann.manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 9"));
}

#[test]
fn retraction_variant_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = approx(&[
        "run", "grassmann", "--n", "20", "--k", "2", "--nmax", "3", "--validation", "20", "--variant", "polar", "--precond",
        "jacobi", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("Polar"));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_approx"))
        .args(["bound", "--eps", "0.1", "--sigma", "1", "--H", "0"])
        .env("APPROX_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
