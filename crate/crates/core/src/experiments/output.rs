use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::{GridSample, RunRecord, RunRow, ScenarioOutput};
use crate::approximator::MapVariant;
use crate::error::{Error, Result};
use crate::manifolds::RetractionMethod;

pub const CSV_HEADER: &str = "N,epsilon,sigma,H,measured_error,bound,wall_time_s";

/// 17 significant digits, enough to round-trip any f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn record_csv(record: &RunRecord) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in &record.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.degree,
            num(r.epsilon),
            num(r.sigma),
            num(r.curvature),
            num(r.measured_error),
            num(r.bound),
            num(r.wall_time_s)
        );
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<RunRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Format(format!("unexpected CSV header {other:?}"))),
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::Format(format!("expected 7 fields in {line:?}")));
            }
            let f = |i: usize| {
                fields[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("field {i} of {line:?}: {e}")))
            };
            Ok(RunRow {
                degree: fields[0]
                    .parse()
                    .map_err(|e| Error::Format(format!("degree in {line:?}: {e}")))?,
                epsilon: f(1)?,
                sigma: f(2)?,
                curvature: f(3)?,
                measured_error: f(4)?,
                bound: f(5)?,
                wall_time_s: f(6)?,
            })
        })
        .collect()
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv(record: &RunRecord, path: &Path) -> Result<()> {
    write(path, &record_csv(record))
}

pub fn grid_csv(grid: &[GridSample]) -> String {
    let mut s = String::from("N,x,y,f1,f2,f3,fhat1,fhat2,fhat3,distance\n");
    for g in grid {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            g.degree,
            num(g.x[0]),
            num(g.x[1]),
            num(g.exact[0]),
            num(g.exact[1]),
            num(g.exact[2]),
            num(g.approx[0]),
            num(g.approx[1]),
            num(g.approx[2]),
            num(g.distance)
        );
    }
    s
}

fn variant_slug(v: MapVariant) -> &'static str {
    match v {
        MapVariant::ExpLog => "explog",
        MapVariant::Retraction(RetractionMethod::Qr) => "qr",
        MapVariant::Retraction(RetractionMethod::Polar) => "polar",
        MapVariant::Retraction(RetractionMethod::Exponential) => "exp",
    }
}

/// Measured errors of several variants side by side; the records must
/// share their degree range.
pub fn comparison_csv(records: &[RunRecord]) -> Result<String> {
    let mut s = String::from("N");
    for r in records {
        let _ = write!(s, ",{}_error", variant_slug(r.variant));
    }
    s.push('\n');
    let len = records.first().map_or(0, |r| r.rows.len());
    if records.iter().any(|r| r.rows.len() != len) {
        return Err(Error::invalid("records cover different degree ranges"));
    }
    for i in 0..len {
        let _ = write!(s, "{}", records[0].rows[i].degree);
        for r in records {
            if r.rows[i].degree != records[0].rows[i].degree {
                return Err(Error::invalid("records cover different degree ranges"));
            }
            let _ = write!(s, ",{}", num(r.rows[i].measured_error));
        }
        s.push('\n');
    }
    Ok(s)
}

/// Machine-readable description of a run: configuration, seed, library
/// version and per-variant timing.
pub fn run_manifest(output: &ScenarioOutput) -> Result<String> {
    let record = output.primary();
    let variants: Vec<_> = output
        .records
        .iter()
        .map(|r| {
            json!({
                "variant": variant_slug(r.variant),
                "rows": r.rows.len(),
                "skipped_validation_points": r.skipped,
                "mean_eval_time_s": r.mean_eval_time_s,
            })
        })
        .collect();
    let value = json!({
        "format": "manifold-approx/run",
        "library_version": env!("CARGO_PKG_VERSION"),
        "scenario": record.config.scenario.slug(),
        "seed": record.config.seed,
        "config": record.config,
        "nodes_per_mode": "N + 1",
        "generator_normalization": "frobenius",
        "variants": variants,
    });
    serde_json::to_string_pretty(&value).map_err(|e| Error::Format(e.to_string()))
}

/// Writes every artifact of `output` into `dir` and returns the paths.
pub fn write_outputs(output: &ScenarioOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let slug = output.primary().config.scenario.slug();
    let mut written = Vec::new();
    let mut put = |name: String, contents: &str| -> Result<()> {
        let path = dir.join(name);
        write(&path, contents)?;
        written.push(path);
        Ok(())
    };
    if output.records.len() == 1 {
        put(format!("{slug}.csv"), &record_csv(output.primary()))?;
    } else {
        for r in &output.records {
            put(format!("{slug}_{}.csv", variant_slug(r.variant)), &record_csv(r))?;
        }
        put(format!("{slug}_comparison.csv"), &comparison_csv(&output.records)?)?;
    }
    if !output.grid.is_empty() {
        put(format!("{slug}_grid.csv"), &grid_csv(&output.grid))?;
    }
    let mut manifest = run_manifest(output)?;
    manifest.push('\n');
    put(format!("{slug}.manifest.json"), &manifest)?;
    Ok(written)
}
