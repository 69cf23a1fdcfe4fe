use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use manifold_approx::approximator::MapVariant;
use manifold_approx::bounds::{self, BoundForm, BoundInputs};
use manifold_approx::experiments::{self, Preconditioner, Scenario, ScenarioConfig};
use manifold_approx::{Error, RetractionMethod};

/// Tensorized Chebyshev approximation of manifold-valued maps.
#[derive(Parser)]
#[command(name = "approx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSV and manifest files.
    Run(RunArgs),
    /// Evaluate the forward error certificate.
    Bound(BoundArgs),
    /// Solve for the third side of a model triangle.
    Triangle(TriangleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Sphere,
    Grassmann,
    Segre,
    Retractions,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Explog,
    Qr,
    Polar,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecondArg {
    None,
    Jacobi,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(value_enum)]
    scenario: ScenarioArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    nmin: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    /// Tucker ranks: one value, one per sample mode, or one per mode.
    #[arg(long, num_args = 1..)]
    rank: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "explog")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "none")]
    precond: PrecondArg,
    /// Number of validation points.
    #[arg(long)]
    validation: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Write zero wall times so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(clap::Args)]
struct BoundArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long = "H", allow_hyphen_values = true)]
    h: f64,
    #[arg(long, requires_all = ["eta", "lambda"])]
    zeta: Option<f64>,
    #[arg(long, requires_all = ["zeta", "lambda"])]
    eta: Option<f64>,
    #[arg(long, requires_all = ["zeta", "eta"])]
    lambda: Option<f64>,
    #[arg(long, conflicts_with = "zeta")]
    simplified: bool,
}

#[derive(clap::Args)]
struct TriangleArgs {
    #[arg(long = "A")]
    a: f64,
    #[arg(long = "B")]
    b: f64,
    #[arg(long)]
    c: f64,
    #[arg(long = "H", allow_hyphen_values = true)]
    h: f64,
}

fn configure(args: &RunArgs) -> ScenarioConfig {
    let scenario = match args.scenario {
        ScenarioArg::Sphere => Scenario::SphereStereographic,
        ScenarioArg::Grassmann => Scenario::GrassmannKrylov,
        ScenarioArg::Segre => Scenario::SegreRank1,
        ScenarioArg::Retractions => Scenario::RetractionComparison,
    };
    let mut c = ScenarioConfig::new(scenario);
    c.n = args.n.unwrap_or(c.n);
    c.k = args.k.unwrap_or(c.k);
    c.degree_min = args.nmin.unwrap_or(c.degree_min);
    c.degree_max = args.nmax.unwrap_or(c.degree_max);
    c.ranks = args.rank.clone();
    c.seed = args.seed.unwrap_or(c.seed);
    c.validation_count = args.validation.unwrap_or(c.validation_count);
    c.variant = match args.variant {
        VariantArg::Explog => MapVariant::ExpLog,
        VariantArg::Qr => MapVariant::Retraction(RetractionMethod::Qr),
        VariantArg::Polar => MapVariant::Retraction(RetractionMethod::Polar),
    };
    c.preconditioner = match args.precond {
        PrecondArg::None => Preconditioner::None,
        PrecondArg::Jacobi => Preconditioner::Jacobi,
    };
    c.timing = !args.no_timing;
    c
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let config = configure(args);
    let output = experiments::run(&config)?;
    for record in &output.records {
        println!("# {} ({:?})", config.scenario, record.variant);
        print!("{}", experiments::record_csv(record));
        if let Some(t) = record.mean_eval_time_s {
            println!("# mean evaluation time {t:.3e} s");
        }
    }
    for path in experiments::write_outputs(&output, &args.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn bound(args: &BoundArgs) -> Result<(), Error> {
    let mut inputs = BoundInputs::new(args.eps, args.sigma, args.h);
    let value = match (args.zeta, args.eta, args.lambda) {
        (Some(z), Some(e), Some(l)) => {
            inputs = inputs.with_retraction(z, e, l);
            bounds::retraction_error_bound(&inputs)?
        }
        _ => {
            let form = if args.simplified { BoundForm::Simplified } else { BoundForm::Exact };
            bounds::forward_error_bound(&inputs, form)?
        }
    };
    println!("{value:.16e}");
    Ok(())
}

fn triangle(args: &TriangleArgs) -> Result<(), Error> {
    let side = bounds::model_triangle_side(args.a, args.b, args.c, args.h)?;
    println!("{side:.16e}");
    Ok(())
}

fn init_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("APPROX_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("APPROX_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Run(a) => run(a),
        Command::Bound(a) => bound(a),
        Command::Triangle(a) => triangle(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
