use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chebcross::harness::{
    run_convergence, run_single, validate_suite, write_outcome, ExperimentConfig, RateReport, ValidationReport,
};
use chebcross::{build_cross, choose_n, Error, LpExponent, MetricSpec, NoiseMode, ProblemSpec, WienerSpec};
use clap::{Args, Parser, Subcommand};

/// Stable differentiation of noisy bivariate Chebyshev data.
#[derive(Parser)]
#[command(name = "chebcross", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate a coefficient file with the truncation method.
    Differentiate(DifferentiateArgs),
    /// Run a δ-sweep convergence experiment.
    Experiment(ExperimentArgs),
    /// Print a hyperbolic cross as `k,j` lines, or its size.
    Cross(CrossArgs),
    /// Run the invariant validation suite.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct DifferentiateArgs {
    /// Coefficient file (`.csv` or `.json`).
    #[arg(long)]
    input: PathBuf,
    /// Derivative order in the first variable.
    #[arg(long)]
    r: usize,
    /// Truncation level; required unless `--auto-n` is given.
    #[arg(long, required_unless_present = "auto_n")]
    n: Option<usize>,
    #[arg(long)]
    gamma: f64,
    /// Also write point values on an M × M Lobatto grid to `<output stem>.values.csv`.
    #[arg(long, value_name = "M")]
    eval_grid: Option<usize>,
    #[arg(long)]
    output: PathBuf,
    /// Choose n from the noise level and smoothness (L2 rule).
    #[arg(long, requires_all = ["delta", "s", "mu1", "mu2", "p"], conflicts_with = "n")]
    auto_n: bool,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    mu2: Option<f64>,
    /// Noise exponent: a number ≥ 1 or `inf`.
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    level_constant: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_path`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long)]
    trials_per_delta: Option<usize>,
    /// Comma-separated metrics: `l2w`, `sup`, `lqw:<q>`.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    #[arg(long)]
    noise_mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    level_constant: Option<f64>,
}

#[derive(Args)]
struct CrossArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    r: usize,
    /// Print only the cardinality.
    #[arg(long)]
    count: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            // Well-formed JSON with bad field values is a configuration error.
            Error::Json(inner) if inner.is_data() => 1,
            e if e.is_io() => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Differentiate(args) => differentiate(args),
        Command::Experiment(args) => experiment(args),
        Command::Cross(args) => cross(args),
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_p(text: &str) -> Result<LpExponent, Failure> {
    let p = serde_json::from_str::<LpExponent>(&format!("{text:?}"))
        .or_else(|_| serde_json::from_str::<LpExponent>(text))
        .map_err(|_| invalid(format!("invalid noise exponent p = `{text}`")))?;
    Ok(p)
}

fn differentiate(args: DifferentiateArgs) -> Result<(), Failure> {
    let n = match args.n {
        Some(n) => n,
        None => {
            let (Some(delta), Some(s), Some(mu1), Some(mu2), Some(p)) = (args.delta, args.s, args.mu1, args.mu2, args.p)
            else {
                return Err(invalid("--auto-n needs --delta, --s, --mu1, --mu2 and --p"));
            };
            let spec = ProblemSpec {
                r: args.r,
                wiener: WienerSpec::new(s, mu1, mu2)?,
                noise_p: parse_p(&p)?,
                metric: MetricSpec::l2(),
                level_constant: args.level_constant,
            };
            let n = choose_n(delta, &spec)?;
            eprintln!("n = {n}");
            n
        }
    };
    let grid = run_single(&args.input, n, args.gamma, args.r, &args.output, args.eval_grid)?;
    eprintln!("wrote {} nonzero coefficients to {}", grid.nnz(), args.output.display());
    Ok(())
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(ExperimentConfig::from_json(&text)?)
}

fn experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let mut config = load_config(&args.config)?;
    if let Some(gamma) = args.gamma {
        config.gamma = gamma;
    }
    if let Some(deltas) = args.deltas {
        config.deltas = deltas;
    }
    if let Some(trials) = args.trials_per_delta {
        config.trials_per_delta = trials;
    }
    if let Some(metrics) = args.metrics {
        config.metrics = metrics.iter().map(|m| m.parse()).collect::<Result<_, Error>>()?;
    }
    if let Some(mode) = args.noise_mode {
        config.noise.mode = serde_json::from_value::<NoiseMode>(serde_json::Value::String(mode.clone()))
            .map_err(|_| invalid(format!("unknown noise mode `{mode}`")))?;
    }
    if let Some(seed) = args.seed {
        config.noise.seed = seed;
    }
    if let Some(c) = args.level_constant {
        config.problem.level_constant = c;
    }
    if let Some(dir) = args.output {
        config.output_path = Some(dir);
    }

    let outcome = run_convergence(&config)?;
    for report in &outcome.reports {
        print_report(report);
    }
    if let Some(dir) = &config.output_path {
        write_outcome(&outcome, dir)?;
        eprintln!("wrote trials.csv and summary.json to {}", dir.display());
    }
    Ok(())
}

fn print_report(report: &RateReport) {
    println!(
        "{}: fitted slope {:.4} (95% CI {:.4}..{:.4}), predicted {:.4}",
        report.metric, report.fitted_slope, report.slope_ci.0, report.slope_ci.1, report.theoretical_slope
    );
    for row in &report.rows {
        println!(
            "  delta={:e} n={} cardinality={} error={:.6e} ± {:.2e}",
            row.delta, row.n_used, row.cardinality, row.mean_error, row.std_error
        );
    }
}

fn cross(args: CrossArgs) -> Result<(), Failure> {
    let set = build_cross(args.n, args.gamma, args.r)?;
    if args.count {
        println!("{}", set.cardinality());
    } else {
        let mut out = String::from("k,j\n");
        for (k, j) in set.iter() {
            out.push_str(&format!("{k},{j}\n"));
        }
        print!("{out}");
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let report = validate_suite();
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
    } else {
        print_validation(&report);
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(invalid(format!("{} validation checks failed", report.failures().count())))
    }
}

fn print_validation(report: &ValidationReport) {
    println!(
        "zeta0 = {} (oracle {}), T1' residual {:.1e}, T2' residual {:.1e}",
        report.zeta0, report.zeta0_oracle, report.t1_residual, report.t2_residual
    );
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<36} measured {:.3e} threshold {:.1e}", check.name, check.measured, check.threshold);
    }
}
