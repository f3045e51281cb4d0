//! `qmac` — reproduces the capacity-region figures and numerical checks as
//! deterministic CSV/JSON files.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 verification failure.

mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qmac::channels::NoiseParameter;
use qmac::cmac::{self, RegionSampling};
use qmac::infoq;
use qmac::regions::{self, KnownRegion, NamedRegion};

use output::{fmt_num, json_text, Sink};
use verify::{Suite, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "qmac", version, about = "Capacity regions of quantum and classical multiple-access channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-use vs two-use Holevo rates of the first sender and their gap.
    GapCurve(GridArgs),
    /// Analytic regions of the coupling channel, the ideal channel, their
    /// Minkowski sum and their product.
    Regions(OutArgs),
    /// Runs numerical verification suites; exits 3 if any fails.
    Verify(VerifyArgs),
    /// Sampled regions of the BSC pair and XOR MACs, their sum and product.
    ClassicalDemo(DemoArgs),
    /// Regularized bound on the middle sender's rate of the three-sender channel.
    GammaBound(GammaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file (written atomically); stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long = "p-min", default_value_t = 0.0)]
    p_min: f64,
    #[arg(long = "p-max", default_value_t = 1.0)]
    p_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 11)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct GammaArgs {
    /// Evaluate a single noise value instead of a grid.
    #[arg(long, conflicts_with_all = ["p_min", "p_max", "steps"])]
    p: Option<f64>,
    #[arg(long = "p-min", default_value_t = 0.0)]
    p_min: f64,
    #[arg(long = "p-max", default_value_t = 0.5)]
    p_max: f64,
    #[arg(long, default_value_t = 51)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suites to run (repeatable); all suites if omitted.
    #[arg(long, value_enum)]
    suite: Vec<Suite>,
    #[arg(long)]
    seed: u64,
    /// Restrict the per-p suites to this noise value.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[arg(long)]
    seed: u64,
    /// Random input laws per sampled region.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    Usage(String),
    Io(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn check_p(name: &str, p: f64) -> Result<(), Failure> {
    NoiseParameter::new(p).map(|_| ()).map_err(|_| Failure::Usage(format!("--{name} must lie in [0, 1], got {p}")))
}

fn grid(p_min: f64, p_max: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    check_p("p-min", p_min)?;
    check_p("p-max", p_max)?;
    if steps < 2 {
        return Err(Failure::Usage(format!("--steps must be at least 2, got {steps}")));
    }
    if p_min > p_max {
        return Err(Failure::Usage(format!("--p-min {p_min} exceeds --p-max {p_max}")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|k| if k + 1 == steps { p_max } else { p_min + (p_max - p_min) * k as f64 / last }).collect())
}

fn open(out: &OutArgs) -> Result<Sink, Failure> {
    Sink::open(out.out.as_deref()).map_err(|e| Failure::Io(format!("cannot write output: {e}")))
}

fn finish(sink: Sink, content: &str) -> Outcome {
    sink.finish(content).map_err(|e| Failure::Io(format!("cannot write output: {e}")))
}

fn compute<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

/// Renders rows as CSV or as a JSON array of records keyed by `header`.
fn table(header: &[&str], rows: &[Vec<f64>], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = header.join(",");
            s.push('\n');
            for row in rows {
                s.push_str(&row.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let records: Vec<_> = rows
                .iter()
                .map(|row| {
                    serde_json::Value::Object(
                        header.iter().map(|h| h.to_string()).zip(row.iter().map(|x| json!(x))).collect(),
                    )
                })
                .collect();
            json_text(serde_json::Value::Array(records))
        }
    }
}

fn gap_curve(args: &GridArgs) -> Outcome {
    let ps = grid(args.p_min, args.p_max, args.steps)?;
    let sink = open(&args.out)?;
    let rows: Vec<Vec<f64>> = ps
        .iter()
        .map(|&p| {
            let p = NoiseParameter::new(p).expect("validated");
            let chi1 = infoq::chi1_closed_form(p);
            let chi2 = infoq::chi2_prime_closed_form(p);
            vec![p.value(), chi1, chi2, chi2 - chi1]
        })
        .collect();
    finish(sink, &table(&["p", "chi1", "chi2_prime", "gap"], &rows, args.format))
}

fn regions_cmd(args: &OutArgs) -> Outcome {
    let sink = open(args)?;
    let named: Vec<NamedRegion> = KnownRegion::ALL.iter().map(|r| NamedRegion::new(r.name(), &r.region())).collect();
    let sum = KnownRegion::MinkowskiPhi1PsiId.region();
    let product = KnownRegion::Phi1XPsiId.region();
    let report = json!({
        "regions": named,
        "minkowski_subset_of_product": regions::subset(&sum, &product),
        "strict": regions::strict_subset(&sum, &product),
        "area_difference": product.area() - sum.area(),
    });
    finish(sink, &json_text(report))
}

fn verify_cmd(args: &VerifyArgs) -> Outcome {
    if let Some(p) = args.p {
        check_p("p", p)?;
    }
    if args.trials == Some(0) || args.restarts == Some(0) || args.steps == Some(0) {
        return Err(Failure::Usage("--trials, --restarts and --steps must be positive".into()));
    }
    let mut suites = args.suite.clone();
    if suites.is_empty() {
        suites = Suite::value_variants().to_vec();
    }
    suites.sort();
    suites.dedup();
    let sink = open(&args.out)?;
    let cfg =
        VerifyConfig { seed: args.seed, p: args.p, trials: args.trials, restarts: args.restarts, steps: args.steps };
    let results =
        suites.iter().map(|&s| verify::run(s, &cfg)).collect::<Result<Vec<_>, _>>().map_err(Failure::Usage)?;
    let pass = results.iter().all(|r| r.pass);
    let report = json!({ "seed": args.seed, "pass": pass, "suites": results });
    finish(sink, &json_text(report))?;
    if pass {
        Ok(())
    } else {
        let failed: Vec<_> = results.iter().filter(|r| !r.pass).map(|r| r.suite).collect();
        Err(Failure::Verification(format!("failed suites: {}", failed.join(", "))))
    }
}

fn classical_demo(args: &DemoArgs) -> Outcome {
    let sink = open(&args.out)?;
    let bsc = compute(cmac::bsc_pair([0.5, 0.0]))?;
    let xor = cmac::xor_gate();
    let demo =
        compute(cmac::region_additivity_demo(&bsc, &xor, &RegionSampling { samples: args.trials, seed: args.seed }))?;
    let report = json!({
        "seed": args.seed,
        "samples": args.trials,
        "regions": [
            NamedRegion::new("bsc_pair", &demo.first),
            NamedRegion::new("xor", &demo.second),
            NamedRegion::new("minkowski_sum", &demo.sum_region),
            NamedRegion::new("product", &demo.product_region),
        ],
        "hausdorff": demo.hausdorff,
        "product_in_sum": demo.product_in_sum,
        "sum_in_product": demo.sum_in_product,
    });
    finish(sink, &json_text(report))
}

fn gamma_bound(args: &GammaArgs) -> Outcome {
    let ps = match args.p {
        Some(p) => {
            check_p("p", p)?;
            vec![p]
        }
        None => grid(args.p_min, args.p_max, args.steps)?,
    };
    let sink = open(&args.out)?;
    let rows: Vec<Vec<f64>> =
        ps.iter().map(|&p| vec![p, cmac::gamma_rb_bound(NoiseParameter::new(p).expect("validated"))]).collect();
    finish(sink, &table(&["p", "bound"], &rows, args.format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::GapCurve(a) => gap_curve(a),
        Command::Regions(a) => regions_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::ClassicalDemo(a) => classical_demo(a),
        Command::GammaBound(a) => gamma_bound(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) => format!("error: {m}\n\nRun `qmac --help` for usage."),
                Failure::Io(m) | Failure::Verification(m) => format!("error: {m}"),
            };
            eprintln!("{msg}");
            ExitCode::from(f.code())
        }
    }
}
