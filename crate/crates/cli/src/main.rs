//! `dcos`: Sylow double cosets of the symmetric group from the command line.

mod output;
mod reference;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};
use num::BigUint;
use serde::Serialize;
use serde_json::json;

use dcos_core::closedform;
use dcos_core::dcos::{self as engine, CensusBudget};
use dcos_core::prob;
use dcos_core::rng::{stream, DEFAULT_SEED};
use dcos_core::sylow::PAdicProfile;
use dcos_core::witness;
use dcos_core::Error;

use output::{Format, Output};

#[derive(Parser)]
#[command(name = "dcos", version, about = "Sylow p-subgroup double cosets of S_n")]
struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true, env = "DCOS_THREADS")]
    threads: Option<usize>,

    /// Write the result to this file instead of stdout. A `.csv` suffix selects CSV.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Add wall-clock timings to the output.
    #[arg(long, global = true)]
    timing: bool,

    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// p-adic profile, |P| and |N(P):P|.
    Info { n: usize, p: u64 },
    /// Double cosets counted by size.
    Census(CensusArgs),
    /// Closed-form counts.
    Formulas(FormulasArgs),
    /// An x with |P ∩ P^x| = p^k.
    Witness {
        n: usize,
        p: u64,
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Monte Carlo estimates.
    #[command(subcommand)]
    Estimate(EstimateCommand),
    /// Runs the Burnside process and tests its visits for uniformity.
    Burnside {
        n: usize,
        p: u64,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Cross-checks formulas against enumeration.
    Verify {
        /// Small cases only (about a minute).
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        /// Adds the n = 13 and n = 14 censuses.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CensusMethod {
    Exhaustive,
    Sampled,
    Classes,
}

#[derive(Args)]
struct CensusArgs {
    n: usize,
    p: u64,
    #[arg(long, value_enum, default_value_t = CensusMethod::Exhaustive)]
    method: CensusMethod,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest coset space the exhaustive method will walk.
    #[arg(long, default_value_t = engine::DEFAULT_COSET_LIMIT)]
    coset_limit: u64,
}

#[derive(Args)]
struct FormulasArgs {
    /// `n p`, or `p k` with --abelian.
    #[arg(num_args = 2, required = true)]
    values: Vec<u64>,
    /// Treat the arguments as `p k` and evaluate the case n = kp, k < p.
    #[arg(long)]
    abelian: bool,
}

#[derive(Subcommand)]
enum EstimateCommand {
    /// f(n,p), the probability that P ∩ P^x ≠ 1 for uniform x.
    F {
        n: usize,
        p: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Pr(W > 0) and the law of W, the number of matching blocks kept by a uniform g.
    Matching {
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// f(n,p) from uniform x and from a uniform Sylow subgroup.
    Models {
        n: usize,
        p: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Failure of a subcommand, mapped onto the process exit code.
enum Failure {
    Usage(String),
    Budget(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::NotPrime(_)
            | Error::OutOfRange { .. }
            | Error::Parse(_)
            | Error::InvalidPermutation(_)
            | Error::DegreeMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(format!("output: {}", e))
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        2 => LevelFilter::Debug,
        _ => LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {}", e);
            return ExitCode::from(1);
        }
    }
    let out = Output::new(cli.out.clone(), cli.format);
    match run(&cli, &out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(3)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli, out: &Output) -> CmdResult {
    let start = Instant::now();
    let elapsed = || cli.timing.then(|| start.elapsed().as_secs_f64());
    match &cli.command {
        Command::Info { n, p } => {
            let prof = PAdicProfile::new(*n, *p)?;
            out.json(&json!({
                "n": prof.n,
                "p": prof.p,
                "digits": prof.digits,
                "m": prof.m,
                "order": prof.order().to_string(),
                "normalizer_index": prof.normalizer_index().to_string(),
            }))?;
        }
        Command::Census(args) => census(args, out, elapsed)?,
        Command::Formulas(args) => formulas(args, out)?,
        Command::Witness { n, p, k, seed } => {
            let mut rng = stream(*seed, 0);
            let w = witness::construct_intersection(*n, *p, *k, &mut rng)?;
            out.json(&WitnessOutput {
                n: w.n,
                p: w.p,
                k: w.k,
                x: w.x.to_cycle_string(),
                images: w.x.to_string(),
                verified: true,
                method: w.method.to_string(),
                split: w.split,
                intersection_order: w.intersection_order.to_string(),
                seed: *seed,
                elapsed: elapsed(),
            })?;
        }
        Command::Estimate(cmd) => estimate(cmd, out, elapsed)?,
        Command::Burnside { n, p, steps, seed } => {
            let report = prob::burnside_chain(*n, *p, *steps, *seed, None)?;
            out.json(&Timed {
                report,
                elapsed: elapsed(),
            })?;
        }
        Command::Verify { quick, full } => {
            let tier = if *quick {
                verify::Tier::Quick
            } else if *full {
                verify::Tier::Full
            } else {
                verify::Tier::Default
            };
            let report = verify::run(tier, cli.timing);
            out.json(&report)?;
            if report.failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Timed<T: Serialize> {
    #[serde(flatten)]
    report: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed: Option<f64>,
}

#[derive(Serialize)]
struct WitnessOutput {
    n: usize,
    p: u64,
    k: usize,
    x: String,
    images: String,
    verified: bool,
    method: String,
    split: Vec<usize>,
    intersection_order: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed: Option<f64>,
}

fn census(args: &CensusArgs, out: &Output, elapsed: impl Fn() -> Option<f64>) -> Result<(), Failure> {
    let (n, p) = (args.n, args.p);
    match args.method {
        CensusMethod::Exhaustive => {
            let budget = CensusBudget {
                coset_space_limit: args.coset_limit,
            };
            let t = engine::census_exhaustive(n, p, &budget)?;
            info!("census {} {}: {} double cosets", n, p, t.total);
            out.census(&t, elapsed())
        }
        CensusMethod::Classes => {
            let t = engine::census_via_classes(n, p)?;
            out.census(&t, elapsed())
        }
        CensusMethod::Sampled => {
            let c = engine::census_sampled(n, p, args.samples, args.seed)?;
            out.sampled(&c, elapsed())
        }
    }
}

fn big_strings(v: &[BigUint]) -> Vec<String> {
    v.iter().map(BigUint::to_string).collect()
}

fn formulas(args: &FormulasArgs, out: &Output) -> Result<(), Failure> {
    let (a, b) = (args.values[0], args.values[1]);
    if args.abelian {
        let (p, k) = (a, b);
        let census = closedform::abelian_census(p, k)?;
        let from_genfun = closedform::abelian_census_from_genfun(p, k)?;
        let genfun = closedform::abelian_genfun(p, k)?;
        let bounds = if p >= 3 {
            Some(closedform::check_bounds_thm33(p, k)?)
        } else {
            None
        };
        return out.json(&json!({
            "census": census,
            "genfun_agrees": census == from_genfun,
            "genfun": big_strings(&genfun),
            "bounds": bounds,
        }));
    }
    let n = usize::try_from(a).map_err(|_| Failure::Usage(format!("n = {} is too large", a)))?;
    let p = b;
    let prof = PAdicProfile::new(n, p)?;
    let mut report = json!({
        "n": n,
        "p": p,
        "digits": prof.digits,
        "m": prof.m,
        "order": prof.order().to_string(),
        "count_min_size": closedform::count_min_size(n, p)?.to_string(),
        "second_size_count": closedform::second_size_count(n, p)?.to_string(),
    });
    match engine::total_via_classes(n, p) {
        Ok(total) => report["total_via_classes"] = json!(total.to_string()),
        Err(Error::BudgetExceeded { .. }) => report["total_via_classes"] = json!(null),
        Err(e) => return Err(e.into()),
    }
    let pn = p as usize;
    if p > 2 && n % pn == 0 && n / pn >= 1 && n / pn < pn {
        let k = (n / pn) as u64;
        report["abelian"] = json!({
            "census": closedform::abelian_census(p, k)?,
            "bounds": closedform::check_bounds_thm33(p, k)?,
        });
    }
    out.json(&report)
}

#[derive(Serialize)]
struct MatchingOutput {
    #[serde(flatten)]
    estimate: prob::EstimateReport,
    counts: Vec<u64>,
    mean: f64,
    tv_to_poisson_half: f64,
}

fn estimate(cmd: &EstimateCommand, out: &Output, elapsed: impl Fn() -> Option<f64>) -> Result<(), Failure> {
    match cmd {
        EstimateCommand::F { n, p, samples, seed } => {
            let mut r = prob::estimate_f(*n, *p, *samples, *seed)?;
            r.elapsed = elapsed();
            out.json(&r)
        }
        EstimateCommand::Matching { n, samples, seed } => {
            let mut r = prob::estimate_w_positive(*n, *samples, *seed)?;
            let law = prob::matching_law(*n, *samples, *seed)?;
            r.elapsed = elapsed();
            let m = MatchingOutput {
                estimate: r,
                counts: law.counts,
                mean: law.mean,
                tv_to_poisson_half: law.tv_to_poisson_half,
            };
            match out.format() {
                Format::Csv => out.matching_csv(&m.counts),
                Format::Json => out.json(&m),
            }
        }
        EstimateCommand::Models { n, p, samples, seed } => {
            let c = prob::check_model_equivalence(*n, *p, *samples, *seed)?;
            out.json(&Timed {
                report: c,
                elapsed: elapsed(),
            })
        }
    }
}
