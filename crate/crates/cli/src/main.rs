use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use tracegen::estimator::{estimate_expectation, CostFunction, EstimateReport};
use tracegen::monoid::{format, DEFAULT_CLIQUE_CAP};
use tracegen::oracle::enumerate_mk;
use tracegen::sampler::{run_streams, ProductSampler, RandomSource, UniformSampler, DEFAULT_MAX_REJECTS};
use tracegen::{Error, ErrorKind, TraceMonoid};

mod verify;

const CLIQUE_CAP_VAR: &str = "TRACEGEN_CLIQUE_CAP";

/// Exact counting and random generation for trace monoids.
#[derive(Parser, Debug)]
#[command(name = "tracegen", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print letters, components, cliques, the Möbius polynomial, its
    /// principal root and the table of trace counts.
    Info {
        #[command(flatten)]
        monoid: MonoidArg,
        /// Largest length in the count table.
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Draw random traces, one JSON list of layers per line.
    Sample(SampleArgs),
    /// Count traces of length k.
    Count(CountArgs),
    /// Estimate the uniform average of a cost over traces of length k.
    Estimate(EstimateArgs),
    /// Check the chain identities and exit non-zero on any failure.
    Verify {
        #[command(flatten)]
        monoid: MonoidArg,
        /// Longest clique chain used in the cylinder checks.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
}

#[derive(Args, Debug)]
struct MonoidArg {
    /// Monoid description (JSON with `letters` and `independence`).
    #[arg(long)]
    monoid: PathBuf,
}

#[derive(Args, Debug)]
struct Streams {
    /// Number of samples.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads. Output does not depend on this.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// First k layers of a uniform infinite trace.
    Boundary,
    /// Finite traces from the sub-uniform measure at parameter p.
    Subuniform,
    /// Exactly uniform traces of length k.
    ExactK,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    monoid: MonoidArg,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Prefix height (boundary) or trace length (exact-k).
    #[arg(long)]
    k: Option<usize>,
    /// Parameter of the sub-uniform measure, below the principal root.
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    streams: Streams,
    /// Rejections allowed per exact-k sample.
    #[arg(long, default_value_t = DEFAULT_MAX_REJECTS)]
    max_rejects: u64,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    monoid: MonoidArg,
    #[arg(long)]
    k: usize,
    /// Also enumerate the traces and compare with the recurrence.
    #[arg(long)]
    exact: bool,
    /// Also estimate the count from boundary samples.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    monoid: MonoidArg,
    #[arg(long)]
    k: usize,
    /// Cost: height, first-layer, one, or prefix:<trace>.
    #[arg(long, default_value = "height")]
    phi: String,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Data => 3,
            ErrorKind::Budget => 4,
            ErrorKind::Numeric => 5,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self { code: 3, message: e.to_string() }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(code) => {
            if let Err(e) = flushed {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Outcome {
    match cli.command {
        Command::Info { monoid, k } => cmd_info(&load(&monoid)?, k, out),
        Command::Sample(args) => cmd_sample(&args, out),
        Command::Count(args) => cmd_count(&args, out),
        Command::Estimate(args) => cmd_estimate(&args, out),
        Command::Verify { monoid, depth } => verify::run(&load(&monoid)?, depth, out),
    }
}

fn clique_cap() -> Result<usize, Failure> {
    match std::env::var(CLIQUE_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{CLIQUE_CAP_VAR} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_CLIQUE_CAP),
    }
}

fn load(arg: &MonoidArg) -> Result<TraceMonoid, Failure> {
    let text = std::fs::read_to_string(&arg.monoid)
        .map_err(|e| Failure { code: 3, message: format!("{}: {e}", arg.monoid.display()) })?;
    let pair = format::parse_monoid(&text).map_err(|e| {
        let f = Failure::from(e);
        Failure { message: format!("{}: {}", arg.monoid.display(), f.message), ..f }
    })?;
    Ok(TraceMonoid::with_cap(pair, clique_cap()?)?)
}

/// 17 significant digits.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_info(m: &TraceMonoid, k: usize, out: &mut impl Write) -> Outcome {
    writeln!(out, "letters: {}", m.pair.letters().join(" "))?;
    let pairs: Vec<String> = m
        .pair
        .independent_pairs()
        .into_iter()
        .map(|(a, b)| format!("{}-{}", m.pair.name(a), m.pair.name(b)))
        .collect();
    writeln!(out, "independence: {}", pairs.join(" "))?;
    writeln!(out, "cliques: {}", m.family.len())?;
    writeln!(out, "max_clique: {}", m.family.max_clique_size())?;
    writeln!(out, "mobius: {}", m.mobius)?;
    writeln!(out, "p0: {:.18}", m.p0)?;
    writeln!(out, "components: {}", m.components.len())?;
    for (i, c) in m.components.iter().enumerate() {
        writeln!(out, "component {i}: letters {} mobius {} root {:.18}", c.pair.letters().join(" "), c.mobius, c.p0)?;
    }
    writeln!(out, "irreducible: {}", m.is_irreducible())?;
    for (n, count) in m.growth(k).values().iter().enumerate() {
        writeln!(out, "lambda {n} {count}")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(args: &SampleArgs, out: &mut impl Write) -> Outcome {
    let m = load(&args.monoid)?;
    let Streams { n, seed, jobs } = args.streams;
    let jobs = jobs as usize;
    let mut header = format!(
        "# tracegen sample mode={} n={n} seed={seed} rng={}",
        args.mode.to_possible_value().expect("named variant").get_name(),
        RandomSource::ALGORITHM
    );
    let lines: Vec<String> = match args.mode {
        Mode::Boundary => {
            let k = args.k.ok_or_else(|| Failure::usage("--k is required for boundary sampling"))?;
            if k == 0 {
                return Err(Failure::usage("--k must be at least 1 for boundary sampling"));
            }
            let sampler = ProductSampler::uniform(&m)?;
            header += &format!(" k={k} p={}", real(m.p0));
            run_streams(n, seed, jobs, |rng| {
                sampler.sample_boundary_prefix(&m, k, rng).map(|l| format::layers_to_json(&m.pair, &l))
            })?
        }
        Mode::Subuniform => {
            let p = args.p.ok_or_else(|| Failure::usage("--p is required for sub-uniform sampling"))?;
            let sampler = ProductSampler::new(&m, p)?;
            if !sampler.is_finite() {
                return Err(Error::ParameterOutOfRange { value: p, domain: format!("(0, {}) for finite traces", m.p0) }.into());
            }
            header += &format!(" p={}", real(p));
            run_streams(n, seed, jobs, |rng| {
                sampler.sample_finite_trace(&m, rng).map(|t| format::trace_to_json(&m.pair, &t))
            })?
        }
        Mode::ExactK => {
            let k = args.k.ok_or_else(|| Failure::usage("--k is required for exact-k sampling"))?;
            if args.max_rejects == 0 {
                return Err(Failure::usage("--max-rejects must be at least 1"));
            }
            let sampler = UniformSampler::new(&m, k)?;
            info!("expected acceptance per proposal: {}", real(sampler.expected_acceptance()));
            header += &format!(
                " k={k} p={} expected_acceptance={}",
                real(sampler.p()),
                real(sampler.expected_acceptance())
            );
            let draws = run_streams(n, seed, jobs, |rng| sampler.sample(&m, args.max_rejects, rng))?;
            let rejections: u64 = draws.iter().map(|d| d.1).sum();
            header += &format!(" rejections={rejections}");
            draws.iter().map(|(t, _)| format::trace_to_json(&m.pair, t)).collect()
        }
    };
    writeln!(out, "{header}")?;
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_count(args: &CountArgs, out: &mut impl Write) -> Outcome {
    let m = load(&args.monoid)?;
    let k = args.k;
    let lambda = m.growth(k).get(k).clone();
    writeln!(out, "k: {k}")?;
    writeln!(out, "lambda: {lambda}")?;
    if args.exact {
        let set = enumerate_mk(&m.pair, k)?;
        let agrees = set.len().to_string() == lambda.to_string();
        writeln!(out, "enumerated: {}", set.len())?;
        writeln!(out, "enumeration_agrees: {agrees}")?;
        if !agrees {
            return Ok(ExitCode::from(1));
        }
    }
    if args.mc {
        check_samples(args.n)?;
        let r = estimate_expectation(&m, k, &CostFunction::ConstantOne, args.n, args.seed, args.jobs as usize)?;
        writeln!(out, "mc_lambda: {}", real(r.lambda_hat))?;
        writeln!(out, "mc_se: {}", real(r.lambda_hat_se))?;
        writeln!(out, "mc_samples: {}", r.samples)?;
        writeln!(out, "seed: {}", args.seed)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn check_samples(n: usize) -> Result<(), Failure> {
    if n < tracegen::estimator::MIN_SAMPLES {
        return Err(Failure::usage(format!("--n must be at least {}", tracegen::estimator::MIN_SAMPLES)));
    }
    Ok(())
}

fn cmd_estimate(args: &EstimateArgs, out: &mut impl Write) -> Outcome {
    let m = load(&args.monoid)?;
    check_samples(args.n)?;
    let phi = CostFunction::parse(&args.phi, &m.pair).map_err(|e| Failure::usage(e.to_string()))?;
    let r = estimate_expectation(&m, args.k, &phi, args.n, args.seed, args.jobs as usize)?;
    write_report(&r, args.seed, out)?;
    Ok(ExitCode::SUCCESS)
}

fn write_report(r: &EstimateReport, seed: u64, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "cost: {}", r.cost)?;
    writeln!(out, "k: {}", r.k)?;
    writeln!(out, "samples: {}", r.samples)?;
    writeln!(out, "seed: {seed}")?;
    writeln!(out, "rng: {}", RandomSource::ALGORITHM)?;
    writeln!(out, "estimate: {}", real(r.estimate))?;
    writeln!(out, "standard_error: {}", real(r.standard_error))?;
    writeln!(out, "mean_phibar: {}", real(r.mean_phibar))?;
    writeln!(out, "mean_theta: {}", real(r.mean_theta))?;
    writeln!(out, "lambda_hat: {}", real(r.lambda_hat))?;
    writeln!(out, "lambda_hat_se: {}", real(r.lambda_hat_se))?;
    writeln!(out, "lambda_exact: {}", r.exact_lambda)?;
    if let Some((e, se)) = r.exact_normalized {
        writeln!(out, "exact_normalized_estimate: {}", real(e))?;
        writeln!(out, "exact_normalized_se: {}", real(se))?;
    }
    if r.reducible_warning {
        writeln!(out, "warning: reducible monoid")?;
    }
    Ok(())
}
