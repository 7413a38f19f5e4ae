//! `polyvol`: volume engines and oracles behind a JSON command line.

mod instance;
mod record;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyvol::k_ball::{approx_k_ball_volume_with, KBallInstance};
use polyvol::knapsack::{approx_knapsack_dual_volume_with, KnapsackDualInstance};
use polyvol::oracles::{exact_hull_volume, exact_intersection_volume, hardness_reduction_check, mc_volume};
use polyvol::rational::{format, int, parse, ratio};
use polyvol::two_ball::{approx_two_ball_volume_with, EngineOptions, GridStrategy, TwoBallInstance};
use polyvol::vpolytope::{exact_volume_report_with_threads, VPolytopeInstance};
use polyvol::{ApproxResult, CrossPolytope, Error, Rational, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use instance::{Instance, TwoBalls};
use record::{BenchReport, BenchRow, ErrorRecord, Guarantee, ResultRecord};

#[derive(Parser)]
#[command(name = "polyvol", version, about = "Volumes of cross-polytope intersections and V-polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a volume engine.
    #[command(subcommand)]
    Volume(VolumeCommand),
    /// Run a ground-truth oracle.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run an identity check.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Time the two-ball engine over a list of (n, delta) pairs.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum VolumeCommand {
    /// Approximate Vol(C(0,1) ∩ C(c,r)) from above within a factor 1 + delta.
    TwoBalls {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
    },
    /// Approximate the volume of an intersection of up to four balls.
    KBalls {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
    },
    /// Approximate Vol(conv{±e_i, a}) within a factor 1 ± epsilon.
    KnapsackDual {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Rational,
    },
    /// Exact volume of the convex hull of n + k points in general position.
    VPolytope {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact rational volume by vertex or facet enumeration (dimension <= 4).
    Exact {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Monte Carlo estimate with a 95% confidence half-width.
    Mc {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Recover the count of sign vectors with <σ, a> > 0 from exact volumes.
    Reduction {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Instance file (JSON).
    #[arg(short, long)]
    instance: PathBuf,
    /// Write the JSON record here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads inside a stage; results do not depend on this value.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark configuration (JSON).
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum StrategyName {
    #[default]
    Full,
    Demand,
}

#[derive(Debug, Deserialize)]
struct BenchPair {
    n: usize,
    delta: String,
}

#[derive(Debug, Deserialize)]
struct BenchConfig {
    #[serde(default)]
    pairs: Vec<BenchPair>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    strategy: StrategyName,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse(s).map_err(|e| e.to_string())
}

fn options(threads: usize) -> EngineOptions {
    EngineOptions { threads: threads.max(1), ..EngineOptions::default() }
}

fn params_from(result: &ApproxResult, record: &mut ResultRecord) {
    record.params.m = Some(result.m_used);
    record.params.beta = result.beta.as_ref().map(format);
    record.params.epsilon = result.epsilon.as_ref().map(format);
    if result.epsilon.is_none() {
        record.params.delta = Some(format(&result.delta));
    }
}

fn approx_record(engine: &str, result: &ApproxResult, scale: &Rational, digest: String) -> ResultRecord {
    let guarantee = Guarantee::between(&result.lower_factor(), &result.upper_factor(), result.lower_bound_exact);
    let mut record = ResultRecord::new(engine, result.value * polyvol::rational::to_f64(scale), guarantee, digest);
    params_from(result, &mut record);
    record
}

fn two_ball_instance(form: &TwoBalls) -> Result<(TwoBallInstance, Rational), Error> {
    match form {
        TwoBalls::Canonical { c, r } => Ok((TwoBallInstance::new(c.clone(), r.clone())?, int(1))),
        TwoBalls::General([a, b]) => TwoBallInstance::from_balls(a, b),
    }
}

fn balls_of(inst: &Instance) -> Result<Vec<CrossPolytope>, Error> {
    match inst {
        Instance::TwoBalls(TwoBalls::Canonical { c, r }) => Ok(vec![
            CrossPolytope::centered(c.len(), int(1))?,
            CrossPolytope::new(Vector::new(c.clone())?, r.clone())?,
        ]),
        Instance::TwoBalls(TwoBalls::General(balls)) => Ok(balls.to_vec()),
        Instance::KBalls { centers, radii } => {
            if centers.len() != radii.len() {
                return Err(Error::DimensionMismatch { expected: centers.len(), found: radii.len() });
            }
            centers
                .iter()
                .zip(radii)
                .map(|(p, r)| CrossPolytope::new(Vector::new(p.clone())?, r.clone()))
                .collect()
        }
        other => Err(Error::InvalidInstance(format!("{} instances do not describe balls", other.kind()))),
    }
}

fn wrong_kind(expected: &str, inst: &Instance) -> Error {
    Error::InvalidInstance(format!("expected a {expected} instance, got {}", inst.kind()))
}

fn volume(cmd: &VolumeCommand) -> Result<ResultRecord, Error> {
    match cmd {
        VolumeCommand::TwoBalls { io, delta } => {
            let inst = Instance::load(&io.instance)?;
            let Instance::TwoBalls(form) = &inst else {
                return Err(wrong_kind("two_balls", &inst));
            };
            let (two, scale) = two_ball_instance(form)?;
            let result = approx_two_ball_volume_with(&two, delta, &options(io.threads))?;
            let mut record = approx_record("two_ball_fptas", &result, &scale, inst.digest());
            if matches!(form, TwoBalls::General(_)) {
                record.scale = Some(format(&scale));
            }
            Ok(record)
        }
        VolumeCommand::KBalls { io, delta } => {
            let inst = Instance::load(&io.instance)?;
            let Instance::KBalls { centers, radii } = &inst else {
                return Err(wrong_kind("k_balls", &inst));
            };
            let kinst = KBallInstance::new(centers.clone(), radii.clone())?;
            let result = approx_k_ball_volume_with(&kinst, delta, io.threads.max(1))?;
            Ok(approx_record("k_ball_fptas", &result, &int(1), inst.digest()))
        }
        VolumeCommand::KnapsackDual { io, epsilon } => {
            let inst = Instance::load(&io.instance)?;
            let Instance::KnapsackDual { a } = &inst else {
                return Err(wrong_kind("knapsack_dual", &inst));
            };
            let kinst = KnapsackDualInstance::new(a.clone())?;
            let result = approx_knapsack_dual_volume_with(&kinst, epsilon, &options(io.threads))?;
            let mut record = approx_record("knapsack_dual_fptas", &result, &int(1), inst.digest());
            record.params.delta = result.inner_delta.as_ref().map(format);
            Ok(record)
        }
        VolumeCommand::VPolytope { io } => {
            let inst = Instance::load(&io.instance)?;
            let Instance::VPolytope { vertices } = &inst else {
                return Err(wrong_kind("v_polytope", &inst));
            };
            let report = exact_volume_report_with_threads(&VPolytopeInstance::new(vertices.clone())?, io.threads)?;
            let mut record = ResultRecord::exact("exact_vpolytope", &report.volume, inst.digest());
            record.facets = Some(report.facets);
            Ok(record)
        }
    }
}

fn oracle(cmd: &OracleCommand) -> Result<ResultRecord, Error> {
    match cmd {
        OracleCommand::Exact { io } => {
            let inst = Instance::load(&io.instance)?;
            let value = match &inst {
                Instance::KnapsackDual { a } => exact_hull_volume(&KnapsackDualInstance::new(a.clone())?.vertices())?,
                Instance::VPolytope { vertices } => exact_hull_volume(vertices)?,
                balls => exact_intersection_volume(&balls_of(balls)?)?,
            };
            Ok(ResultRecord::exact("oracle_exact", &value, inst.digest()))
        }
        OracleCommand::Mc { io, samples, seed } => {
            let inst = Instance::load(&io.instance)?;
            let est = mc_volume(&balls_of(&inst)?, *samples, *seed)?;
            let mut record = ResultRecord::new("oracle_mc", est.estimate, Guarantee::none(), inst.digest());
            record.half_width = Some(est.half_width);
            record.samples = Some(est.samples);
            record.seed = Some(est.seed);
            Ok(record)
        }
    }
}

fn check(cmd: &CheckCommand) -> Result<ResultRecord, Error> {
    let CheckCommand::Reduction { io } = cmd;
    let inst = Instance::load(&io.instance)?;
    let Instance::KnapsackDual { a } = &inst else {
        return Err(wrong_kind("knapsack_dual", &inst));
    };
    let result = hardness_reduction_check(a)?;
    let value = Rational::from_integer(result.lhs.clone());
    let mut record = ResultRecord::exact("hardness_reduction_check", &value, inst.digest());
    record.params.delta = Some(format(&result.delta));
    record.params.epsilon = Some(format(&result.epsilon));
    record.lhs = Some(
        i64::try_from(result.lhs).map_err(|_| Error::Unsupported("rounded volume does not fit in 64 bits".into()))?,
    );
    record.rhs = Some(result.rhs);
    record.pass = Some(result.pass);
    Ok(record)
}

/// Two-ball instance of dimension `n` drawn from `rng`, with radius in
/// `[1/2, 1]` and `|c|_1 <= r`.
fn bench_instance(rng: &mut ChaCha8Rng, n: usize) -> Result<TwoBallInstance, Error> {
    let r = ratio(rng.gen_range(4..=8), 8);
    let mut budget = 8 * n as i64;
    let c = (0..n)
        .map(|_| {
            let steps = rng.gen_range(0..=budget);
            budget -= steps;
            &r * ratio(steps, 8 * n as i64)
        })
        .collect();
    TwoBallInstance::new(c, r)
}

fn bench(args: &BenchArgs) -> Result<BenchReport, Error> {
    let text = std::fs::read_to_string(&args.instance)
        .map_err(|e| Error::InvalidInstance(format!("cannot read {}: {e}", args.instance.display())))?;
    let config: BenchConfig =
        serde_json::from_str(&text).map_err(|e| Error::InvalidInstance(format!("malformed bench config: {e}")))?;
    let seed = args.seed.unwrap_or(config.seed);
    let strategy = match config.strategy {
        StrategyName::Full => GridStrategy::Full,
        StrategyName::Demand => GridStrategy::Demand,
    };
    let opts = EngineOptions { strategy, threads: args.threads.max(1) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(config.pairs.len());
    for pair in &config.pairs {
        let delta = parse(&pair.delta)?;
        let inst = bench_instance(&mut rng, pair.n)?;
        let start = Instant::now();
        let result = approx_two_ball_volume_with(&inst, &delta, &opts)?;
        rows.push(BenchRow {
            n: pair.n,
            delta: format(&delta),
            m: result.m_used,
            wall_time_ms: start.elapsed().as_millis() as u64,
        });
    }
    let strategy = serde_json::to_value(config.strategy).expect("enum serializes");
    Ok(BenchReport {
        engine: "bench".into(),
        seed,
        strategy: strategy.as_str().unwrap_or_default().into(),
        rows,
    })
}

/// Compact JSON with keys in sorted order.
fn canonical<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value).and_then(|v| serde_json::to_string(&v)).expect("records serialize")
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Error::InvalidInstance(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(String, Option<&Path>), Error> {
    let start = Instant::now();
    let (record, output) = match &cli.command {
        Command::Bench(args) => {
            let report = bench(args)?;
            let text = canonical(&report);
            return Ok((text, args.output.as_deref()));
        }
        Command::Volume(cmd) => {
            let io = match cmd {
                VolumeCommand::TwoBalls { io, .. }
                | VolumeCommand::KBalls { io, .. }
                | VolumeCommand::KnapsackDual { io, .. }
                | VolumeCommand::VPolytope { io } => io,
            };
            (volume(cmd)?, io.output.as_deref())
        }
        Command::Oracle(cmd) => {
            let io = match cmd {
                OracleCommand::Exact { io } | OracleCommand::Mc { io, .. } => io,
            };
            (oracle(cmd)?, io.output.as_deref())
        }
        Command::Check(cmd) => {
            let CheckCommand::Reduction { io } = cmd;
            (check(cmd)?, io.output.as_deref())
        }
    };
    let mut record = record;
    record.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok((canonical(&record), output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|(text, output)| emit(&text, output)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = ErrorRecord::from_error(&e);
            eprintln!("polyvol: {e}");
            println!("{}", canonical(&record));
            ExitCode::from(record.exit_code as u8)
        }
    }
}
