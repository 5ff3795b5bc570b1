//! collatz-probe: Collatz trajectory profiling, residue sieves, violator
//! censuses, record scans and parallel range verification.
//!
//! Exit codes: 0 success, 1 usage error, 2 counterexample candidate found,
//! 3 checkpoint corruption.

use clap::{Args, Parser, Subcommand};
use collatz_core::census::{self, CensusReport, TrendReport};
use collatz_core::heuristics;
use collatz_core::records::{self, KnownRecordsReport, RecordKind};
use collatz_core::runner::{
    self, ExecuteOptions, RunnerError, TaskReport, TaskSpec, VerifyReport,
};
use collatz_core::sieve;
use collatz_core::DEFAULT_STEP_LIMIT;
use num_bigint::BigUint;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_CANDIDATE: u8 = 2;
const EXIT_CHECKPOINT: u8 = 3;

#[derive(Parser)]
#[command(name = "collatz-probe", version, about = "Collatz (3x+1) verification and conjecture probing")]
struct Cli {
    /// Emit a machine-readable JSON document instead of text lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full-flight profile of N: route, max height, transform counts.
    Flight { n: String },
    /// Stopping-time profile of N: m, m1, m2 and the landing value.
    Stop { n: String },
    /// Odd/even transform ratio of N against log2/log3.
    Ratio { n: String },
    /// Build the residue sieve for classes 2^bits k + r.
    Sieve(SieveArgs),
    /// Violator census at one level, or the trend across levels.
    Census(CensusArgs),
    /// Record-flight scans and verification of the published records.
    Records(RecordsArgs),
    /// Heuristic-model computations.
    #[command(subcommand)]
    Heuristics(HeuristicsCmd),
    /// Verify that every start in a range falls below itself.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SieveArgs {
    #[arg(long)]
    bits: u32,
    /// Print each surviving residue, ascending, one per line.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct CensusArgs {
    #[command(subcommand)]
    sub: Option<CensusSub>,
    /// Census level: classify every start below 2^K.
    #[arg(long)]
    k: Option<u32>,
    /// Skip starts in residue classes this sieve level eliminates.
    #[arg(long)]
    sieve_bits: Option<u32>,
    /// Print each violator, ascending, one per line.
    #[arg(long)]
    list: bool,
}

#[derive(Subcommand)]
enum CensusSub {
    /// x(K) for K = 1..=kmax with growth ratios and trend indicators.
    Trend {
        #[arg(long)]
        kmax: u32,
    },
}

#[derive(Args)]
struct RecordsArgs {
    #[command(subcommand)]
    sub: Option<RecordsSub>,
    /// Metric: route | stop | height | ratio.
    #[arg(long)]
    kind: Option<String>,
    /// Scan starts in [1, N).
    #[arg(long)]
    upto: Option<u64>,
}

#[derive(Subcommand)]
enum RecordsSub {
    /// Recompute the published giant records by direct simulation.
    VerifyKnown,
}

#[derive(Subcommand)]
enum HeuristicsCmd {
    /// Truncated drift product (3/2)^(1/2) (3/4)^(1/4) ... with its closed form.
    Drift {
        #[arg(long)]
        terms: u32,
        /// Decimal digits of working precision.
        #[arg(long, default_value_t = 30)]
        precision: u32,
    },
    /// Mean stopping time over [from, to), overall and for odd starts.
    Mean {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Report every n <= upto whose peak exceeds K n^2.
    Heightprobe {
        #[arg(long)]
        upto: u64,
        #[arg(long, default_value_t = 8)]
        k: u64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long, default_value_t = runner::DEFAULT_VERIFY_SIEVE_BITS)]
    sieve_bits: u32,
    /// Worker threads (defaults to available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Resumable checkpoint file, written after every completed work unit.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Transform budget per flight before flagging a counterexample candidate.
    #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
    step_limit: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version through the error path too
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn parse_nat(text: &str) -> Result<BigUint, String> {
    let n: BigUint = text
        .parse()
        .map_err(|_| format!("'{text}' is not a decimal natural number"))?;
    if n == BigUint::ZERO {
        return Err("flight starts are indexed from 1".into());
    }
    Ok(n)
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Flight { n } => {
            let n = parse_nat(n)?;
            let p = collatz_core::flight_profile(&n, DEFAULT_STEP_LIMIT).map_err(|e| e.to_string())?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "start": p.start.to_string(),
                        "route": p.route,
                        "max_height": p.max_height.to_string(),
                        "odd_count": p.odd_count,
                        "even_count": p.even_count,
                    })
                );
            } else {
                println!(
                    "start={} route={} max_height={} odd_count={} even_count={}",
                    p.start, p.route, p.max_height, p.odd_count, p.even_count
                );
            }
            Ok(EXIT_OK)
        }
        Command::Stop { n } => {
            let n = parse_nat(n)?;
            let p = collatz_core::stopping_profile(&n, DEFAULT_STEP_LIMIT).map_err(|e| e.to_string())?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "start": p.start.to_string(),
                        "m": p.m,
                        "m1": p.m1,
                        "m2": p.m2,
                        "landing": p.landing.to_string(),
                        "defined": p.defined,
                    })
                );
            } else {
                println!(
                    "start={} m={} m1={} m2={} landing={} defined={}",
                    p.start, p.m, p.m1, p.m2, p.landing, p.defined
                );
            }
            Ok(EXIT_OK)
        }
        Command::Ratio { n } => {
            let n = parse_nat(n)?;
            if n < BigUint::from(2u32) {
                return Err("the ratio needs at least one even transform; use n >= 2".into());
            }
            let r = collatz_core::oe_ratio(&n, DEFAULT_STEP_LIMIT).map_err(|e| e.to_string())?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "start": r.start.to_string(),
                        "odd_count": r.odd_count,
                        "even_count": r.even_count,
                        "ratio": r.decimal(6),
                        "below_log2_log3": r.below_log2_log3(),
                    })
                );
            } else {
                println!(
                    "start={} odd_count={} even_count={} ratio={} below_log2_log3={}",
                    r.start,
                    r.odd_count,
                    r.even_count,
                    r.decimal(6),
                    r.below_log2_log3()
                );
            }
            Ok(EXIT_OK)
        }
        Command::Sieve(args) => {
            if args.bits < 1 || args.bits > sieve::MAX_SIEVE_BITS {
                return Err(format!("--bits must be in 1..={}", sieve::MAX_SIEVE_BITS));
            }
            let table = sieve::build_sieve(args.bits);
            let (num, den) = table.coverage();
            if cli.json {
                let mut doc = json!({
                    "bits": table.bits(),
                    "survivors": table.survivor_count(),
                    "coverage": format!("{num}/{den}"),
                    "coverage_pct": table.coverage_percent(4),
                });
                if args.list {
                    doc["residues"] = json!(table.survivors());
                }
                println!("{doc}");
            } else {
                println!(
                    "bits={} survivors={} coverage={}/{} coverage_pct={}%",
                    table.bits(),
                    table.survivor_count(),
                    num,
                    den,
                    table.coverage_percent(4)
                );
                if args.list {
                    for r in table.survivors() {
                        println!("{r}");
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Census(args) => run_census(cli, args),
        Command::Records(args) => run_records(cli, args),
        Command::Heuristics(cmd) => run_heuristics(cli, cmd),
        Command::Verify(args) => run_verify(cli, args),
    }
}

fn run_census(cli: &Cli, args: &CensusArgs) -> Result<u8, String> {
    match (&args.sub, args.k) {
        (Some(CensusSub::Trend { kmax }), _) => {
            if !(1..=census::MAX_CENSUS_K).contains(kmax) {
                return Err(format!("--kmax must be in 1..={}", census::MAX_CENSUS_K));
            }
            let t = census::trend(*kmax).map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", trend_json(&t));
            } else {
                print!("{}", render_trend(&t));
            }
            Ok(EXIT_OK)
        }
        (None, Some(k)) => {
            if !(1..=census::MAX_CENSUS_K).contains(&k) {
                return Err(format!("--k must be in 1..={}", census::MAX_CENSUS_K));
            }
            if let Some(bits) = args.sieve_bits {
                if bits < 1 || bits > k.min(sieve::MAX_SIEVE_BITS) {
                    return Err("--sieve-bits must be between 1 and min(k, 24)".into());
                }
            }
            let table = args.sieve_bits.map(sieve::build_sieve);
            let report = census::census(k, table.as_ref()).map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", census_json(&report, args.list));
            } else {
                print!("{}", runner::render_census(&report, args.list));
            }
            Ok(EXIT_OK)
        }
        (None, None) => Err("census needs --k K (or the `trend` subcommand)".into()),
    }
}

fn run_records(cli: &Cli, args: &RecordsArgs) -> Result<u8, String> {
    match (&args.sub, &args.kind, args.upto) {
        (Some(RecordsSub::VerifyKnown), _, _) => {
            let report = records::verify_known_records().map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", known_records_json(&report));
            } else {
                print!("{}", render_known_records(&report));
            }
            Ok(if report.all_match() { EXIT_OK } else { EXIT_USAGE })
        }
        (None, Some(kind), Some(upto)) => {
            let kind = RecordKind::parse(kind)
                .ok_or_else(|| "--kind must be route|stop|height|ratio".to_string())?;
            if upto < 2 {
                return Err("--upto must be at least 2".into());
            }
            let log = records::scan_records(1, upto, kind, None).map_err(|e| e.to_string())?;
            if cli.json {
                let entries: Vec<_> = log
                    .entries
                    .iter()
                    .map(|e| json!({"n": e.n, "value": e.value.render()}))
                    .collect();
                println!(
                    "{}",
                    json!({"kind": kind.token(), "scanned_up_to": log.scanned_up_to, "entries": entries})
                );
            } else {
                print!("{}", runner::render_records(&log));
            }
            Ok(EXIT_OK)
        }
        _ => Err("records needs --kind and --upto (or the `verify-known` subcommand)".into()),
    }
}

fn run_heuristics(cli: &Cli, cmd: &HeuristicsCmd) -> Result<u8, String> {
    match cmd {
        HeuristicsCmd::Drift { terms, precision } => {
            if *terms < 1 {
                return Err("--terms must be at least 1".into());
            }
            if *precision < 10 {
                return Err("--precision must be at least 10".into());
            }
            let d = heuristics::drift_constant(*terms, *precision);
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "terms": d.terms,
                        "precision": d.precision,
                        "product": d.product_decimal(),
                        "closed_form": d.closed_form_decimal(),
                        "limit": "0.75",
                    })
                );
            } else {
                println!(
                    "terms={} precision={} product={} closed_form={} limit=0.75",
                    d.terms,
                    d.precision,
                    d.product_decimal(),
                    d.closed_form_decimal()
                );
            }
            Ok(EXIT_OK)
        }
        HeuristicsCmd::Mean { from, to } => {
            if *from < 2 || from >= to {
                return Err("need 2 <= from < to".into());
            }
            let r = heuristics::mean_stopping_time(*from, *to).map_err(|e| e.to_string())?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "lo": r.lo, "hi": r.hi, "count": r.count,
                        "mean_m": r.mean_m(6), "mean_m1": r.mean_m1(6),
                        "odd_count": r.odd_count,
                        "odd_mean_m": r.odd_mean_m(6), "odd_mean_m1": r.odd_mean_m1(6),
                    })
                );
            } else {
                print!("{}", runner::render_mean(&r));
            }
            Ok(EXIT_OK)
        }
        HeuristicsCmd::Heightprobe { upto, k } => {
            if *upto < 2 || *k < 1 {
                return Err("need --upto >= 2 and --k >= 1".into());
            }
            let p = heuristics::height_bound_probe(*upto, *k).map_err(|e| e.to_string())?;
            if cli.json {
                let violations: Vec<_> = p
                    .violations
                    .iter()
                    .map(|v| {
                        json!({
                            "n": v.n,
                            "max_height": v.max_height.to_string(),
                            "bound": v.bound.to_string(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({
                        "upto": p.upto, "k": p.k_const,
                        "violations": violations,
                        "max_ratio": {
                            "n": p.max_ratio.0,
                            "max_height": p.max_ratio.1.to_string(),
                            "n_squared": p.max_ratio.2.to_string(),
                        },
                    })
                );
            } else {
                println!("upto={} k={} violations={}", p.upto, p.k_const, p.violations.len());
                for v in &p.violations {
                    println!("violation n={} max_height={} bound={}", v.n, v.max_height, v.bound);
                }
                println!(
                    "max_ratio n={} max_height={} n_squared={}",
                    p.max_ratio.0, p.max_ratio.1, p.max_ratio.2
                );
            }
            Ok(EXIT_OK)
        }
    }
}

fn run_verify(cli: &Cli, args: &VerifyArgs) -> Result<u8, String> {
    if args.from < 2 {
        return Err("--from must be at least 2 (nothing to verify below 2)".into());
    }
    if args.from >= args.to {
        return Err("need --from < --to".into());
    }
    if args.sieve_bits < 1 || args.sieve_bits > sieve::MAX_SIEVE_BITS {
        return Err(format!("--sieve-bits must be in 1..={}", sieve::MAX_SIEVE_BITS));
    }
    let task = TaskSpec::Verify { sieve_bits: args.sieve_bits };
    let plan = runner::plan(args.from, args.to, task, runner::DEFAULT_CHUNK)
        .map_err(|e| e.to_string())?;
    let opts = ExecuteOptions {
        workers: args.workers.unwrap_or_else(runner::default_workers),
        checkpoint: args.checkpoint.clone(),
        step_limit: args.step_limit,
        ..Default::default()
    };
    match runner::execute(&plan, &opts) {
        Ok(TaskReport::Verify(report)) => {
            if cli.json {
                println!("{}", verify_json(&report));
            } else {
                print!("{}", report.render());
                println!("wall_time_ms={}", report.wall_time.as_millis());
            }
            Ok(if report.counterexample_candidates.is_empty() {
                EXIT_OK
            } else {
                EXIT_CANDIDATE
            })
        }
        Ok(_) => unreachable!("verify plan produced a non-verify report"),
        Err(RunnerError::CheckpointCorrupt(msg)) => {
            eprintln!("error: checkpoint corrupt: {msg}");
            Ok(EXIT_CHECKPOINT)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn render_trend(t: &TrendReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "task=census-trend kmax={}", t.points.last().map_or(0, |p| p.0));
    for (k, x) in &t.points {
        let ratio = t
            .growth_ratios
            .iter()
            .find(|(rk, _, _)| rk + 1 == *k)
            .map(|(_, num, den)| {
                collatz_core::decimal::decimal_string(
                    &BigUint::from(*num),
                    &BigUint::from(*den),
                    4,
                )
            });
        match ratio {
            Some(r) => {
                let _ = writeln!(out, "K={k} x={x} growth_from_prev={r}");
            }
            None => {
                let _ = writeln!(out, "K={k} x={x}");
            }
        }
    }
    let _ = writeln!(
        out,
        "first_zero_level={} tail_decreasing={} tail_growth_decaying={}",
        t.first_zero_level.map_or("none".to_string(), |k| k.to_string()),
        t.tail_decreasing,
        t.tail_growth_decaying
    );
    out
}

fn trend_json(t: &TrendReport) -> serde_json::Value {
    json!({
        "points": t.points.iter().map(|&(k, x)| json!({"k": k, "x": x})).collect::<Vec<_>>(),
        "growth_ratios": t.growth_ratios.iter()
            .map(|&(k, num, den)| json!({"k": k, "x_next": num, "x": den}))
            .collect::<Vec<_>>(),
        "first_zero_level": t.first_zero_level,
        "tail_decreasing": t.tail_decreasing,
        "tail_growth_decaying": t.tail_growth_decaying,
    })
}

fn census_json(r: &CensusReport, list: bool) -> serde_json::Value {
    let mut doc = json!({
        "k": r.k,
        "population": r.population,
        "x": r.x,
        "max_m2": r.max_m2,
        "premise_holds": r.premise_holds,
        "sample_capped": r.sample_capped,
    });
    if list {
        doc["violators"] = json!(r.violators_sample);
    }
    doc
}

fn render_known_records(r: &KnownRecordsReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for c in &r.checks {
        let _ = writeln!(
            out,
            "check={} n={} expected={} computed={} match={}",
            c.label, c.n, c.expected, c.computed, c.matched
        );
    }
    let _ = writeln!(out, "all_match={}", r.all_match());
    out
}

fn known_records_json(r: &KnownRecordsReport) -> serde_json::Value {
    json!({
        "checks": r.checks.iter().map(|c| json!({
            "check": c.label,
            "n": c.n.to_string(),
            "expected": c.expected,
            "computed": c.computed,
            "match": c.matched,
        })).collect::<Vec<_>>(),
        "all_match": r.all_match(),
    })
}

fn verify_json(r: &VerifyReport) -> serde_json::Value {
    json!({
        "lo": r.lo,
        "hi": r.hi,
        "sieve_bits": r.sieve_bits,
        "flights_simulated": r.flights_simulated,
        "flights_skipped_by_sieve": r.flights_skipped_by_sieve,
        "counterexample_candidates": r.counterexample_candidates,
        "wall_time_ms": r.wall_time.as_millis() as u64,
    })
}
