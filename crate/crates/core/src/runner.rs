//! Parallel, resumable range execution.
//!
//! A plan covers [lo, hi) with disjoint ascending work units. Units run on a
//! worker pool, each unit's partial result is appended to a checkpoint as it
//! completes, and the final report is merged in unit order — so the merged
//! output is identical for any worker count, any completion order, and any
//! kill/resume split. Checkpoints are line-oriented text, rewritten through a
//! temp file and rename after each unit.

use crate::census::{self, CensusPartial, CensusReport};
use crate::heuristics::{self, MeanReport};
use crate::records::{self, RecordEntry, RecordKind, RecordLog, RecordValue};
use crate::sieve::{build_ladder, SieveLadder, SieveTable};
use crate::trajectory::{stopping_u64, DEFAULT_STEP_LIMIT};
use crate::StepLimitExceeded;
use num_bigint::BigUint;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};
use thiserror::Error;

pub const CHECKPOINT_VERSION: &str = "v1";
pub const DEFAULT_CHUNK: u64 = 1 << 20;
pub const DEFAULT_VERIFY_SIEVE_BITS: u32 = 16;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("empty range [{lo}, {hi})")]
    EmptyRange { lo: u64, hi: u64 },
    #[error("checkpoint corrupt: {0}")]
    CheckpointCorrupt(String),
    #[error("interrupted with {remaining} unit(s) pending")]
    Interrupted { remaining: usize },
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    StepLimit(#[from] StepLimitExceeded),
}

/// What a plan computes over its range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskSpec {
    /// Simulate survivors until they fall below their start.
    Verify { sieve_bits: u32 },
    /// Violator census at level k.
    Census { k: u32, sieve_bits: Option<u32> },
    /// Record scan for one metric.
    Records { kind: RecordKind },
    /// Stopping-time sums.
    Mean,
}

impl TaskSpec {
    /// Single-token form used in checkpoint headers.
    pub fn token(&self) -> String {
        match self {
            TaskSpec::Verify { sieve_bits } => format!("verify:b{sieve_bits}"),
            TaskSpec::Census { k, sieve_bits: Some(b) } => format!("census:k{k}:b{b}"),
            TaskSpec::Census { k, sieve_bits: None } => format!("census:k{k}"),
            TaskSpec::Records { kind } => format!("records:{}", kind.token()),
            TaskSpec::Mean => "mean".to_string(),
        }
    }

    pub fn parse_token(token: &str) -> Option<TaskSpec> {
        if token == "mean" {
            return Some(TaskSpec::Mean);
        }
        if let Some(rest) = token.strip_prefix("verify:b") {
            return rest.parse().ok().map(|sieve_bits| TaskSpec::Verify { sieve_bits });
        }
        if let Some(rest) = token.strip_prefix("records:") {
            return RecordKind::parse(rest).map(|kind| TaskSpec::Records { kind });
        }
        if let Some(rest) = token.strip_prefix("census:k") {
            let mut parts = rest.splitn(2, ":b");
            let k = parts.next()?.parse().ok()?;
            let sieve_bits = match parts.next() {
                Some(b) => Some(b.parse().ok()?),
                None => None,
            };
            return Some(TaskSpec::Census { k, sieve_bits });
        }
        None
    }
}

/// One contiguous slice of the range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkUnit {
    pub lo: u64,
    pub hi: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub task: TaskSpec,
    pub lo: u64,
    pub hi: u64,
    pub chunk: u64,
    pub units: Vec<WorkUnit>,
}

/// Disjoint ascending cover of [lo, hi) in chunks of at most `chunk`.
pub fn plan(lo: u64, hi: u64, task: TaskSpec, chunk: u64) -> Result<Plan, RunnerError> {
    if lo >= hi {
        return Err(RunnerError::EmptyRange { lo, hi });
    }
    assert!(chunk >= 1);
    let units = crate::par::split_range(lo, hi, chunk)
        .into_iter()
        .map(|(lo, hi)| WorkUnit { lo, hi })
        .collect();
    Ok(Plan { task, lo, hi, chunk, units })
}

/// Outcome of a verification scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub lo: u64,
    pub hi: u64,
    pub sieve_bits: u32,
    pub flights_simulated: u64,
    pub flights_skipped_by_sieve: u64,
    /// Starts that hit the step limit before falling below themselves.
    pub counterexample_candidates: Vec<u64>,
    /// Not part of the canonical rendering; differs run to run.
    pub wall_time: Duration,
}

impl VerifyReport {
    /// Canonical text form: deterministic, excludes timing.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "task=verify lo={} hi={} sieve_bits={}",
            self.lo, self.hi, self.sieve_bits
        );
        let _ = writeln!(
            out,
            "flights_simulated={} flights_skipped_by_sieve={} counterexample_candidates={}",
            self.flights_simulated,
            self.flights_skipped_by_sieve,
            self.counterexample_candidates.len()
        );
        for n in &self.counterexample_candidates {
            let _ = writeln!(out, "candidate={n}");
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct VerifyPartial {
    simulated: u64,
    skipped: u64,
    candidates: Vec<u64>,
}

/// Simulate every start in [lo, hi) that the ladder cannot skip, stopping
/// each flight at its first value below the start. Callers are responsible
/// for having verified everything below lo.
pub fn verify_range(lo: u64, hi: u64, ladder: &SieveLadder, step_limit: u64) -> VerifyReport {
    assert!(lo >= 2, "nothing to verify below 2");
    assert!(lo < hi);
    let t0 = Instant::now();
    let part = verify_unit(lo, hi, ladder, step_limit);
    VerifyReport {
        lo,
        hi,
        sieve_bits: ladder.bits(),
        flights_simulated: part.simulated,
        flights_skipped_by_sieve: part.skipped,
        counterexample_candidates: part.candidates,
        wall_time: t0.elapsed(),
    }
}

fn verify_unit(lo: u64, hi: u64, ladder: &SieveLadder, step_limit: u64) -> VerifyPartial {
    let mut part = VerifyPartial::default();
    let top = ladder.top();
    let modulus = top.modulus();
    // below the top modulus, classify per start at its own ladder level
    let prefix_hi = hi.min(modulus);
    for n in lo..prefix_hi {
        if ladder.is_skippable(n) {
            part.skipped += 1;
        } else {
            simulate_for_descent(n, step_limit, &mut part);
        }
    }
    // at or above the modulus, walk survivor residues block by block
    let mut base = (lo.max(modulus) / modulus) * modulus;
    while base < hi {
        let block_lo = lo.max(base);
        let block_hi = hi.min(base + modulus);
        let survivors = top.survivors();
        let from = survivors.partition_point(|&r| base + r < block_lo);
        let mut simulated_here = 0u64;
        for &r in &survivors[from..] {
            let n = base + r;
            if n >= block_hi {
                break;
            }
            simulate_for_descent(n, step_limit, &mut part);
            simulated_here += 1;
        }
        part.skipped += (block_hi - block_lo) - simulated_here;
        base += modulus;
    }
    part
}

#[inline]
fn simulate_for_descent(n: u64, step_limit: u64, part: &mut VerifyPartial) {
    part.simulated += 1;
    if stopping_u64(n, step_limit).is_err() {
        part.candidates.push(n);
    }
}

/// Merged outcome of an executed plan.
#[derive(Clone, Debug)]
pub enum TaskReport {
    Verify(VerifyReport),
    Census(CensusReport),
    Records(RecordLog),
    Mean(MeanReport),
}

impl TaskReport {
    /// Canonical text form: deterministic across worker counts and resumes.
    pub fn render(&self) -> String {
        match self {
            TaskReport::Verify(r) => r.render(),
            TaskReport::Census(r) => render_census(r, false),
            TaskReport::Records(log) => render_records(log),
            TaskReport::Mean(r) => render_mean(r),
        }
    }
}

pub fn render_census(r: &CensusReport, list_violators: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "task=census k={} population={} x={} max_m2={} premise_holds={} sample_capped={}",
        r.k, r.population, r.x, r.max_m2, r.premise_holds, r.sample_capped
    );
    if list_violators {
        for v in &r.violators_sample {
            let _ = writeln!(out, "violator={v}");
        }
    }
    out
}

pub fn render_records(log: &RecordLog) -> String {
    let mut out = String::new();
    for e in &log.entries {
        let _ = writeln!(out, "{}\t{}", e.n, e.value.render());
    }
    out
}

pub fn render_mean(r: &MeanReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "task=mean lo={} hi={} count={} mean_m={} mean_m1={} odd_count={} odd_mean_m={} odd_mean_m1={}",
        r.lo,
        r.hi,
        r.count,
        r.mean_m(6),
        r.mean_m1(6),
        r.odd_count,
        r.odd_mean_m(6),
        r.odd_mean_m1(6),
    );
    out
}

/// Per-unit partial result, serializable into checkpoint lines.
#[derive(Clone, Debug, PartialEq)]
enum UnitOutcome {
    Verify(VerifyPartial),
    Census(CensusPartial),
    Records(Vec<RecordEntry>),
    Mean(MeanReport),
}

fn encode_u64_list(values: &[u64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(":")
}

fn decode_u64_list(s: &str) -> Option<Vec<u64>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(':').map(|v| v.parse().ok()).collect()
}

impl UnitOutcome {
    fn encode(&self) -> String {
        match self {
            UnitOutcome::Verify(p) => format!(
                "sim={},skip={},cand={}",
                p.simulated,
                p.skipped,
                encode_u64_list(&p.candidates)
            ),
            UnitOutcome::Census(p) => format!(
                "x={},max={},capped={},viol={}",
                p.x,
                p.max_m2,
                u8::from(p.capped),
                encode_u64_list(&p.violators)
            ),
            UnitOutcome::Records(entries) => {
                let body = entries
                    .iter()
                    .map(|e| {
                        let v = match &e.value {
                            RecordValue::Count(c) => format!("c{c}"),
                            RecordValue::Height(h) => format!("h{h}"),
                            RecordValue::Ratio { odd_count, even_count } => {
                                format!("r{odd_count}/{even_count}")
                            }
                        };
                        format!("{}*{}", e.n, v)
                    })
                    .collect::<Vec<_>>()
                    .join(":");
                format!("rec={body}")
            }
            UnitOutcome::Mean(r) => format!(
                "cnt={},sm={},sm1={},ocnt={},osm={},osm1={}",
                r.count, r.sum_m, r.sum_m1, r.odd_count, r.odd_sum_m, r.odd_sum_m1
            ),
        }
    }

    fn decode(task: &TaskSpec, lo: u64, hi: u64, payload: &str) -> Option<UnitOutcome> {
        let fields: BTreeMap<&str, &str> = payload
            .split(',')
            .map(|kv| kv.split_once('='))
            .collect::<Option<_>>()?;
        match task {
            TaskSpec::Verify { .. } => Some(UnitOutcome::Verify(VerifyPartial {
                simulated: fields.get("sim")?.parse().ok()?,
                skipped: fields.get("skip")?.parse().ok()?,
                candidates: decode_u64_list(fields.get("cand")?)?,
            })),
            TaskSpec::Census { .. } => Some(UnitOutcome::Census(CensusPartial {
                x: fields.get("x")?.parse().ok()?,
                max_m2: fields.get("max")?.parse().ok()?,
                capped: *fields.get("capped")? == "1",
                violators: decode_u64_list(fields.get("viol")?)?,
            })),
            TaskSpec::Records { .. } => {
                let body = fields.get("rec")?;
                let mut entries = Vec::new();
                if !body.is_empty() {
                    for item in body.split(':') {
                        let (n, v) = item.split_once('*')?;
                        let n: u64 = n.parse().ok()?;
                        let value = match v.split_at(1) {
                            ("c", rest) => RecordValue::Count(rest.parse().ok()?),
                            ("h", rest) => RecordValue::Height(rest.parse::<BigUint>().ok()?),
                            ("r", rest) => {
                                let (o, e) = rest.split_once('/')?;
                                RecordValue::Ratio {
                                    odd_count: o.parse().ok()?,
                                    even_count: e.parse().ok()?,
                                }
                            }
                            _ => return None,
                        };
                        entries.push(RecordEntry { n, value });
                    }
                }
                Some(UnitOutcome::Records(entries))
            }
            TaskSpec::Mean => Some(UnitOutcome::Mean(MeanReport {
                lo,
                hi,
                count: fields.get("cnt")?.parse().ok()?,
                sum_m: fields.get("sm")?.parse().ok()?,
                sum_m1: fields.get("sm1")?.parse().ok()?,
                odd_count: fields.get("ocnt")?.parse().ok()?,
                odd_sum_m: fields.get("osm")?.parse().ok()?,
                odd_sum_m1: fields.get("osm1")?.parse().ok()?,
            })),
        }
    }
}

/// FNV-1a over the header and line body; guards checkpoint lines against
/// truncation and cross-plan mixups, not against adversaries.
fn line_digest(header: &str, body: &str) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in header.bytes().chain("|".bytes()).chain(body.bytes()) {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// Resumable execution state: which units of a plan are done, with their
/// partial results. Rebuilding the merged report from a checkpoint is exact,
/// and re-running a completed unit is idempotent.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub task: TaskSpec,
    pub lo: u64,
    pub hi: u64,
    pub chunk: u64,
    done: BTreeMap<u64, (u64, UnitOutcome)>,
}

impl Checkpoint {
    fn fresh(plan: &Plan) -> Self {
        Checkpoint {
            task: plan.task.clone(),
            lo: plan.lo,
            hi: plan.hi,
            chunk: plan.chunk,
            done: BTreeMap::new(),
        }
    }

    fn header(&self) -> String {
        format!(
            "collatz-probe-ckpt {CHECKPOINT_VERSION} {} {} {} {}",
            self.task.token(),
            self.lo,
            self.hi,
            self.chunk
        )
    }

    pub fn completed_units(&self) -> usize {
        self.done.len()
    }

    fn insert(&mut self, unit: WorkUnit, outcome: UnitOutcome) {
        self.done.insert(unit.lo, (unit.hi, outcome));
    }

    fn matches(&self, plan: &Plan) -> bool {
        self.task == plan.task && self.lo == plan.lo && self.hi == plan.hi && self.chunk == plan.chunk
    }

    fn to_text(&self) -> String {
        let header = self.header();
        let mut out = String::new();
        let _ = writeln!(out, "{header}");
        for (lo, (hi, outcome)) in &self.done {
            let body = format!("done {lo} {hi} {}", outcome.encode());
            let _ = writeln!(out, "{body} {}", line_digest(&header, &body));
        }
        out
    }

    fn write(&self, path: &Path) -> Result<(), RunnerError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_text())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Checkpoint, RunnerError> {
        let corrupt = |msg: String| RunnerError::CheckpointCorrupt(msg);
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| corrupt("missing header".into()))?;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 6 || fields[0] != "collatz-probe-ckpt" {
            return Err(corrupt(format!("bad header: {header}")));
        }
        if fields[1] != CHECKPOINT_VERSION {
            return Err(corrupt(format!("unsupported version {}", fields[1])));
        }
        let task = TaskSpec::parse_token(fields[2])
            .ok_or_else(|| corrupt(format!("unknown task token {}", fields[2])))?;
        let parse_u64 = |s: &str, what: &str| {
            s.parse::<u64>().map_err(|_| corrupt(format!("bad {what}: {s}")))
        };
        let (lo, hi) = (parse_u64(fields[3], "lo")?, parse_u64(fields[4], "hi")?);
        let chunk = parse_u64(fields[5], "chunk")?;
        let mut ckpt = Checkpoint { task, lo, hi, chunk, done: BTreeMap::new() };
        let header = ckpt.header();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let (body, digest) = line
                .rsplit_once(' ')
                .ok_or_else(|| corrupt(format!("bad line: {line}")))?;
            if line_digest(&header, body) != digest {
                return Err(corrupt(format!("digest mismatch on: {body}")));
            }
            let mut parts = body.splitn(4, ' ');
            if parts.next() != Some("done") {
                return Err(corrupt(format!("bad record: {body}")));
            }
            let ulo = parse_u64(parts.next().ok_or_else(|| corrupt("short line".into()))?, "unit lo")?;
            let uhi = parse_u64(parts.next().ok_or_else(|| corrupt("short line".into()))?, "unit hi")?;
            let payload = parts.next().ok_or_else(|| corrupt("missing payload".into()))?;
            let outcome = UnitOutcome::decode(&ckpt.task, ulo, uhi, payload)
                .ok_or_else(|| corrupt(format!("bad payload: {payload}")))?;
            ckpt.done.insert(ulo, (uhi, outcome));
        }
        Ok(ckpt)
    }
}

#[derive(Clone, Debug)]
pub struct ExecuteOptions {
    /// Worker threads; 1 is fully sequential.
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Stop (with an Interrupted error) after completing this many pending
    /// units; used to exercise kill/resume behavior.
    pub stop_after_units: Option<usize>,
    pub step_limit: u64,
}

impl Default for ExecuteOptions {
    fn default() -> Self {
        ExecuteOptions {
            workers: default_workers(),
            checkpoint: None,
            stop_after_units: None,
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1)
}

struct TaskContext {
    ladder: Option<SieveLadder>,
    table: Option<SieveTable>,
    keep_full: bool,
}

impl TaskContext {
    fn prepare(task: &TaskSpec) -> TaskContext {
        match task {
            TaskSpec::Verify { sieve_bits } => TaskContext {
                ladder: Some(build_ladder(*sieve_bits)),
                table: None,
                keep_full: false,
            },
            TaskSpec::Census { k, sieve_bits } => TaskContext {
                ladder: None,
                table: sieve_bits.map(crate::sieve::build_sieve),
                keep_full: *k <= census::FULL_LIST_MAX_K,
            },
            _ => TaskContext { ladder: None, table: None, keep_full: false },
        }
    }
}

fn run_unit(
    task: &TaskSpec,
    ctx: &TaskContext,
    unit: WorkUnit,
    step_limit: u64,
) -> Result<UnitOutcome, StepLimitExceeded> {
    match task {
        TaskSpec::Verify { .. } => Ok(UnitOutcome::Verify(verify_unit(
            unit.lo,
            unit.hi,
            ctx.ladder.as_ref().expect("verify context"),
            step_limit,
        ))),
        TaskSpec::Census { k, .. } => Ok(UnitOutcome::Census(census::census_unit(
            unit.lo,
            unit.hi,
            *k,
            ctx.table.as_ref(),
            step_limit,
            ctx.keep_full,
        )?)),
        TaskSpec::Records { kind } => Ok(UnitOutcome::Records(records::scan_chunk(
            unit.lo, unit.hi, *kind, step_limit,
        )?)),
        TaskSpec::Mean => Ok(UnitOutcome::Mean(heuristics::mean_unit(
            unit.lo, unit.hi, step_limit,
        )?)),
    }
}

/// Run a plan to completion (or to `stop_after_units`), checkpointing after
/// every finished unit, then merge in unit order.
pub fn execute(plan: &Plan, opts: &ExecuteOptions) -> Result<TaskReport, RunnerError> {
    let t0 = Instant::now();
    if let TaskSpec::Mean = plan.task {
        assert!(plan.lo >= 2);
    }
    if let TaskSpec::Verify { .. } = plan.task {
        assert!(plan.lo >= 2);
    }
    let mut checkpoint = match &opts.checkpoint {
        Some(path) if path.exists() => {
            let loaded = Checkpoint::read(path)?;
            if !loaded.matches(plan) {
                return Err(RunnerError::CheckpointCorrupt(format!(
                    "checkpoint describes plan '{}' over [{}, {}) chunk {}, not this one",
                    loaded.task.token(),
                    loaded.lo,
                    loaded.hi,
                    loaded.chunk
                )));
            }
            loaded
        }
        _ => Checkpoint::fresh(plan),
    };
    // drop stale completions that no longer line up with the unit grid
    let valid: Vec<WorkUnit> = plan
        .units
        .iter()
        .copied()
        .filter(|u| matches!(checkpoint.done.get(&u.lo), Some((hi, _)) if *hi == u.hi))
        .collect();
    let ctx = TaskContext::prepare(&plan.task);

    let pending: Vec<WorkUnit> = plan
        .units
        .iter()
        .copied()
        .filter(|u| !valid.iter().any(|v| v.lo == u.lo))
        .collect();
    let take = opts.stop_after_units.unwrap_or(pending.len()).min(pending.len());
    let batch = &pending[..take];

    let sink: Mutex<(&mut Checkpoint, Option<RunnerError>)> = Mutex::new((&mut checkpoint, None));
    let record = |unit: WorkUnit, result: Result<UnitOutcome, StepLimitExceeded>| {
        let mut guard = sink.lock().expect("collector lock");
        let (ckpt, first_error) = &mut *guard;
        match result {
            Ok(outcome) => {
                ckpt.insert(unit, outcome);
                if let Some(path) = &opts.checkpoint {
                    if let Err(e) = ckpt.write(path) {
                        if first_error.is_none() {
                            *first_error = Some(e);
                        }
                    }
                }
            }
            Err(e) => {
                if first_error.is_none() {
                    *first_error = Some(RunnerError::StepLimit(e));
                }
            }
        }
    };

    run_batch(batch, opts.workers, |unit| {
        record(*unit, run_unit(&plan.task, &ctx, *unit, opts.step_limit));
    });

    let (_, error) = Mutex::into_inner(sink).expect("collector lock");
    if let Some(e) = error {
        return Err(e);
    }
    if take < pending.len() {
        return Err(RunnerError::Interrupted { remaining: pending.len() - take });
    }
    merge_report(plan, &checkpoint, t0.elapsed())
}

#[cfg(feature = "parallel")]
fn run_batch<F>(batch: &[WorkUnit], workers: usize, f: F)
where
    F: Fn(&WorkUnit) + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("worker pool");
    pool.install(|| batch.par_iter().for_each(f));
}

#[cfg(not(feature = "parallel"))]
fn run_batch<F>(batch: &[WorkUnit], _workers: usize, f: F)
where
    F: Fn(&WorkUnit) + Sync,
{
    batch.iter().for_each(f);
}

fn merge_report(plan: &Plan, checkpoint: &Checkpoint, wall: Duration) -> Result<TaskReport, RunnerError> {
    let outcomes: Vec<&UnitOutcome> = plan
        .units
        .iter()
        .map(|u| {
            checkpoint
                .done
                .get(&u.lo)
                .map(|(_, outcome)| outcome)
                .ok_or_else(|| RunnerError::CheckpointCorrupt(format!("missing unit at {}", u.lo)))
        })
        .collect::<Result<_, _>>()?;
    Ok(match &plan.task {
        TaskSpec::Verify { sieve_bits } => {
            let mut merged = VerifyPartial::default();
            for o in outcomes {
                let UnitOutcome::Verify(p) = o else {
                    return Err(RunnerError::CheckpointCorrupt("outcome kind mismatch".into()));
                };
                merged.simulated += p.simulated;
                merged.skipped += p.skipped;
                merged.candidates.extend(&p.candidates);
            }
            TaskReport::Verify(VerifyReport {
                lo: plan.lo,
                hi: plan.hi,
                sieve_bits: *sieve_bits,
                flights_simulated: merged.simulated,
                flights_skipped_by_sieve: merged.skipped,
                counterexample_candidates: merged.candidates,
                wall_time: wall,
            })
        }
        TaskSpec::Census { k, .. } => {
            let parts: Vec<CensusPartial> = outcomes
                .into_iter()
                .map(|o| match o {
                    UnitOutcome::Census(p) => Ok(p.clone()),
                    _ => Err(RunnerError::CheckpointCorrupt("outcome kind mismatch".into())),
                })
                .collect::<Result<_, _>>()?;
            let keep_full = *k <= census::FULL_LIST_MAX_K;
            TaskReport::Census(census::report_from_partial(
                *k,
                census::merge_census_partials(parts, keep_full),
            ))
        }
        TaskSpec::Records { kind } => {
            let mut log = RecordLog::new(*kind, plan.lo);
            for o in outcomes {
                let UnitOutcome::Records(entries) = o else {
                    return Err(RunnerError::CheckpointCorrupt("outcome kind mismatch".into()));
                };
                records::merge_candidates(*kind, &mut log, entries.clone());
            }
            log.scanned_up_to = plan.hi;
            TaskReport::Records(log)
        }
        TaskSpec::Mean => {
            let parts: Vec<MeanReport> = outcomes
                .into_iter()
                .map(|o| match o {
                    UnitOutcome::Mean(p) => Ok(p.clone()),
                    _ => Err(RunnerError::CheckpointCorrupt("outcome kind mismatch".into())),
                })
                .collect::<Result<_, _>>()?;
            TaskReport::Mean(heuristics::merge_mean(plan.lo, plan.hi, parts))
        }
    })
}
