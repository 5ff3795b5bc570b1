//! Collatz (3x+1) verification and conjecture-probing toolkit.
//!
//! Exact trajectory profiles for arbitrarily large starts, residue-class
//! sieves over power-of-two moduli, stopping-time violator censuses, record
//! scans, heuristic-model statistics, and a parallel resumable range runner.
//! All correctness paths use exact integer arithmetic; decimals appear only
//! in rendered output.
//!
//! The scan loops are data-parallel via rayon behind the default `parallel`
//! feature; building with `--no-default-features` produces a sequential
//! binary with identical output.

pub mod census;
pub mod decimal;
pub mod heuristics;
mod par;
pub mod records;
pub mod runner;
pub mod sieve;
pub mod trajectory;

use num_bigint::BigUint;
use thiserror::Error;

/// No value below the start (or below 1, for full flights) was found within
/// the step budget: either the limit is too small or the start is a
/// counterexample candidate. Carries the partial profile at abandonment.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error(
    "no descent within {limit} transforms from {start} (m1={m1}, m2={m2}, current value has {} bits)",
    current.bits()
)]
pub struct StepLimitExceeded {
    pub start: BigUint,
    pub limit: u64,
    pub m1: u64,
    pub m2: u64,
    pub current: BigUint,
}

pub use census::{census, lift_analysis, trend, CensusReport, LiftReport, TrendReport};
pub use records::{scan_records, verify_known_records, RecordKind, RecordLog};
pub use runner::{execute, plan, verify_range, ExecuteOptions, Plan, TaskReport, TaskSpec, VerifyReport};
pub use sieve::{advance, build_ladder, build_sieve, AffineClass, SieveLadder, SieveTable};
pub use trajectory::{
    collatz_step, flight_profile, oe_ratio, stopping_profile, OeRatio, StoppingProfile,
    TrajectoryProfile, DEFAULT_STEP_LIMIT,
};
