//! Violator census: for a bound K, count the starts below 2^K whose stopping
//! time needs more than K even transforms, and track how that count moves as
//! K grows.
//!
//! If some level K ever comes back with zero violators, every larger start
//! inherits the bound and the conjecture follows; the census machinery is the
//! instrument for probing that hypothesis at desk scale. The carry rule (new
//! violators above 2^k can only be lifted old ones or 2^k itself) is checked
//! and reported rather than assumed.

use crate::par;
use crate::sieve::{SieveLadder, SieveTable};
use crate::trajectory::stopping_u64;
use crate::StepLimitExceeded;
use std::collections::HashSet;
use thiserror::Error;

/// Levels up to this keep complete violator lists; above it reports hold a
/// deterministic 4096-element sample.
pub const FULL_LIST_MAX_K: u32 = 24;
pub const SAMPLE_CAP: usize = 4096;

/// Desk-scale cap on census levels.
pub const MAX_CENSUS_K: u32 = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusReport {
    pub k: u32,
    /// Starts with a defined stopping time below 2^K, i.e. 2^K - 2.
    pub population: u64,
    /// Count of n in [2, 2^K) with m2(n) > K.
    pub x: u64,
    /// Violators in ascending order; complete when `sample_capped` is false.
    pub violators_sample: Vec<u64>,
    pub sample_capped: bool,
    /// Largest m2 among simulated flights (for any K with violators this is
    /// the global maximum, since the maximizer itself violates).
    pub max_m2: u64,
    /// x == 0: the induction premise holds at this level.
    pub premise_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftReport {
    pub k: u32,
    /// Violators at level k shifted by +2^k, plus the value 2^k itself.
    pub carried_candidates: u64,
    /// Lifted violators i + 2^k that satisfy m2 <= k+1.
    pub became_compliant: u64,
    /// became_compliant / max(1, x(k)).
    pub lift_fraction: (u64, u64),
    /// Violators of level k+1 inside [2^k, 2^(k+1)) that are NOT 2^k and NOT
    /// lifted level-k violators. Non-empty would contradict the carry rule.
    pub carry_violations: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrendReport {
    /// (K, x(K)) for K = 1..=k_max.
    pub points: Vec<(u32, u64)>,
    /// (K, x(K+1), x(K)) growth ratios, present only where x(K) > 0.
    pub growth_ratios: Vec<(u32, u64, u64)>,
    /// Smallest N >= 2 with x(N) = 0, if any was seen.
    pub first_zero_level: Option<u32>,
    /// x non-increasing across the tail half of the computed levels.
    pub tail_decreasing: bool,
    /// Growth ratios non-increasing across the tail half of the ratio list.
    pub tail_growth_decaying: bool,
}

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    StepLimit(#[from] StepLimitExceeded),
    #[error("violator list for level {k} was sampled, not complete; lift analysis needs full lists")]
    IncompleteViolatorList { k: u32 },
}

/// Partial census over one subrange; merging is a sum plus ordered
/// concatenation, so any chunking yields the same report.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct CensusPartial {
    pub x: u64,
    pub violators: Vec<u64>,
    pub capped: bool,
    pub max_m2: u64,
}

pub(crate) fn census_unit(
    lo: u64,
    hi: u64,
    k: u32,
    table: Option<&SieveTable>,
    step_limit: u64,
    keep_full: bool,
) -> Result<CensusPartial, StepLimitExceeded> {
    let mut part = CensusPartial::default();
    for n in lo.max(2)..hi {
        if let Some(t) = table {
            if n >= t.modulus() && t.is_skippable(n) {
                // eliminated classes satisfy m2 <= bits <= K: compliant
                continue;
            }
        }
        let s = stopping_u64(n, step_limit)?;
        part.max_m2 = part.max_m2.max(s.m2);
        if s.m2 > k as u64 {
            part.x += 1;
            if keep_full || part.violators.len() < SAMPLE_CAP {
                part.violators.push(n);
            } else {
                part.capped = true;
            }
        }
    }
    Ok(part)
}

pub(crate) fn merge_census_partials(parts: Vec<CensusPartial>, keep_full: bool) -> CensusPartial {
    let mut merged = CensusPartial::default();
    for p in parts {
        merged.x += p.x;
        merged.max_m2 = merged.max_m2.max(p.max_m2);
        merged.capped |= p.capped;
        // parts arrive in range order, so plain extension keeps n ascending
        merged.violators.extend(p.violators);
        if !keep_full && merged.violators.len() > SAMPLE_CAP {
            merged.violators.truncate(SAMPLE_CAP);
            merged.capped = true;
        }
    }
    merged
}

pub(crate) fn report_from_partial(k: u32, merged: CensusPartial) -> CensusReport {
    let population = (1u64 << k) - 2;
    CensusReport {
        k,
        population,
        x: merged.x,
        premise_holds: merged.x == 0,
        violators_sample: merged.violators,
        sample_capped: merged.capped,
        max_m2: merged.max_m2,
    }
}

/// Exhaustively classify every n in [2, 2^K). With a table, residues it
/// eliminates are counted compliant without simulation; the result is
/// identical either way.
pub fn census(k: u32, table: Option<&SieveTable>) -> Result<CensusReport, StepLimitExceeded> {
    census_with_limit(k, table, crate::trajectory::DEFAULT_STEP_LIMIT)
}

pub fn census_with_limit(
    k: u32,
    table: Option<&SieveTable>,
    step_limit: u64,
) -> Result<CensusReport, StepLimitExceeded> {
    assert!((1..=MAX_CENSUS_K).contains(&k), "census level must be in 1..={MAX_CENSUS_K}");
    if let Some(t) = table {
        assert!(t.bits() <= k, "sieve level must not exceed the census bound");
    }
    let keep_full = k <= FULL_LIST_MAX_K;
    let chunks = par::split_range(2, 1u64 << k, par::RANGE_CHUNK);
    let parts = par::map_ordered(&chunks, |&(lo, hi)| {
        census_unit(lo, hi, k, table, step_limit, keep_full)
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(report_from_partial(k, merge_census_partials(parts, keep_full)))
}

/// Which level-k violators become compliant when lifted by +2^k, and whether
/// any new-interval violator falls outside the carry rule.
pub fn lift_analysis(
    prev: &CensusReport,
    next: &CensusReport,
) -> Result<LiftReport, CensusError> {
    assert_eq!(prev.k + 1, next.k, "lift analysis needs consecutive levels");
    if prev.sample_capped {
        return Err(CensusError::IncompleteViolatorList { k: prev.k });
    }
    if next.sample_capped {
        return Err(CensusError::IncompleteViolatorList { k: next.k });
    }
    let k = prev.k;
    let base = 1u64 << k;
    let mut became_compliant = 0u64;
    for &i in &prev.violators_sample {
        let lifted = i + base;
        let s = stopping_u64(lifted, crate::trajectory::DEFAULT_STEP_LIMIT)?;
        if s.m2 <= (k + 1) as u64 {
            became_compliant += 1;
        }
    }
    let prev_set: HashSet<u64> = prev.violators_sample.iter().copied().collect();
    let carry_violations: Vec<u64> = next
        .violators_sample
        .iter()
        .copied()
        .filter(|&v| v >= base && v < base * 2)
        .filter(|&v| v != base && !prev_set.contains(&(v - base)))
        .collect();
    Ok(LiftReport {
        k,
        carried_candidates: prev.x + 1,
        became_compliant,
        lift_fraction: (became_compliant, prev.x.max(1)),
        carry_violations,
    })
}

/// x(K) for K = 1..=k_max in one pass: each n's m2 is computed once and the
/// count of every level it violates is incremented. A sieve ladder skips n
/// whose m2 is provably at most their own bit length.
pub fn trend(k_max: u32) -> Result<TrendReport, StepLimitExceeded> {
    assert!((1..=MAX_CENSUS_K).contains(&k_max));
    let ladder_bits = k_max.min(16);
    let ladder = crate::sieve::build_ladder(ladder_bits);
    let chunks = par::split_range(2, 1u64 << k_max, par::RANGE_CHUNK);
    let parts = par::map_ordered(&chunks, |&(lo, hi)| {
        trend_unit(lo, hi, k_max, &ladder)
    });
    let mut x = vec![0u64; k_max as usize + 1];
    for part in parts {
        let part = part?;
        for (k, v) in x.iter_mut().zip(part) {
            *k += v;
        }
    }
    let points: Vec<(u32, u64)> = (1..=k_max).map(|k| (k, x[k as usize])).collect();
    let growth_ratios: Vec<(u32, u64, u64)> = (1..k_max)
        .filter(|&k| x[k as usize] > 0)
        .map(|k| (k, x[k as usize + 1], x[k as usize]))
        .collect();
    let first_zero_level = points.iter().find(|&&(k, v)| k >= 2 && v == 0).map(|&(k, _)| k);
    Ok(TrendReport {
        tail_decreasing: tail_non_increasing(&points.iter().map(|&(_, v)| v).collect::<Vec<_>>()),
        tail_growth_decaying: tail_non_increasing_ratios(&growth_ratios),
        points,
        growth_ratios,
        first_zero_level,
    })
}

fn trend_unit(lo: u64, hi: u64, k_max: u32, ladder: &SieveLadder) -> Result<Vec<u64>, StepLimitExceeded> {
    let mut x = vec![0u64; k_max as usize + 1];
    for n in lo.max(2)..hi {
        if ladder.is_skippable(n) {
            continue;
        }
        let m2 = stopping_u64(n, crate::trajectory::DEFAULT_STEP_LIMIT)?.m2;
        // n violates level K exactly when n < 2^K and m2 > K
        let lowest = 64 - n.leading_zeros() as u64; // smallest K with n < 2^K
        let mut level = lowest;
        while level < m2 && level <= k_max as u64 {
            x[level as usize] += 1;
            level += 1;
        }
    }
    Ok(x)
}

/// Non-increasing across the tail half (at least one step) of the sequence.
fn tail_non_increasing(values: &[u64]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let from = values.len() / 2;
    let tail = &values[from.min(values.len() - 2)..];
    tail.windows(2).all(|w| w[1] <= w[0])
}

fn tail_non_increasing_ratios(ratios: &[(u32, u64, u64)]) -> bool {
    if ratios.len() < 2 {
        return false;
    }
    let vals: Vec<(u128, u128)> = ratios.iter().map(|&(_, num, den)| (num as u128, den as u128)).collect();
    let from = vals.len() / 2;
    let tail = &vals[from.min(vals.len() - 2)..];
    tail.windows(2).all(|w| {
        let (n1, d1) = w[0];
        let (n2, d2) = w[1];
        n2 * d1 <= n1 * d2
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::build_sieve;

    #[test]
    fn census_small_levels_match_direct_simulation() {
        let expected: [(u32, u64, &[u64]); 5] = [
            (1, 0, &[]),
            (2, 1, &[3]),
            (3, 2, &[3, 7]),
            (4, 3, &[7, 11, 15]),
            (5, 4, &[7, 15, 27, 31]),
        ];
        for (k, x, violators) in expected {
            let report = census(k, None).unwrap();
            assert_eq!(report.x, x, "K={k}");
            assert_eq!(report.violators_sample, violators, "K={k}");
            assert_eq!(report.population, (1u64 << k) - 2);
            assert_eq!(report.premise_holds, x == 0);
            assert!(!report.sample_capped);
        }
    }

    #[test]
    fn census_with_sieve_is_identical() {
        for k in 2..=12u32 {
            let brute = census(k, None).unwrap();
            for bits in [1, 2, k.min(8)] {
                let table = build_sieve(bits);
                let sieved = census(k, Some(&table)).unwrap();
                assert_eq!(brute, sieved, "K={k} bits={bits}");
            }
        }
    }

    #[test]
    fn lift_examples() {
        let reports: Vec<CensusReport> = (1..=6).map(|k| census(k, None).unwrap()).collect();
        // k=3: violators {3, 7} lift to {11, 15}; both still violate at K=4
        let lift = lift_analysis(&reports[2], &reports[3]).unwrap();
        assert_eq!(lift.became_compliant, 0);
        assert_eq!(lift.lift_fraction, (0, 2));
        assert_eq!(lift.carried_candidates, 3);
        assert!(lift.carry_violations.is_empty());
        // k=4: violators {7, 11, 15} lift to {23, 27, 31}; 23 becomes compliant
        let lift = lift_analysis(&reports[3], &reports[4]).unwrap();
        assert_eq!(lift.became_compliant, 1);
        assert_eq!(lift.lift_fraction, (1, 3));
        assert!(lift.carry_violations.is_empty());
        // k=1: no violators; fraction renders over max(1, 0)
        let lift = lift_analysis(&reports[0], &reports[1]).unwrap();
        assert_eq!(lift.became_compliant, 0);
        assert_eq!(lift.lift_fraction, (0, 1));
        assert_eq!(lift.carried_candidates, 1);
    }

    #[test]
    fn lift_rejects_sampled_lists() {
        let mut prev = census(3, None).unwrap();
        let next = census(4, None).unwrap();
        prev.sample_capped = true;
        assert!(matches!(
            lift_analysis(&prev, &next),
            Err(CensusError::IncompleteViolatorList { k: 3 })
        ));
    }

    #[test]
    fn trend_prefix_and_ratios() {
        let t = trend(5).unwrap();
        assert_eq!(t.points, vec![(1, 0), (2, 1), (3, 2), (4, 3), (5, 4)]);
        assert_eq!(t.growth_ratios, vec![(2, 2, 1), (3, 3, 2), (4, 4, 3)]);
        assert_eq!(t.first_zero_level, None);

        let t1 = trend(1).unwrap();
        assert_eq!(t1.points, vec![(1, 0)]);
        assert!(t1.growth_ratios.is_empty());
        assert!(!t1.tail_decreasing);
    }

    #[test]
    fn trend_matches_per_level_census() {
        let t = trend(10).unwrap();
        for (k, x) in t.points {
            assert_eq!(census(k, None).unwrap().x, x, "K={k}");
        }
    }

    #[test]
    fn monotone_membership() {
        // a violator at level K below 2^(K-1) was already a violator at K-1
        for k in 2..=12u32 {
            let prev = census(k - 1, None).unwrap();
            let cur = census(k, None).unwrap();
            let prev_set: HashSet<u64> = prev.violators_sample.iter().copied().collect();
            for &v in cur.violators_sample.iter().filter(|&&v| v < (1u64 << (k - 1))) {
                assert!(prev_set.contains(&v), "K={k} v={v}");
            }
        }
    }

    #[test]
    fn violators_reduce_to_sieve_survivors() {
        let report = census(12, None).unwrap();
        for bits in 1..=12u32 {
            let table = build_sieve(bits);
            for &v in &report.violators_sample {
                if v >= table.modulus() {
                    assert!(
                        table.is_survivor_residue(v & (table.modulus() - 1)),
                        "bits={bits} v={v}"
                    );
                }
            }
        }
    }
}
