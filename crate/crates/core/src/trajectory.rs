//! Exact Collatz trajectory engine.
//!
//! Every operation here is a pure function of its arguments and computes with
//! exact integers only. The hot paths run in u64, promote to u128 on overflow
//! and finally to [`BigUint`]; all three tiers apply the identical recurrence,
//! so profiles are bit-identical regardless of which tier a flight touches
//! (see [`reference`] for the pure-bignum route used as the independent check).

use crate::StepLimitExceeded;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Upper bound on transforms before an evaluation is abandoned as a
/// counterexample candidate. Exceeding it is an error, never a truncation.
pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

/// Stopping-time summary: transforms until the first value below the start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoppingProfile {
    pub start: BigUint,
    /// Total transforms; `m = m1 + m2` whenever `defined`.
    pub m: u64,
    /// Odd transforms (x -> 3x+1).
    pub m1: u64,
    /// Even transforms (x -> x/2).
    pub m2: u64,
    /// First value strictly below `start`.
    pub landing: BigUint,
    /// False only for start 1, whose trajectory never falls below itself.
    pub defined: bool,
}

/// Full-flight summary: transforms until the value 1 is reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryProfile {
    pub start: BigUint,
    /// Total transforms to reach 1; 0 for start 1 by definition.
    pub route: u64,
    /// Largest value visited, the start included.
    pub max_height: BigUint,
    pub odd_count: u64,
    pub even_count: u64,
}

/// Exact odd/even transform counts over a full flight, with decimal rendering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OeRatio {
    pub start: BigUint,
    pub odd_count: u64,
    pub even_count: u64,
}

impl OeRatio {
    pub fn decimal(&self, places: u32) -> String {
        crate::decimal::decimal_string(
            &BigUint::from(self.odd_count),
            &BigUint::from(self.even_count),
            places,
        )
    }

    /// Exact integer-arithmetic form of O/E < log2/log3.
    pub fn below_log2_log3(&self) -> bool {
        crate::decimal::ratio_below_log2_log3(self.odd_count, self.even_count)
    }
}

/// Stopping summary for u64 starts on the scan path. `landing < n` always
/// fits back into u64 even when the excursion above needed wider arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StoppingSummary {
    pub m: u64,
    pub m1: u64,
    pub m2: u64,
    pub landing: u64,
}

/// Flight summary for u64 starts on the scan path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlightSummary {
    pub route: u64,
    pub odd_count: u64,
    pub even_count: u64,
    pub max_height: BigUint,
}

/// One transform: 3x+1 for odd x, x/2 for even x.
pub fn collatz_step(x: &BigUint) -> BigUint {
    assert!(!x.is_zero(), "collatz_step: x must be >= 1");
    if x.bit(0) {
        x * 3u32 + 1u32
    } else {
        x >> 1
    }
}

pub fn stopping_profile(n: &BigUint, step_limit: u64) -> Result<StoppingProfile, StepLimitExceeded> {
    assert!(!n.is_zero(), "flight start must be >= 1");
    assert!(step_limit >= 1);
    if n.is_one() {
        return Ok(StoppingProfile {
            start: n.clone(),
            m: 0,
            m1: 0,
            m2: 0,
            landing: n.clone(),
            defined: false,
        });
    }
    if let Some(small) = n.to_u64() {
        let s = stopping_u64(small, step_limit)?;
        return Ok(StoppingProfile {
            start: n.clone(),
            m: s.m,
            m1: s.m1,
            m2: s.m2,
            landing: BigUint::from(s.landing),
            defined: true,
        });
    }
    if let Some(wide) = n.to_u128() {
        let (m1, m2, landing) = match stop_loop_u128(wide, wide, 0, 0, step_limit) {
            StopFlowU128::Landed { m1, m2, landing } => (m1, m2, BigUint::from(landing)),
            StopFlowU128::Overflowed { m1, m2, pre_step } => {
                let cur = BigUint::from(pre_step) * 3u32 + 1u32;
                stop_loop_big(n, cur, m1 + 1, m2, step_limit)?
            }
            StopFlowU128::Limit { m1, m2, current } => {
                return Err(StepLimitExceeded {
                    start: n.clone(),
                    limit: step_limit,
                    m1,
                    m2,
                    current: BigUint::from(current),
                })
            }
        };
        return Ok(StoppingProfile { start: n.clone(), m: m1 + m2, m1, m2, landing, defined: true });
    }
    let (m1, m2, landing) = stop_loop_big(n, n.clone(), 0, 0, step_limit)?;
    Ok(StoppingProfile { start: n.clone(), m: m1 + m2, m1, m2, landing, defined: true })
}

/// Scan-grade stopping evaluation for starts that fit u64 (n >= 2).
pub fn stopping_u64(n: u64, step_limit: u64) -> Result<StoppingSummary, StepLimitExceeded> {
    debug_assert!(n >= 2);
    let mut cur = n;
    let mut m1 = 0u64;
    let mut m2 = 0u64;
    while m1 + m2 < step_limit {
        if cur & 1 == 1 {
            match cur.checked_mul(3).and_then(|v| v.checked_add(1)) {
                Some(v) => {
                    cur = v;
                    m1 += 1;
                }
                None => {
                    let wide = 3u128 * cur as u128 + 1;
                    return match stop_loop_u128(n as u128, wide, m1 + 1, m2, step_limit) {
                        StopFlowU128::Landed { m1, m2, landing } => Ok(StoppingSummary {
                            m: m1 + m2,
                            m1,
                            m2,
                            landing: landing as u64,
                        }),
                        StopFlowU128::Overflowed { m1, m2, pre_step } => {
                            let big = BigUint::from(pre_step) * 3u32 + 1u32;
                            let start = BigUint::from(n);
                            let (m1, m2, landing) =
                                stop_loop_big(&start, big, m1 + 1, m2, step_limit)?;
                            Ok(StoppingSummary {
                                m: m1 + m2,
                                m1,
                                m2,
                                landing: landing.to_u64().expect("landing below a u64 start"),
                            })
                        }
                        StopFlowU128::Limit { m1, m2, current } => Err(StepLimitExceeded {
                            start: BigUint::from(n),
                            limit: step_limit,
                            m1,
                            m2,
                            current: BigUint::from(current),
                        }),
                    };
                }
            }
        } else {
            cur >>= 1;
            m2 += 1;
            if cur < n {
                return Ok(StoppingSummary { m: m1 + m2, m1, m2, landing: cur });
            }
        }
    }
    Err(StepLimitExceeded {
        start: BigUint::from(n),
        limit: step_limit,
        m1,
        m2,
        current: BigUint::from(cur),
    })
}

enum StopFlowU128 {
    Landed { m1: u64, m2: u64, landing: u128 },
    /// The next odd transform would overflow; `pre_step` is the odd value.
    Overflowed { m1: u64, m2: u64, pre_step: u128 },
    Limit { m1: u64, m2: u64, current: u128 },
}

fn stop_loop_u128(n: u128, mut cur: u128, mut m1: u64, mut m2: u64, step_limit: u64) -> StopFlowU128 {
    while m1 + m2 < step_limit {
        if cur & 1 == 1 {
            match cur.checked_mul(3).and_then(|v| v.checked_add(1)) {
                Some(v) => {
                    cur = v;
                    m1 += 1;
                }
                None => return StopFlowU128::Overflowed { m1, m2, pre_step: cur },
            }
        } else {
            cur >>= 1;
            m2 += 1;
            if cur < n {
                return StopFlowU128::Landed { m1, m2, landing: cur };
            }
        }
    }
    StopFlowU128::Limit { m1, m2, current: cur }
}

fn stop_loop_big(
    start: &BigUint,
    mut cur: BigUint,
    mut m1: u64,
    mut m2: u64,
    step_limit: u64,
) -> Result<(u64, u64, BigUint), StepLimitExceeded> {
    while m1 + m2 < step_limit {
        if cur.bit(0) {
            cur = cur * 3u32 + 1u32;
            m1 += 1;
        } else {
            cur >>= 1;
            m2 += 1;
            if cur < *start {
                return Ok((m1, m2, cur));
            }
        }
    }
    Err(StepLimitExceeded {
        start: start.clone(),
        limit: step_limit,
        m1,
        m2,
        current: cur,
    })
}

pub fn flight_profile(n: &BigUint, step_limit: u64) -> Result<TrajectoryProfile, StepLimitExceeded> {
    assert!(!n.is_zero(), "flight start must be >= 1");
    assert!(step_limit >= 1);
    if n.is_one() {
        return Ok(TrajectoryProfile {
            start: n.clone(),
            route: 0,
            max_height: n.clone(),
            odd_count: 0,
            even_count: 0,
        });
    }
    let summary = if let Some(small) = n.to_u64() {
        flight_u64(small, step_limit)?
    } else if let Some(wide) = n.to_u128() {
        flight_from_u128(n, wide, wide, 0, 0, step_limit)?
    } else {
        flight_loop_big(n, n.clone(), n.clone(), 0, 0, step_limit)?
    };
    Ok(TrajectoryProfile {
        start: n.clone(),
        route: summary.route,
        max_height: summary.max_height,
        odd_count: summary.odd_count,
        even_count: summary.even_count,
    })
}

/// Scan-grade full-flight evaluation for starts that fit u64 (n >= 1).
pub fn flight_u64(n: u64, step_limit: u64) -> Result<FlightSummary, StepLimitExceeded> {
    debug_assert!(n >= 1);
    let mut cur = n;
    let mut max = n;
    let mut odd = 0u64;
    let mut even = 0u64;
    while cur != 1 {
        if odd + even >= step_limit {
            return Err(StepLimitExceeded {
                start: BigUint::from(n),
                limit: step_limit,
                m1: odd,
                m2: even,
                current: BigUint::from(cur),
            });
        }
        if cur & 1 == 1 {
            match cur.checked_mul(3).and_then(|v| v.checked_add(1)) {
                Some(v) => {
                    cur = v;
                    odd += 1;
                    if cur > max {
                        max = cur;
                    }
                }
                None => {
                    let wide = 3u128 * cur as u128 + 1;
                    let start = BigUint::from(n);
                    return flight_from_u128(&start, wide, wide.max(max as u128), odd + 1, even, step_limit);
                }
            }
        } else {
            cur >>= 1;
            even += 1;
        }
    }
    Ok(FlightSummary {
        route: odd + even,
        odd_count: odd,
        even_count: even,
        max_height: BigUint::from(max),
    })
}

fn flight_from_u128(
    start: &BigUint,
    mut cur: u128,
    mut max: u128,
    mut odd: u64,
    mut even: u64,
    step_limit: u64,
) -> Result<FlightSummary, StepLimitExceeded> {
    while cur != 1 {
        if odd + even >= step_limit {
            return Err(StepLimitExceeded {
                start: start.clone(),
                limit: step_limit,
                m1: odd,
                m2: even,
                current: BigUint::from(cur),
            });
        }
        if cur & 1 == 1 {
            match cur.checked_mul(3).and_then(|v| v.checked_add(1)) {
                Some(v) => {
                    cur = v;
                    odd += 1;
                    if cur > max {
                        max = cur;
                    }
                }
                None => {
                    let wide = BigUint::from(cur) * 3u32 + 1u32;
                    let max_big = wide.clone().max(BigUint::from(max));
                    return flight_loop_big(start, wide, max_big, odd + 1, even, step_limit);
                }
            }
        } else {
            cur >>= 1;
            even += 1;
        }
    }
    Ok(FlightSummary {
        route: odd + even,
        odd_count: odd,
        even_count: even,
        max_height: BigUint::from(max),
    })
}

fn flight_loop_big(
    start: &BigUint,
    mut cur: BigUint,
    mut max: BigUint,
    mut odd: u64,
    mut even: u64,
    step_limit: u64,
) -> Result<FlightSummary, StepLimitExceeded> {
    while !cur.is_one() {
        if odd + even >= step_limit {
            return Err(StepLimitExceeded {
                start: start.clone(),
                limit: step_limit,
                m1: odd,
                m2: even,
                current: cur,
            });
        }
        if cur.bit(0) {
            cur = cur * 3u32 + 1u32;
            odd += 1;
            if cur > max {
                max = cur.clone();
            }
        } else {
            cur >>= 1;
            even += 1;
        }
    }
    Ok(FlightSummary { route: odd + even, odd_count: odd, even_count: even, max_height: max })
}

pub fn oe_ratio(n: &BigUint, step_limit: u64) -> Result<OeRatio, StepLimitExceeded> {
    assert!(*n >= BigUint::from(2u32), "oe_ratio requires n >= 2");
    let profile = flight_profile(n, step_limit)?;
    Ok(OeRatio {
        start: n.clone(),
        odd_count: profile.odd_count,
        even_count: profile.even_count,
    })
}

/// Pure arbitrary-precision evaluation, kept deliberately separate from the
/// tiered fast path so the two can be checked against each other.
pub mod reference {
    use super::*;

    pub fn stopping_profile(n: &BigUint, step_limit: u64) -> Result<StoppingProfile, StepLimitExceeded> {
        assert!(!n.is_zero());
        if n.is_one() {
            return Ok(StoppingProfile {
                start: n.clone(),
                m: 0,
                m1: 0,
                m2: 0,
                landing: n.clone(),
                defined: false,
            });
        }
        let (m1, m2, landing) = stop_loop_big(n, n.clone(), 0, 0, step_limit)?;
        Ok(StoppingProfile { start: n.clone(), m: m1 + m2, m1, m2, landing, defined: true })
    }

    pub fn flight_profile(n: &BigUint, step_limit: u64) -> Result<TrajectoryProfile, StepLimitExceeded> {
        assert!(!n.is_zero());
        if n.is_one() {
            return Ok(TrajectoryProfile {
                start: n.clone(),
                route: 0,
                max_height: n.clone(),
                odd_count: 0,
                even_count: 0,
            });
        }
        let summary = flight_loop_big(n, n.clone(), n.clone(), 0, 0, step_limit)?;
        Ok(TrajectoryProfile {
            start: n.clone(),
            route: summary.route,
            max_height: summary.max_height,
            odd_count: summary.odd_count,
            even_count: summary.even_count,
        })
    }
}
