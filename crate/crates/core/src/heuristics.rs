//! Heuristic-model computations: the per-transform drift constant, the mean
//! stopping time against Wagon's 9.477955, and the Kn^2 height-bound probe.
//!
//! The drift product (3/2)^(1/2) (3/4)^(1/4) (3/8)^(1/8) ... collapses to 3/4
//! because the exponent sums telescope: sum 2^-k -> 1 and sum k*2^-k -> 2, so
//! the limit is 3^1 / 2^2. Truncations are evaluated two ways (factor by
//! factor, and through the closed form of the partial exponent sums) in
//! high-precision fixed point, and the two must agree to working precision.

use crate::decimal::{decimal_string, BigFixed};
use crate::par;
use crate::trajectory::{flight_u64, stopping_u64, DEFAULT_STEP_LIMIT};
use crate::StepLimitExceeded;
use num_bigint::BigUint;
use num_traits::One;

/// Truncated drift product with its closed-form cross-check.
#[derive(Clone, Debug)]
pub struct DriftEstimate {
    pub terms: u32,
    pub precision: u32,
    /// prod_{k=1..terms} (3/2^k)^(2^-k), factor by factor.
    pub product: BigFixed,
    /// 3^(1 - 2^-T) / 2^(2 - (T+2)*2^-T) via repeated square roots.
    pub closed_form: BigFixed,
}

impl DriftEstimate {
    pub fn product_decimal(&self) -> String {
        self.product.to_decimal(self.precision)
    }

    pub fn closed_form_decimal(&self) -> String {
        self.closed_form.to_decimal(self.precision)
    }

    /// |product - 3/4| <= 10^-places.
    pub fn within_of_limit(&self, places: u32) -> bool {
        let limit = BigFixed::from_ratio(
            &BigUint::from(3u32),
            &BigUint::from(4u32),
            self.product.frac_bits(),
        );
        self.product.within_decimal(&limit, places)
    }

    pub fn routes_agree(&self, places: u32) -> bool {
        self.product.within_decimal(&self.closed_form, places)
    }
}

/// Evaluate the truncated drift product at >= `precision` decimal digits.
///
/// Each factor (3/2^k)^(2^-k) is k successive square roots of 3/2^k, so the
/// whole computation stays in exact fixed point.
pub fn drift_constant(terms: u32, precision: u32) -> DriftEstimate {
    assert!(terms >= 1);
    assert!(precision >= 10, "precision below 10 digits loses the factor tail");
    // 4 bits per digit is a safe over-estimate of log2(10); the extra guard
    // absorbs the ~terms^2 unit-in-last-place rounding of the sqrt cascade.
    // Independent of `terms` so estimates at different truncations compare.
    let frac_bits = (precision + 20) * 4 + 80;
    assert!(terms < frac_bits / 2, "factor 3/2^k needs k well below the scale");
    let one = BigUint::one();

    let mut product = BigFixed::from_u64(1, frac_bits);
    for k in 1..=terms {
        let mut factor = BigFixed::from_ratio(&BigUint::from(3u32), &(&one << k), frac_bits);
        for _ in 0..k {
            factor = factor.sqrt();
        }
        product = product.mul(&factor);
    }

    // closed form: 3^(1 - 2^-T) = 3 / sqrt^T(3), 2^(2 - (T+2) 2^-T) = 4 / sqrt^T(2^(T+2))
    let mut root3 = BigFixed::from_u64(3, frac_bits);
    let mut root2 = BigFixed::pow2(terms + 2, frac_bits);
    for _ in 0..terms {
        root3 = root3.sqrt();
        root2 = root2.sqrt();
    }
    let numerator = BigFixed::from_u64(3, frac_bits).mul(&root2);
    let denominator = BigFixed::from_u64(4, frac_bits).mul(&root3);
    let closed_form = numerator.div(&denominator);

    DriftEstimate { terms, precision, product, closed_form }
}

/// Exact stopping-time sums over a range, split by start parity. The odd-start
/// mean is the one comparable to Wagon's limiting constant: even starts all
/// stop in a single transform and drag the overall mean toward 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeanReport {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    pub sum_m: u128,
    pub sum_m1: u128,
    pub odd_count: u64,
    pub odd_sum_m: u128,
    pub odd_sum_m1: u128,
}

impl MeanReport {
    pub fn mean_m(&self, places: u32) -> String {
        decimal_string(&self.sum_m.into(), &self.count.into(), places)
    }

    pub fn mean_m1(&self, places: u32) -> String {
        decimal_string(&self.sum_m1.into(), &self.count.into(), places)
    }

    pub fn odd_mean_m(&self, places: u32) -> String {
        decimal_string(&self.odd_sum_m.into(), &self.odd_count.into(), places)
    }

    pub fn odd_mean_m1(&self, places: u32) -> String {
        decimal_string(&self.odd_sum_m1.into(), &self.odd_count.into(), places)
    }

    /// |odd mean - constant| <= band, exactly: the constant and the band are
    /// given in millionths.
    pub fn odd_mean_within(&self, constant_millionths: u64, band_millionths: u64) -> bool {
        let scaled_mean = self.odd_sum_m * 1_000_000;
        let center = constant_millionths as u128 * self.odd_count as u128;
        let band = band_millionths as u128 * self.odd_count as u128;
        scaled_mean.abs_diff(center) <= band
    }

    fn merge(&mut self, other: &MeanReport) {
        self.count += other.count;
        self.sum_m += other.sum_m;
        self.sum_m1 += other.sum_m1;
        self.odd_count += other.odd_count;
        self.odd_sum_m += other.odd_sum_m;
        self.odd_sum_m1 += other.odd_sum_m1;
    }
}

pub(crate) fn mean_unit(lo: u64, hi: u64, step_limit: u64) -> Result<MeanReport, StepLimitExceeded> {
    let mut report = MeanReport { lo, hi, ..MeanReport::default() };
    for n in lo..hi {
        let s = stopping_u64(n, step_limit)?;
        report.count += 1;
        report.sum_m += s.m as u128;
        report.sum_m1 += s.m1 as u128;
        if n & 1 == 1 {
            report.odd_count += 1;
            report.odd_sum_m += s.m as u128;
            report.odd_sum_m1 += s.m1 as u128;
        }
    }
    Ok(report)
}

pub(crate) fn merge_mean(lo: u64, hi: u64, parts: Vec<MeanReport>) -> MeanReport {
    let mut merged = MeanReport { lo, hi, ..MeanReport::default() };
    for p in &parts {
        merged.merge(p);
    }
    merged
}

/// Arithmetic mean of stopping times over [lo, hi), all starts defined.
pub fn mean_stopping_time(lo: u64, hi: u64) -> Result<MeanReport, StepLimitExceeded> {
    assert!(lo >= 2, "stopping time of 1 is undefined");
    assert!(lo < hi);
    let chunks = par::split_range(lo, hi, par::RANGE_CHUNK);
    let parts = par::map_ordered(&chunks, |&(a, b)| mean_unit(a, b, DEFAULT_STEP_LIMIT));
    let parts = parts.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(merge_mean(lo, hi, parts))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightViolation {
    pub n: u64,
    pub max_height: BigUint,
    pub bound: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProbe {
    pub upto: u64,
    pub k_const: u64,
    /// Every n <= upto whose peak exceeds K * n^2.
    pub violations: Vec<HeightViolation>,
    /// Maximizer of max_height / n^2: (n, max_height, n^2).
    pub max_ratio: (u64, BigUint, BigUint),
}

/// Probe the heuristic bound max_height(n) <= K * n^2, reporting violations
/// rather than asserting the claim.
pub fn height_bound_probe(upto: u64, k_const: u64) -> Result<HeightProbe, StepLimitExceeded> {
    assert!(upto >= 2);
    assert!(k_const >= 1);
    let chunks = par::split_range(1, upto + 1, par::RANGE_CHUNK);
    let parts = par::map_ordered(&chunks, |&(a, b)| probe_unit(a, b, k_const));
    let mut violations = Vec::new();
    let mut best: Option<(u64, BigUint, BigUint)> = None;
    for part in parts {
        let (mut v, candidate) = part?;
        violations.append(&mut v);
        best = Some(match best {
            None => candidate,
            Some(cur) => {
                // candidate.h / candidate.n^2 > cur.h / cur.n^2, cross-multiplied
                if &candidate.1 * &cur.2 > &cur.1 * &candidate.2 {
                    candidate
                } else {
                    cur
                }
            }
        });
    }
    Ok(HeightProbe { upto, k_const, violations, max_ratio: best.expect("non-empty range") })
}

type ProbeUnit = (Vec<HeightViolation>, (u64, BigUint, BigUint));

fn probe_unit(lo: u64, hi: u64, k_const: u64) -> Result<ProbeUnit, StepLimitExceeded> {
    let mut violations = Vec::new();
    let mut best: Option<(u64, BigUint, BigUint)> = None;
    for n in lo..hi {
        let f = flight_u64(n, DEFAULT_STEP_LIMIT)?;
        let n_squared = BigUint::from(n) * BigUint::from(n);
        let bound = &n_squared * BigUint::from(k_const);
        if f.max_height > bound {
            violations.push(HeightViolation { n, max_height: f.max_height.clone(), bound });
        }
        let better = match &best {
            None => true,
            Some((_, h, nsq)) => &f.max_height * nsq > h * &n_squared,
        };
        if better {
            best = Some((n, f.max_height, n_squared));
        }
    }
    Ok((violations, best.expect("non-empty unit")))
}

/// Aggregate of the three model computations over one configuration.
#[derive(Clone, Debug)]
pub struct ModelStats {
    pub drift_partial: DriftEstimate,
    pub mean: MeanReport,
    pub height_probe: HeightProbe,
}

pub fn model_stats(
    range_lo: u64,
    range_hi: u64,
    probe_upto: u64,
    drift_terms: u32,
) -> Result<ModelStats, StepLimitExceeded> {
    Ok(ModelStats {
        drift_partial: drift_constant(drift_terms, 30),
        mean: mean_stopping_time(range_lo, range_hi)?,
        height_probe: height_bound_probe(probe_upto, 8)?,
    })
}
