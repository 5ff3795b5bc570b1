//! Exact decimal rendering and high-precision fixed-point arithmetic.
//!
//! Nothing in this module ever rounds silently: ratios are carried as exact
//! integer pairs and converted to decimal strings only at the output boundary,
//! and [`BigFixed`] keeps an explicit binary scale so error stays bounded by
//! one unit in the last place per operation.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::cmp::Ordering;

/// floor(log 2 / log 3 * 10^50). The true constant is irrational, so this is a
/// strict lower bound; the next digits are 0427... which leaves a gap far larger
/// than any ratio O(N)/E(N) with desk-scale denominators can land in.
pub const LOG2_LOG3_DIGITS: &str = "63092975357145743709952711434276085429958564013188";

/// Decimal scale of [`LOG2_LOG3_DIGITS`].
pub const LOG2_LOG3_PLACES: u32 = 50;

pub fn log2_log3_numerator() -> BigUint {
    LOG2_LOG3_DIGITS.parse().expect("constant digits")
}

fn pow10(places: u32) -> BigUint {
    BigUint::from(10u32).pow(places)
}

/// Render `num / den` with `places` digits after the point, rounding half up.
pub fn decimal_string(num: &BigUint, den: &BigUint, places: u32) -> String {
    assert!(!den.is_zero(), "decimal_string: zero denominator");
    let scaled = num * pow10(places);
    // floor(scaled/den + 1/2)
    let q = (scaled * 2u32 + den) / (den * 2u32);
    let ten = pow10(places);
    let int_part = &q / &ten;
    let frac_part = &q % &ten;
    if places == 0 {
        int_part.to_string()
    } else {
        format!("{}.{:0>width$}", int_part, frac_part.to_string(), width = places as usize)
    }
}

/// Exactly decide `o / e < log2/log3` using the 50-digit lower bound.
pub fn ratio_below_log2_log3(odd_count: u64, even_count: u64) -> bool {
    assert!(even_count > 0);
    let lhs = BigUint::from(odd_count) * pow10(LOG2_LOG3_PLACES);
    let rhs = BigUint::from(even_count) * log2_log3_numerator();
    lhs < rhs
}

/// Compare |o1/e1 - log2/log3| against |o2/e2 - log2/log3| exactly.
///
/// Distances are |o*10^50 - P*e| / (e*10^50) with P the frozen numerator, so
/// cross-multiplying by the two denominators keeps everything in integers.
pub fn cmp_closeness_to_log2_log3(o1: u64, e1: u64, o2: u64, e2: u64) -> Ordering {
    assert!(e1 > 0 && e2 > 0);
    let p = log2_log3_numerator();
    let scale = pow10(LOG2_LOG3_PLACES);
    let d1 = abs_diff_big(BigUint::from(o1) * &scale, &p * BigUint::from(e1));
    let d2 = abs_diff_big(BigUint::from(o2) * &scale, &p * BigUint::from(e2));
    (d1 * BigUint::from(e2)).cmp(&(d2 * BigUint::from(e1)))
}

fn abs_diff_big(a: BigUint, b: BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// Unsigned fixed-point value `mantissa / 2^frac_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFixed {
    mantissa: BigUint,
    frac_bits: u32,
}

impl BigFixed {
    pub fn from_u64(v: u64, frac_bits: u32) -> Self {
        BigFixed { mantissa: BigUint::from(v) << frac_bits, frac_bits }
    }

    pub fn from_ratio(num: &BigUint, den: &BigUint, frac_bits: u32) -> Self {
        assert!(!den.is_zero());
        BigFixed { mantissa: (num << frac_bits) / den, frac_bits }
    }

    /// 2^exponent as a fixed-point value; `exponent` may exceed 64.
    pub fn pow2(exponent: u32, frac_bits: u32) -> Self {
        BigFixed { mantissa: BigUint::one() << (exponent + frac_bits), frac_bits }
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.frac_bits, other.frac_bits);
        BigFixed { mantissa: (&self.mantissa * &other.mantissa) >> self.frac_bits, frac_bits: self.frac_bits }
    }

    pub fn div(&self, other: &Self) -> Self {
        assert_eq!(self.frac_bits, other.frac_bits);
        assert!(!other.mantissa.is_zero());
        BigFixed { mantissa: (&self.mantissa << self.frac_bits) / &other.mantissa, frac_bits: self.frac_bits }
    }

    /// Floor square root in the same scale: sqrt(m * 2^-f) = isqrt(m << f) * 2^-f.
    pub fn sqrt(&self) -> Self {
        BigFixed { mantissa: (&self.mantissa << self.frac_bits).sqrt(), frac_bits: self.frac_bits }
    }

    pub fn abs_diff(&self, other: &Self) -> Self {
        assert_eq!(self.frac_bits, other.frac_bits);
        BigFixed {
            mantissa: abs_diff_big(self.mantissa.clone(), other.mantissa.clone()),
            frac_bits: self.frac_bits,
        }
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        assert_eq!(self.frac_bits, other.frac_bits);
        self.mantissa.cmp(&other.mantissa)
    }

    /// True when |self - other| <= 10^-places.
    pub fn within_decimal(&self, other: &Self, places: u32) -> bool {
        let diff = self.abs_diff(other);
        let tol = BigFixed::from_ratio(&BigUint::one(), &pow10(places), self.frac_bits);
        diff.cmp_value(&tol) != Ordering::Greater
    }

    pub fn to_decimal(&self, places: u32) -> String {
        decimal_string(&self.mantissa, &(BigUint::one() << self.frac_bits), places)
    }
}
