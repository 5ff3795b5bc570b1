//! Symbolic residue-class sieve over classes 2^b·k + r.
//!
//! Following the class 16k+3 -> 48k+10 -> 24k+5 -> ... -> 9k+2 symbolically
//! proves 9k+2 < 16k+3 for every k >= 1, so no member of the class above the
//! modulus ever needs direct verification. [`build_sieve`] runs that argument
//! for every residue of a power-of-two modulus: a residue is eliminated once
//! the class provably falls below its start, and survives when the class
//! coefficient turns odd first (the next parity then depends on k, and the
//! symbolic iteration cannot continue).

use crate::par;
use thiserror::Error;

/// Largest supported sieve level: 2^24 residues keeps the per-level tables
/// comfortably in memory; larger levels would need streaming construction.
pub const MAX_SIEVE_BITS: u32 = 24;

/// Marker in the elimination-step table for surviving residues.
const SURVIVOR_MARK: u8 = u8::MAX;

/// The class a·k + c reached from the start 2^b·k + r, valid for every k >= 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineClass {
    /// Coefficient of k; stays 2^(b - even_steps) * 3^odd_steps while iterating.
    pub coefficient: u128,
    /// Constant term; its parity decides the next transform while the
    /// coefficient is even.
    pub constant: u128,
    pub origin_modulus: u128,
    pub origin_residue: u128,
    pub even_steps: u32,
    pub odd_steps: u32,
}

impl AffineClass {
    pub fn start(bits: u32, residue: u64) -> Self {
        assert!(bits >= 1 && bits <= MAX_SIEVE_BITS);
        let modulus = 1u128 << bits;
        assert!((residue as u128) < modulus);
        AffineClass {
            coefficient: modulus,
            constant: residue as u128,
            origin_modulus: modulus,
            origin_residue: residue as u128,
            even_steps: 0,
            odd_steps: 0,
        }
    }

    /// Class value provably below its start for every k >= 1.
    pub fn proves_descent(&self) -> bool {
        self.coefficient < self.origin_modulus && self.constant <= self.origin_residue
    }
}

/// The class coefficient is odd, so member parity depends on k and the
/// symbolic iteration must stop: the residue survives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("class coefficient is odd; member parity is undetermined")]
pub struct ParityUndetermined;

/// One symbolic transform of the whole class.
pub fn advance(class: &AffineClass) -> Result<AffineClass, ParityUndetermined> {
    if class.coefficient & 1 == 1 {
        return Err(ParityUndetermined);
    }
    let mut next = class.clone();
    if class.constant & 1 == 1 {
        next.coefficient = class.coefficient * 3;
        next.constant = class.constant * 3 + 1;
        next.odd_steps += 1;
    } else {
        next.coefficient = class.coefficient / 2;
        next.constant = class.constant / 2;
        next.even_steps += 1;
    }
    Ok(next)
}

/// Survivor set and per-residue elimination bounds for one modulus 2^bits.
#[derive(Clone, Debug)]
pub struct SieveTable {
    bits: u32,
    survivors: Vec<u64>,
    /// Indexed by residue; transform count at which descent was established,
    /// or SURVIVOR_MARK.
    elimination_steps: Vec<u8>,
    survivor_bitmap: Vec<u64>,
}

impl SieveTable {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn modulus(&self) -> u64 {
        1u64 << self.bits
    }

    /// Surviving residues in ascending order.
    pub fn survivors(&self) -> &[u64] {
        &self.survivors
    }

    pub fn survivor_count(&self) -> u64 {
        self.survivors.len() as u64
    }

    /// |survivors| / 2^bits as an exact fraction.
    pub fn coverage(&self) -> (u64, u64) {
        (self.survivor_count(), self.modulus())
    }

    pub fn coverage_percent(&self, places: u32) -> String {
        crate::decimal::decimal_string(
            &(num_bigint::BigUint::from(self.survivor_count()) * 100u32),
            &num_bigint::BigUint::from(self.modulus()),
            places,
        )
    }

    pub fn is_survivor_residue(&self, residue: u64) -> bool {
        debug_assert!(residue < self.modulus());
        let idx = (residue / 64) as usize;
        self.survivor_bitmap[idx] >> (residue % 64) & 1 == 1
    }

    /// Transform count at which the residue's class was eliminated; None for
    /// survivors. Any n in the class (above the modulus) has stopping time at
    /// most this bound and at most `bits` even transforms.
    pub fn elimination_step_bound(&self, residue: u64) -> Option<u8> {
        debug_assert!(residue < self.modulus());
        match self.elimination_steps[residue as usize] {
            SURVIVOR_MARK => None,
            s => Some(s),
        }
    }

    /// True when n's flight is guaranteed to fall below n without simulation.
    /// Callers must keep n at or above the modulus; members below it are the
    /// k = 0 representatives and have to be checked directly.
    pub fn is_skippable(&self, n: u64) -> bool {
        debug_assert!(n >= self.modulus());
        !self.is_survivor_residue(n & (self.modulus() - 1))
    }
}

/// Classify every residue of 2^bits by running [`advance`] until descent is
/// proven or the coefficient turns odd.
pub fn build_sieve(bits: u32) -> SieveTable {
    assert!(
        (1..=MAX_SIEVE_BITS).contains(&bits),
        "sieve level must be between 1 and {MAX_SIEVE_BITS}"
    );
    let modulus = 1u64 << bits;
    let chunks = par::split_range(0, modulus, 1 << 16);
    let parts = par::map_ordered(&chunks, |&(lo, hi)| {
        let mut survivors = Vec::new();
        let mut steps = vec![0u8; (hi - lo) as usize];
        for r in lo..hi {
            match classify_residue(bits, r) {
                Some(bound) => steps[(r - lo) as usize] = bound,
                None => {
                    steps[(r - lo) as usize] = SURVIVOR_MARK;
                    survivors.push(r);
                }
            }
        }
        (survivors, steps)
    });
    let mut survivors = Vec::new();
    let mut elimination_steps = Vec::with_capacity(modulus as usize);
    for (s, e) in parts {
        survivors.extend(s);
        elimination_steps.extend(e);
    }
    let mut survivor_bitmap = vec![0u64; modulus.div_ceil(64) as usize];
    for &r in &survivors {
        survivor_bitmap[(r / 64) as usize] |= 1 << (r % 64);
    }
    SieveTable { bits, survivors, elimination_steps, survivor_bitmap }
}

/// Some(step bound) when eliminated, None when the residue survives.
fn classify_residue(bits: u32, residue: u64) -> Option<u8> {
    let mut class = AffineClass::start(bits, residue);
    let mut steps = 0u32;
    loop {
        if class.proves_descent() {
            return Some(steps as u8);
        }
        class = match advance(&class) {
            Ok(next) => next,
            Err(ParityUndetermined) => return None,
        };
        steps += 1;
        debug_assert!(steps <= 2 * bits + 2, "termination envelope exceeded");
    }
}

/// All sieve levels 1..=bits, so scans can pick the deepest level a candidate
/// clears (level b applies to n >= 2^b; smaller n fall through to the level of
/// their own magnitude). Sound because survivor sets refine downward.
#[derive(Clone, Debug)]
pub struct SieveLadder {
    tables: Vec<SieveTable>,
}

impl SieveLadder {
    pub fn bits(&self) -> u32 {
        self.tables.len() as u32
    }

    pub fn level(&self, bits: u32) -> &SieveTable {
        &self.tables[(bits - 1) as usize]
    }

    pub fn top(&self) -> &SieveTable {
        self.tables.last().expect("ladder has at least level 1")
    }

    /// True when n >= 2 is guaranteed to fall below itself without simulation.
    pub fn is_skippable(&self, n: u64) -> bool {
        debug_assert!(n >= 2);
        let level = (63 - n.leading_zeros()).min(self.bits());
        self.level(level).is_skippable(n)
    }
}

pub fn build_ladder(bits: u32) -> SieveLadder {
    assert!((1..=MAX_SIEVE_BITS).contains(&bits));
    SieveLadder { tables: (1..=bits).map(build_sieve).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{stopping_u64, DEFAULT_STEP_LIMIT};

    /// The residues of 256k+i the chain argument cannot eliminate.
    pub(crate) const SURVIVORS_MOD_256: [u64; 19] = [
        27, 31, 47, 63, 71, 91, 103, 111, 127, 155, 159, 167, 191, 207, 223, 231, 239, 251, 255,
    ];

    #[test]
    fn advance_follows_the_16k3_chain() {
        let c = AffineClass::start(4, 3);
        let c = advance(&c).unwrap();
        assert_eq!((c.coefficient, c.constant), (48, 10));
        let c = advance(&c).unwrap();
        assert_eq!((c.coefficient, c.constant), (24, 5));
        // ... -> 72k+16 -> 36k+8 -> 18k+4 -> 9k+2, which proves descent
        let mut c = c;
        for expected in [(72, 16), (36, 8), (18, 4), (9, 2)] {
            c = advance(&c).unwrap();
            assert_eq!((c.coefficient, c.constant), expected);
        }
        assert!(c.proves_descent());
        assert_eq!(advance(&c), Err(ParityUndetermined));
    }

    #[test]
    fn advance_halves_even_classes() {
        let c = AffineClass {
            coefficient: 4,
            constant: 2,
            origin_modulus: 4,
            origin_residue: 2,
            even_steps: 0,
            odd_steps: 0,
        };
        let c = advance(&c).unwrap();
        assert_eq!((c.coefficient, c.constant), (2, 1));
    }

    #[test]
    fn small_levels_match_hand_runs() {
        assert_eq!(build_sieve(1).survivors(), &[1]);
        assert_eq!(build_sieve(2).survivors(), &[3]);
        assert_eq!(build_sieve(3).survivors(), &[3, 7]);
        assert_eq!(build_sieve(4).survivors(), &[7, 11, 15]);
        assert_eq!(build_sieve(2).coverage(), (1, 4));
    }

    #[test]
    fn level_8_matches_the_published_residues() {
        let t = build_sieve(8);
        assert_eq!(t.survivors(), &SURVIVORS_MOD_256);
        assert_eq!(t.coverage(), (19, 256));
    }

    #[test]
    fn skippable_examples() {
        let t2 = build_sieve(2);
        assert!(t2.is_skippable(101)); // 101 = 4k+1
        let t8 = build_sieve(8);
        assert!(!t8.is_skippable(27 + 256));
        assert!(t8.is_skippable(19 + 256));
    }

    #[test]
    fn survivors_are_3_mod_4_from_level_2_up() {
        for bits in 1..=12 {
            let t = build_sieve(bits);
            for &r in t.survivors() {
                assert_eq!(r % 2, 1, "bits={bits} r={r}");
                if bits >= 2 {
                    assert_eq!(r % 4, 3, "bits={bits} r={r}");
                }
            }
        }
    }

    #[test]
    fn refinement_chain() {
        for bits in 1..=13 {
            let coarse = build_sieve(bits);
            let fine = build_sieve(bits + 1);
            for &r in fine.survivors() {
                assert!(
                    coarse.is_survivor_residue(r & (coarse.modulus() - 1)),
                    "bits={bits} r={r}"
                );
            }
        }
    }

    #[test]
    fn elimination_bounds_dominate_concrete_stopping_times() {
        // exhaustive soundness check at moderate levels
        for bits in 1..=10u32 {
            let t = build_sieve(bits);
            let modulus = 1u64 << bits;
            for n in modulus..(modulus << 4) {
                if let Some(bound) = t.elimination_step_bound(n & (modulus - 1)) {
                    let s = stopping_u64(n, DEFAULT_STEP_LIMIT).unwrap();
                    assert!(s.m <= bound as u64, "n={n} bits={bits}");
                    assert!(s.m2 <= bits as u64, "n={n} bits={bits}");
                }
            }
        }
    }

    #[test]
    fn ladder_skips_by_magnitude_level() {
        let ladder = build_ladder(8);
        assert!(ladder.is_skippable(2)); // level 1: residue 0 eliminated
        assert!(!ladder.is_skippable(3)); // level 1: residue 1 survives
        assert!(ladder.is_skippable(4)); // level 2
        assert!(!ladder.is_skippable(7)); // level 2: 7 = 4k+3
        assert!(ladder.is_skippable(19 + 256)); // full level 8
        assert!(!ladder.is_skippable(27 + 256));
    }
}
