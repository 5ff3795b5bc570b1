//! Record flights: starts whose metric strictly beats every smaller start,
//! plus direct verification of the published giant records.

use crate::decimal::{cmp_closeness_to_log2_log3, decimal_string};
use crate::par;
use crate::trajectory::{flight_profile, flight_u64, oe_ratio, stopping_u64};
use crate::StepLimitExceeded;
use num_bigint::BigUint;
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RecordKind {
    Route,
    StoppingTime,
    MaxHeight,
    RatioCloseness,
}

impl RecordKind {
    pub fn token(&self) -> &'static str {
        match self {
            RecordKind::Route => "route",
            RecordKind::StoppingTime => "stop",
            RecordKind::MaxHeight => "height",
            RecordKind::RatioCloseness => "ratio",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "route" => Some(RecordKind::Route),
            "stop" => Some(RecordKind::StoppingTime),
            "height" => Some(RecordKind::MaxHeight),
            "ratio" => Some(RecordKind::RatioCloseness),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordValue {
    Count(u64),
    Height(BigUint),
    Ratio { odd_count: u64, even_count: u64 },
}

impl RecordValue {
    pub fn render(&self) -> String {
        match self {
            RecordValue::Count(v) => v.to_string(),
            RecordValue::Height(h) => h.to_string(),
            RecordValue::Ratio { odd_count, even_count } => format!(
                "{}/{} = {}",
                odd_count,
                even_count,
                decimal_string(
                    &BigUint::from(*odd_count),
                    &BigUint::from(*even_count),
                    6
                )
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordEntry {
    pub n: u64,
    pub value: RecordValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordLog {
    pub kind: RecordKind,
    /// Ascending by n; each value strictly beats all earlier entries.
    pub entries: Vec<RecordEntry>,
    pub scanned_up_to: u64,
}

impl RecordLog {
    pub fn new(kind: RecordKind, lo: u64) -> Self {
        RecordLog { kind, entries: Vec::new(), scanned_up_to: lo }
    }
}

/// Strictly-better comparison for the record kind: larger for counts and
/// heights, closer to log2/log3 for ratios.
fn improves(kind: RecordKind, candidate: &RecordValue, incumbent: &RecordValue) -> bool {
    match (candidate, incumbent) {
        (RecordValue::Count(c), RecordValue::Count(i)) => c > i,
        (RecordValue::Height(c), RecordValue::Height(i)) => c > i,
        (
            RecordValue::Ratio { odd_count: o1, even_count: e1 },
            RecordValue::Ratio { odd_count: o2, even_count: e2 },
        ) => cmp_closeness_to_log2_log3(*o1, *e1, *o2, *e2) == Ordering::Less,
        _ => panic!("mixed record kinds in {kind:?} log"),
    }
}

/// Metric for one start, or None where the metric is undefined (stopping time
/// and ratio for n = 1).
fn measure(kind: RecordKind, n: u64, step_limit: u64) -> Result<Option<RecordValue>, StepLimitExceeded> {
    Ok(match kind {
        RecordKind::Route => Some(RecordValue::Count(flight_u64(n, step_limit)?.route)),
        RecordKind::MaxHeight => Some(RecordValue::Height(flight_u64(n, step_limit)?.max_height)),
        RecordKind::StoppingTime => {
            if n < 2 {
                None
            } else {
                Some(RecordValue::Count(stopping_u64(n, step_limit)?.m))
            }
        }
        RecordKind::RatioCloseness => {
            if n < 2 {
                None
            } else {
                let f = flight_u64(n, step_limit)?;
                Some(RecordValue::Ratio { odd_count: f.odd_count, even_count: f.even_count })
            }
        }
    })
}

/// Chunk-local candidates: entries that improve on everything inside the
/// chunk. A true record beats all smaller starts, in particular those in its
/// own chunk, so merging chunk candidates in order and re-filtering recovers
/// exactly the straight scan.
pub(crate) fn scan_chunk(
    lo: u64,
    hi: u64,
    kind: RecordKind,
    step_limit: u64,
) -> Result<Vec<RecordEntry>, StepLimitExceeded> {
    let mut out: Vec<RecordEntry> = Vec::new();
    for n in lo..hi {
        if let Some(value) = measure(kind, n, step_limit)? {
            if out.last().map_or(true, |best| improves(kind, &value, &best.value)) {
                out.push(RecordEntry { n, value });
            }
        }
    }
    Ok(out)
}

pub(crate) fn merge_candidates(kind: RecordKind, log: &mut RecordLog, candidates: Vec<RecordEntry>) {
    for entry in candidates {
        if log
            .entries
            .last()
            .map_or(true, |best| improves(kind, &entry.value, &best.value))
        {
            log.entries.push(entry);
        }
    }
}

/// Extend `prior` (or start fresh) with every record in [lo, hi).
pub fn scan_records(
    lo: u64,
    hi: u64,
    kind: RecordKind,
    prior: Option<RecordLog>,
) -> Result<RecordLog, StepLimitExceeded> {
    assert!(lo < hi, "scan range must be non-empty");
    assert!(lo >= 1, "flights are indexed from 1");
    let mut log = match prior {
        Some(p) => {
            assert_eq!(p.kind, kind);
            assert_eq!(p.scanned_up_to, lo, "prior log must end where this scan starts");
            p
        }
        None => RecordLog::new(kind, lo),
    };
    let chunks = par::split_range(lo, hi, par::RANGE_CHUNK);
    let parts = par::map_ordered(&chunks, |&(a, b)| {
        scan_chunk(a, b, kind, crate::trajectory::DEFAULT_STEP_LIMIT)
    });
    for part in parts {
        merge_candidates(kind, &mut log, part?);
    }
    log.scanned_up_to = hi;
    Ok(log)
}

/// One published record checked by direct flight simulation.
#[derive(Clone, Debug)]
pub struct RecordCheck {
    pub label: &'static str,
    pub n: BigUint,
    pub expected: String,
    pub computed: String,
    pub matched: bool,
}

#[derive(Clone, Debug)]
pub struct KnownRecordsReport {
    pub checks: Vec<RecordCheck>,
}

impl KnownRecordsReport {
    pub fn all_match(&self) -> bool {
        self.checks.iter().all(|c| c.matched)
    }
}

/// Recompute the published giant records: the longest known route, the
/// largest known stopping time, the highest known flight and the two
/// closest-ratio flights.
pub fn verify_known_records() -> Result<KnownRecordsReport, StepLimitExceeded> {
    let limit = crate::trajectory::DEFAULT_STEP_LIMIT;
    let mut checks = Vec::new();

    let n: BigUint = 2234047405400065u64.into();
    let computed = flight_profile(&n, limit)?.route.to_string();
    checks.push(RecordCheck {
        label: "route",
        n,
        expected: "1871".into(),
        matched: computed == "1871",
        computed,
    });

    let n: BigUint = 1008932249296231u64.into();
    let profile = crate::trajectory::stopping_profile(&n, limit)?;
    let computed = profile.m.to_string();
    checks.push(RecordCheck {
        label: "stopping_time",
        n,
        expected: "1445".into(),
        matched: computed == "1445",
        computed,
    });

    let n: BigUint = 10709980568908647u64.into();
    let expected = "350589187937078188831873920282244".to_string();
    let computed = flight_profile(&n, limit)?.max_height.to_string();
    checks.push(RecordCheck {
        label: "max_height",
        n,
        matched: computed == expected,
        expected,
        computed,
    });

    let n: BigUint = 100759293214567u64.into();
    let computed = oe_ratio(&n, limit)?.decimal(6);
    checks.push(RecordCheck {
        label: "oe_ratio",
        n,
        expected: "0.604938".into(),
        matched: computed == "0.604938",
        computed,
    });

    let n: BigUint = 104899295810901231u64.into();
    let computed = oe_ratio(&n, limit)?.decimal(6);
    checks.push(RecordCheck {
        label: "oe_ratio",
        n,
        expected: "0.605413".into(),
        matched: computed == "0.605413",
        computed,
    });

    Ok(KnownRecordsReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(log: &RecordLog) -> Vec<(u64, u64)> {
        log.entries
            .iter()
            .map(|e| match &e.value {
                RecordValue::Count(v) => (e.n, *v),
                _ => panic!("expected count"),
            })
            .collect()
    }

    #[test]
    fn route_records_below_ten() {
        let log = scan_records(1, 10, RecordKind::Route, None).unwrap();
        assert_eq!(counts(&log), vec![(1, 0), (2, 1), (3, 7), (6, 8), (7, 16), (9, 19)]);
        assert_eq!(log.scanned_up_to, 10);
    }

    #[test]
    fn stopping_records_below_ten() {
        let log = scan_records(1, 10, RecordKind::StoppingTime, None).unwrap();
        assert_eq!(counts(&log), vec![(2, 1), (3, 6), (7, 11)]);
    }

    #[test]
    fn height_records_have_no_entry_for_six() {
        // 3 already reaches 16, so flight 6 (peak 16) is not a record: ties lose
        let log = scan_records(1, 7, RecordKind::MaxHeight, None).unwrap();
        let entries: Vec<(u64, String)> =
            log.entries.iter().map(|e| (e.n, e.value.render())).collect();
        assert_eq!(
            entries,
            vec![(1, "1".into()), (2, "2".into()), (3, "16".into())]
        );
    }

    #[test]
    fn ratio_records_below_ten() {
        let log = scan_records(1, 10, RecordKind::RatioCloseness, None).unwrap();
        let entries: Vec<(u64, u64, u64)> = log
            .entries
            .iter()
            .map(|e| match &e.value {
                RecordValue::Ratio { odd_count, even_count } => (e.n, *odd_count, *even_count),
                _ => panic!("expected ratio"),
            })
            .collect();
        assert_eq!(entries, vec![(2, 0, 1), (3, 2, 5), (7, 5, 11), (9, 6, 13)]);
    }

    #[test]
    fn prefix_property_under_split_scans() {
        for kind in [
            RecordKind::Route,
            RecordKind::StoppingTime,
            RecordKind::MaxHeight,
            RecordKind::RatioCloseness,
        ] {
            let whole = scan_records(1, 4000, kind, None).unwrap();
            let first = scan_records(1, 1777, kind, None).unwrap();
            let resumed = scan_records(1777, 4000, kind, Some(first.clone())).unwrap();
            assert_eq!(whole, resumed, "{kind:?}");
            // the earlier log is a prefix of the longer one
            assert_eq!(&whole.entries[..first.entries.len().min(whole.entries.len())]
                .iter()
                .filter(|e| e.n < 1777)
                .count(), &first.entries.len());
        }
    }

    #[test]
    fn known_records_all_match() {
        let report = verify_known_records().unwrap();
        assert!(report.all_match(), "{:?}", report.checks);
        assert_eq!(report.checks.len(), 5);
    }
}
