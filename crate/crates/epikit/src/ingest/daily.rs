//! Per-day case counting, dense over the observed date range.

use super::{CaseStatus, PatientRecord};
use chrono::{Days, NaiveDate};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DailyCount {
    pub date: NaiveDate,
    pub new_cases: u64,
    pub cumulative_cases: u64,
    pub deaths: u64,
    pub recoveries: u64,
}

/// Per-day series of new/cumulative cases, deaths, and recoveries.
///
/// New cases are binned by announcement date; deaths and recoveries by
/// status-change date. Gaps between the minimum and maximum observed
/// date are zero-filled.
pub fn daily_counts(records: &[PatientRecord], region_filter: Option<&str>) -> Vec<DailyCount> {
    #[derive(Default, Clone, Copy)]
    struct Delta {
        cases: u64,
        deaths: u64,
        recoveries: u64,
    }

    let mut deltas: BTreeMap<NaiveDate, Delta> = BTreeMap::new();
    for r in records {
        if let Some(region) = region_filter {
            if r.region() != Some(region) {
                continue;
            }
        }
        deltas.entry(r.date_announced).or_default().cases += 1;
        match r.current_status {
            CaseStatus::Deceased => deltas.entry(r.status_date()).or_default().deaths += 1,
            CaseStatus::Recovered => deltas.entry(r.status_date()).or_default().recoveries += 1,
            _ => {}
        }
    }

    let (Some(&first), Some(&last)) = (
        deltas.keys().next(),
        deltas.keys().next_back(),
    ) else {
        return Vec::new();
    };

    let mut out = Vec::new();
    let mut cumulative = 0;
    let mut day = first;
    loop {
        let delta = deltas.get(&day).copied().unwrap_or_default();
        cumulative += delta.cases;
        out.push(DailyCount {
            date: day,
            new_cases: delta.cases,
            cumulative_cases: cumulative,
            deaths: delta.deaths,
            recoveries: delta.recoveries,
        });
        if day == last {
            break;
        }
        day = day.checked_add_days(Days::new(1)).expect("date overflow");
    }
    out
}
