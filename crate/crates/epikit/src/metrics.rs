//! Reproduction-number and case-fatality-rate metrics.
//!
//! An infector is a node with out-degree ≥ 1 in the traced contact
//! graph; untraced spread does not contribute to the reproduction
//! number. National values are pooled ratios over all edges and
//! infectors, not averages of regional averages.

use crate::ingest::{CaseStatus, ContactGraph, PatientRecord};
use chrono::{Days, NaiveDate};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// Histogram width matching the source tables (person-contact 1..20).
pub const DEFAULT_K_MAX: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("region {0:?} does not appear in the contact graph")]
    UnknownRegion(String),
    #[error("no infectors in scope: reproduction number is undefined")]
    NoInfectors,
    #[error("no cases in scope: fatality rate is undefined")]
    NoCases,
}

/// Out-degree histogram of infectors in a region.
///
/// `bucket(k)` counts infectors who each infected exactly `k` persons,
/// for `k` in `1..=k_max`. Infectors with out-degree above `k_max` are
/// clamped into the last bucket; `clamped` reports how many were.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContactHistogram {
    pub region: Option<String>,
    buckets: Vec<u64>,
    pub clamped: u64,
}

impl ContactHistogram {
    /// Build directly from per-contact counts, `counts[0]` being the
    /// number of infectors with out-degree 1.
    pub fn from_counts(region: Option<&str>, counts: &[u64]) -> Self {
        ContactHistogram {
            region: region.map(str::to_owned),
            buckets: counts.to_vec(),
            clamped: 0,
        }
    }

    pub fn k_max(&self) -> usize {
        self.buckets.len()
    }

    /// Count of infectors with out-degree exactly `k` (1-based).
    pub fn bucket(&self, k: usize) -> u64 {
        assert!((1..=self.k_max()).contains(&k), "bucket index out of range");
        self.buckets[k - 1]
    }

    /// Total infectors: Σ_k bucket(k).
    pub fn infector_count(&self) -> u64 {
        self.buckets.iter().sum()
    }

    /// Total infected attributed to these infectors: Σ_k k·bucket(k).
    pub fn total_infected(&self) -> u64 {
        self.buckets
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1) * c)
            .sum()
    }
}

/// Reproduction number as a pooled ratio of infected to infectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct R0Value {
    pub value: f64,
    pub numerator: u64,
    pub denominator: u64,
}

/// Case fatality rate in percent, with the counts behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FatalityRate {
    pub percent: f64,
    pub deaths: u64,
    pub infected: u64,
}

/// Out-degree histogram over infectors of a region (or the whole graph).
pub fn contact_histogram(
    graph: &ContactGraph,
    region: Option<&str>,
    k_max: usize,
) -> Result<ContactHistogram, MetricsError> {
    assert!(k_max >= 1, "k_max must be at least 1");
    if let Some(r) = region {
        if !graph.nodes().any(|n| graph.region(n) == Some(r)) {
            return Err(MetricsError::UnknownRegion(r.to_owned()));
        }
    }
    let mut buckets = vec![0u64; k_max];
    let mut clamped = 0;
    for node in graph.nodes() {
        if region.is_some() && graph.region(node) != region {
            continue;
        }
        let degree = graph.out_degree(node);
        if degree == 0 {
            continue;
        }
        if degree > k_max {
            clamped += 1;
            buckets[k_max - 1] += 1;
        } else {
            buckets[degree - 1] += 1;
        }
    }
    Ok(ContactHistogram {
        region: region.map(str::to_owned),
        buckets,
        clamped,
    })
}

/// Weighted mean of the histogram's out-degrees: infected / infectors.
pub fn average_r0(hist: &ContactHistogram) -> Result<R0Value, MetricsError> {
    let denominator = hist.infector_count();
    if denominator == 0 {
        return Err(MetricsError::NoInfectors);
    }
    let numerator = hist.total_infected();
    Ok(R0Value {
        value: numerator as f64 / denominator as f64,
        numerator,
        denominator,
    })
}

/// Reproduction number straight from the graph slice, without histogram
/// clamping: (edges in region) / (infectors in region).
pub fn r0_from_graph(graph: &ContactGraph, region: Option<&str>) -> Result<R0Value, MetricsError> {
    let mut edges = 0u64;
    let mut infectors = 0u64;
    for node in graph.nodes() {
        if region.is_some() && graph.region(node) != region {
            continue;
        }
        let degree = graph.out_degree(node) as u64;
        if degree > 0 {
            edges += degree;
            infectors += 1;
        }
    }
    if infectors == 0 {
        return Err(MetricsError::NoInfectors);
    }
    Ok(R0Value {
        value: edges as f64 / infectors as f64,
        numerator: edges,
        denominator: infectors,
    })
}

/// Percentage of confirmed cases that have died, optionally restricted
/// to a region and to events on or before `as_of`.
pub fn case_fatality_rate(
    records: &[PatientRecord],
    region: Option<&str>,
    as_of: Option<NaiveDate>,
) -> Result<FatalityRate, MetricsError> {
    let mut deaths = 0u64;
    let mut infected = 0u64;
    for r in records {
        if region.is_some() && r.region() != region {
            continue;
        }
        if as_of.is_some_and(|d| r.date_announced > d) {
            continue;
        }
        infected += 1;
        if r.current_status == CaseStatus::Deceased
            && !as_of.is_some_and(|d| r.status_date() > d)
        {
            deaths += 1;
        }
    }
    if infected == 0 {
        return Err(MetricsError::NoCases);
    }
    Ok(FatalityRate {
        percent: 100.0 * deaths as f64 / infected as f64,
        deaths,
        infected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremeMetric {
    R0,
    Cfr,
}

/// One day of the min/max/national series behind the time-series plots.
///
/// A field is `None` when the metric is undefined that day (no infectors
/// or no cases in any region / nationally). `min ≤ national ≤ max` is
/// not guaranteed: the national value is a pooled ratio, not a mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DailyExtreme {
    pub date: NaiveDate,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub national: Option<f64>,
}

/// Per-day minimum and maximum of the metric across regions, alongside
/// the pooled national value. Days are binned by announcement date
/// (deaths by status-change date for the fatality rate).
pub fn daily_extremes(
    records: &[PatientRecord],
    graph: &ContactGraph,
    metric: ExtremeMetric,
) -> Vec<DailyExtreme> {
    #[derive(Default, Clone)]
    struct Tally {
        cases: u64,
        deaths: u64,
        edges: u64,
        // per-infector out-degree so far; an infector appears once its
        // first traced infectee is announced
        infector_degrees: HashMap<u32, u64>,
    }

    impl Tally {
        fn value(&self, metric: ExtremeMetric) -> Option<f64> {
            match metric {
                ExtremeMetric::R0 => {
                    let infectors = self.infector_degrees.len() as u64;
                    (infectors > 0).then(|| self.edges as f64 / infectors as f64)
                }
                ExtremeMetric::Cfr => {
                    (self.cases > 0).then(|| 100.0 * self.deaths as f64 / self.cases as f64)
                }
            }
        }
    }

    #[derive(Clone, Copy)]
    enum Event {
        Case,
        Death,
        Edge { infector: u32 },
    }

    let by_number: HashMap<u32, &PatientRecord> =
        records.iter().map(|r| (r.patient_number, r)).collect();

    // (date, region, event); region None pools into national only.
    let mut events: BTreeMap<NaiveDate, Vec<(Option<String>, Event)>> = BTreeMap::new();
    for r in records {
        let region = r.region().map(str::to_owned);
        events
            .entry(r.date_announced)
            .or_default()
            .push((region.clone(), Event::Case));
        if r.current_status == CaseStatus::Deceased {
            events
                .entry(r.status_date())
                .or_default()
                .push((region.clone(), Event::Death));
        }
    }
    for (infector, infectee) in graph.edges() {
        let Some(rec) = by_number.get(&infectee) else {
            continue;
        };
        let region = by_number
            .get(&infector)
            .and_then(|r| r.region())
            .map(str::to_owned);
        events
            .entry(rec.date_announced)
            .or_default()
            .push((region, Event::Edge { infector }));
    }

    let (Some(&first), Some(&last)) = (events.keys().next(), events.keys().next_back()) else {
        return Vec::new();
    };

    let mut regional: BTreeMap<String, Tally> = BTreeMap::new();
    let mut national = Tally::default();
    let mut out = Vec::new();
    let mut day = first;
    loop {
        for (region, event) in events.get(&day).map_or(&[][..], Vec::as_slice) {
            let apply = |t: &mut Tally| match *event {
                Event::Case => t.cases += 1,
                Event::Death => t.deaths += 1,
                Event::Edge { infector } => {
                    t.edges += 1;
                    *t.infector_degrees.entry(infector).or_insert(0) += 1;
                }
            };
            apply(&mut national);
            if let Some(r) = region {
                apply(regional.entry(r.clone()).or_default());
            }
        }
        let values: Vec<f64> = regional.values().filter_map(|t| t.value(metric)).collect();
        out.push(DailyExtreme {
            date: day,
            min: values.iter().copied().reduce(f64::min),
            max: values.iter().copied().reduce(f64::max),
            national: national.value(metric),
        });
        if day == last {
            break;
        }
        day = day.checked_add_days(Days::new(1)).expect("date overflow");
    }
    out
}
