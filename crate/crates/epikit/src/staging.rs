//! Transmission-state classification of the infected population.
//!
//! Every infected person gets an `infection_transmission` score equal to
//! their chain depth from a traced root of the contact graph:
//!
//! - score 0: no onward source, infection imported from outside (state 1);
//! - score 1: infected by exactly one identified local chain step (state 2);
//! - score ≥ 2: two or more chain steps from any traced root, or a local
//!   case whose source is untraceable (state 3).
//!
//! A person with no traced infector, no import marker, and no local
//! marker cannot be placed in a chain at all and is reported separately
//! as a state-4 suspect; estimating that population is out of scope.

use crate::ingest::{ContactGraph, PatientRecord, TransmissionType};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransmissionScore {
    pub person: u32,
    pub infection_transmission: u32,
}

/// Chain-depth score for one record.
///
/// Returns `None` when chain membership is unknown (no traced infector
/// and transmission type neither imported nor local).
pub fn transmission_score(
    graph: &ContactGraph,
    record: &PatientRecord,
) -> Option<TransmissionScore> {
    let person = record.patient_number;
    if !graph.infectors_of(person).is_empty() {
        let mut memo = HashMap::new();
        return Some(TransmissionScore {
            person,
            infection_transmission: depth_of(graph, person, &mut memo),
        });
    }
    match record.transmission_type {
        TransmissionType::Imported => Some(TransmissionScore {
            person,
            infection_transmission: 0,
        }),
        // local with no identified source: untraceable, state 3
        TransmissionType::Local => Some(TransmissionScore {
            person,
            infection_transmission: 2,
        }),
        TransmissionType::Unknown => None,
    }
}

/// Longest chain length from any root to `person`.
fn depth_of(graph: &ContactGraph, person: u32, memo: &mut HashMap<u32, u32>) -> u32 {
    if let Some(&d) = memo.get(&person) {
        return d;
    }
    // graph is acyclic by construction; recursion bounded by chain length
    let d = graph
        .infectors_of(person)
        .iter()
        .map(|&src| depth_of(graph, src, memo) + 1)
        .max()
        .unwrap_or(0);
    memo.insert(person, d);
    d
}

/// Output of the state-identification pass: a partition of the infected
/// population, with state-4 suspects kept aside.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateAssignment {
    pub set1: BTreeSet<u32>,
    pub set2: BTreeSet<u32>,
    pub set3: BTreeSet<u32>,
    pub unclassified: BTreeSet<u32>,
}

impl StateAssignment {
    pub fn classified_total(&self) -> usize {
        self.set1.len() + self.set2.len() + self.set3.len()
    }

    pub fn state_of(&self, person: u32) -> Option<u8> {
        if self.set1.contains(&person) {
            Some(1)
        } else if self.set2.contains(&person) {
            Some(2)
        } else if self.set3.contains(&person) {
            Some(3)
        } else if self.unclassified.contains(&person) {
            None
        } else {
            panic!("person {person} was not part of the assignment input")
        }
    }
}

/// Partition all records into transmission states by chain depth.
pub fn classify_states(records: &[PatientRecord], graph: &ContactGraph) -> StateAssignment {
    let depths = chain_depths(graph);
    let mut assignment = StateAssignment {
        set1: BTreeSet::new(),
        set2: BTreeSet::new(),
        set3: BTreeSet::new(),
        unclassified: BTreeSet::new(),
    };
    for r in records {
        let p = r.patient_number;
        let score = if !graph.infectors_of(p).is_empty() {
            Some(depths.get(&p).copied().unwrap_or(0))
        } else {
            match r.transmission_type {
                TransmissionType::Imported => Some(0),
                TransmissionType::Local => Some(2),
                TransmissionType::Unknown => None,
            }
        };
        match score {
            Some(0) => assignment.set1.insert(p),
            Some(1) => assignment.set2.insert(p),
            Some(_) => assignment.set3.insert(p),
            None => assignment.unclassified.insert(p),
        };
    }
    assignment
}

/// Longest-path depth for every node, computed in topological order.
fn chain_depths(graph: &ContactGraph) -> BTreeMap<u32, u32> {
    let mut in_degree: BTreeMap<u32, usize> = graph
        .nodes()
        .map(|n| (n, graph.infectors_of(n).len()))
        .collect();
    let mut depths: BTreeMap<u32, u32> = BTreeMap::new();
    let mut queue: VecDeque<u32> = in_degree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&n, _)| n)
        .collect();
    while let Some(node) = queue.pop_front() {
        let d = depths.get(&node).copied().unwrap_or(0);
        for &dst in graph.infectees_of(node) {
            let entry = depths.entry(dst).or_insert(0);
            *entry = (*entry).max(d + 1);
            let deg = in_degree.get_mut(&dst).expect("node");
            *deg -= 1;
            if *deg == 0 {
                queue.push_back(dst);
            }
        }
    }
    depths
}

/// Per-region state counts with an overall total row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionStateCounts {
    pub region: String,
    pub state1: u64,
    pub state2: u64,
    pub state3: u64,
    pub unclassified: u64,
}

impl RegionStateCounts {
    fn classified(&self) -> u64 {
        self.state1 + self.state2 + self.state3
    }

    /// Percentages of classified persons per state; `None` when nobody
    /// in scope was classified.
    pub fn percentages(&self) -> Option<(f64, f64, f64)> {
        let total = self.classified();
        (total > 0).then(|| {
            (
                100.0 * self.state1 as f64 / total as f64,
                100.0 * self.state2 as f64 / total as f64,
                100.0 * self.state3 as f64 / total as f64,
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub rows: Vec<RegionStateCounts>,
    pub total: RegionStateCounts,
}

/// Aggregate an assignment into per-region counts plus the overall row.
pub fn state_summary(assignment: &StateAssignment, records: &[PatientRecord]) -> StateSummary {
    let mut by_region: BTreeMap<String, RegionStateCounts> = BTreeMap::new();
    let mut total = RegionStateCounts {
        region: "TOTAL".into(),
        state1: 0,
        state2: 0,
        state3: 0,
        unclassified: 0,
    };
    for r in records {
        let region = r.region().unwrap_or("(unknown)").to_owned();
        let row = by_region
            .entry(region.clone())
            .or_insert_with(|| RegionStateCounts {
                region,
                state1: 0,
                state2: 0,
                state3: 0,
                unclassified: 0,
            });
        match assignment.state_of(r.patient_number) {
            Some(1) => {
                row.state1 += 1;
                total.state1 += 1;
            }
            Some(2) => {
                row.state2 += 1;
                total.state2 += 1;
            }
            Some(3) => {
                row.state3 += 1;
                total.state3 += 1;
            }
            _ => {
                row.unclassified += 1;
                total.unclassified += 1;
            }
        }
    }
    StateSummary {
        rows: by_region.into_values().collect(),
        total,
    }
}

/// One day of cumulative per-state counts, binned by announcement date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DailyStateCount {
    pub date: chrono::NaiveDate,
    pub state1: u64,
    pub state2: u64,
    pub state3: u64,
}

/// Cumulative state-count series over the announcement-date range.
pub fn daily_state_counts(
    records: &[PatientRecord],
    assignment: &StateAssignment,
) -> Vec<DailyStateCount> {
    let mut deltas: BTreeMap<chrono::NaiveDate, (u64, u64, u64)> = BTreeMap::new();
    for r in records {
        let entry = deltas.entry(r.date_announced).or_default();
        match assignment.state_of(r.patient_number) {
            Some(1) => entry.0 += 1,
            Some(2) => entry.1 += 1,
            Some(3) => entry.2 += 1,
            _ => {}
        }
    }
    let (Some(&first), Some(&last)) = (deltas.keys().next(), deltas.keys().next_back()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let (mut c1, mut c2, mut c3) = (0, 0, 0);
    let mut day = first;
    loop {
        if let Some(&(d1, d2, d3)) = deltas.get(&day) {
            c1 += d1;
            c2 += d2;
            c3 += d3;
        }
        out.push(DailyStateCount {
            date: day,
            state1: c1,
            state2: c2,
            state3: c3,
        });
        if day == last {
            break;
        }
        day = day
            .checked_add_days(chrono::Days::new(1))
            .expect("date overflow");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_contact_graph, CaseStatus, Gender};
    use chrono::NaiveDate;

    fn record(
        patient: u32,
        transmission: TransmissionType,
        contracted_from: Vec<u32>,
    ) -> PatientRecord {
        PatientRecord {
            patient_number: patient,
            state_patient_number: None,
            date_announced: NaiveDate::from_ymd_opt(2020, 3, 1).unwrap(),
            age_bracket: None,
            gender: Gender::Unknown,
            detected_city: None,
            detected_district: None,
            detected_state: None,
            state_code: Some("XX".into()),
            current_status: CaseStatus::Hospitalized,
            notes: None,
            contracted_from,
            nationality: None,
            transmission_type: transmission,
            status_change_date: None,
        }
    }

    /// A(1)→C(3)→E(5), B(2)→D(4)→F(6); A and B imported.
    fn two_chain_fixture() -> Vec<PatientRecord> {
        vec![
            record(1, TransmissionType::Imported, vec![]),
            record(2, TransmissionType::Imported, vec![]),
            record(3, TransmissionType::Local, vec![1]),
            record(4, TransmissionType::Local, vec![2]),
            record(5, TransmissionType::Local, vec![3]),
            record(6, TransmissionType::Local, vec![4]),
        ]
    }

    #[test]
    fn imported_root_scores_zero() {
        let records = vec![record(1, TransmissionType::Imported, vec![])];
        let graph = build_contact_graph(&records).unwrap().0;
        let score = transmission_score(&graph, &records[0]).unwrap();
        assert_eq!(score.infection_transmission, 0);
    }

    #[test]
    fn first_chain_step_scores_one() {
        let records = vec![
            record(6, TransmissionType::Imported, vec![]),
            record(7, TransmissionType::Imported, vec![6]),
        ];
        let graph = build_contact_graph(&records).unwrap().0;
        let score = transmission_score(&graph, &records[1]).unwrap();
        assert_eq!(score.infection_transmission, 1);
    }

    #[test]
    fn second_chain_step_scores_two() {
        let records = two_chain_fixture();
        let graph = build_contact_graph(&records).unwrap().0;
        let score = transmission_score(&graph, &records[4]).unwrap();
        assert_eq!(score.infection_transmission, 2);
    }

    #[test]
    fn untraceable_local_scores_at_least_two() {
        let records = vec![record(9, TransmissionType::Local, vec![])];
        let graph = build_contact_graph(&records).unwrap().0;
        let score = transmission_score(&graph, &records[0]).unwrap();
        assert!(score.infection_transmission >= 2);
    }

    #[test]
    fn isolated_imports_all_land_in_set1() {
        let records = vec![
            record(1, TransmissionType::Imported, vec![]),
            record(2, TransmissionType::Imported, vec![]),
        ];
        let graph = build_contact_graph(&records).unwrap().0;
        let a = classify_states(&records, &graph);
        assert_eq!(a.set1, BTreeSet::from([1, 2]));
        assert!(a.set2.is_empty() && a.set3.is_empty() && a.unclassified.is_empty());
    }

    #[test]
    fn empty_population_gives_empty_sets() {
        let graph = build_contact_graph(&[]).unwrap().0;
        let a = classify_states(&[], &graph);
        assert_eq!(a.classified_total(), 0);
        assert!(a.unclassified.is_empty());
    }

    #[test]
    fn two_chain_fixture_partitions_by_depth() {
        let records = two_chain_fixture();
        let graph = build_contact_graph(&records).unwrap().0;
        let a = classify_states(&records, &graph);
        assert_eq!(a.set1, BTreeSet::from([1, 2]));
        assert_eq!(a.set2, BTreeSet::from([3, 4]));
        assert_eq!(a.set3, BTreeSet::from([5, 6]));
        assert!(a.unclassified.is_empty());
    }

    #[test]
    fn unknown_source_without_markers_is_unclassified() {
        let records = vec![record(1, TransmissionType::Unknown, vec![])];
        let graph = build_contact_graph(&records).unwrap().0;
        let a = classify_states(&records, &graph);
        assert_eq!(a.unclassified, BTreeSet::from([1]));
    }

    #[test]
    fn summary_percentages_for_two_chain_fixture() {
        let records = two_chain_fixture();
        let graph = build_contact_graph(&records).unwrap().0;
        let a = classify_states(&records, &graph);
        let summary = state_summary(&a, &records);
        let (p1, p2, p3) = summary.total.percentages().unwrap();
        assert!((p1 - 100.0 / 3.0).abs() < 1e-9);
        assert!((p2 - 100.0 / 3.0).abs() < 1e-9);
        assert!((p3 - 100.0 / 3.0).abs() < 1e-9);
        assert!((p1 + p2 + p3 - 100.0).abs() < 1e-9);
    }

    #[test]
    fn single_person_summary_is_all_state1() {
        let records = vec![record(1, TransmissionType::Imported, vec![])];
        let graph = build_contact_graph(&records).unwrap().0;
        let summary = state_summary(&classify_states(&records, &graph), &records);
        assert_eq!(summary.total.percentages(), Some((100.0, 0.0, 0.0)));
    }

    #[test]
    fn deepening_a_chain_never_promotes_out_of_set3() {
        let mut records = two_chain_fixture();
        let graph = build_contact_graph(&records).unwrap().0;
        let before = classify_states(&records, &graph);
        // extend the first chain one step deeper
        records.push(record(7, TransmissionType::Local, vec![5]));
        let graph = build_contact_graph(&records).unwrap().0;
        let after = classify_states(&records, &graph);
        for &p in &before.set3 {
            assert!(after.set3.contains(&p));
        }
    }

    #[test]
    fn classification_ignores_record_order() {
        let mut records = two_chain_fixture();
        let graph = build_contact_graph(&records).unwrap().0;
        let a = classify_states(&records, &graph);
        records.reverse();
        let graph = build_contact_graph(&records).unwrap().0;
        let b = classify_states(&records, &graph);
        assert_eq!(a, b);
    }

    #[test]
    fn daily_series_is_cumulative() {
        let mut records = two_chain_fixture();
        records[2].date_announced = NaiveDate::from_ymd_opt(2020, 3, 2).unwrap();
        records[4].date_announced = NaiveDate::from_ymd_opt(2020, 3, 4).unwrap();
        let graph = build_contact_graph(&records).unwrap().0;
        let a = classify_states(&records, &graph);
        let series = daily_state_counts(&records, &a);
        assert_eq!(series.len(), 4);
        let last = series.last().unwrap();
        assert_eq!((last.state1, last.state2, last.state3), (2, 2, 2));
        assert_eq!(series[0].state3, 1);
        assert_eq!(series[3].state3, 2);
    }
}
