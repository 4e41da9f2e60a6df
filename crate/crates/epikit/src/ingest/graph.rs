//! Directed infector→infectee contact graph.

use super::{IngestError, ParseWarning, PatientRecord};
use std::collections::{BTreeMap, HashMap};

/// Directed graph over patient numbers; an edge `(a, b)` records that
/// patient `b` is suspected to have contracted the infection from `a`.
#[derive(Debug, Clone, Default)]
pub struct ContactGraph {
    /// Patient number → region annotation.
    nodes: BTreeMap<u32, Option<String>>,
    out_edges: BTreeMap<u32, Vec<u32>>,
    in_edges: BTreeMap<u32, Vec<u32>>,
    edge_count: usize,
}

impl ContactGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, patient: u32) -> bool {
        self.nodes.contains_key(&patient)
    }

    pub fn region(&self, patient: u32) -> Option<&str> {
        self.nodes.get(&patient).and_then(|r| r.as_deref())
    }

    pub fn nodes(&self) -> impl Iterator<Item = u32> + '_ {
        self.nodes.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out_edges
            .iter()
            .flat_map(|(&src, dsts)| dsts.iter().map(move |&dst| (src, dst)))
    }

    /// Number of persons this patient is recorded to have infected.
    pub fn out_degree(&self, patient: u32) -> usize {
        self.out_edges.get(&patient).map_or(0, Vec::len)
    }

    /// Suspected infectors of this patient.
    pub fn infectors_of(&self, patient: u32) -> &[u32] {
        self.in_edges.get(&patient).map_or(&[], Vec::as_slice)
    }

    /// Persons recorded as infected by this patient.
    pub fn infectees_of(&self, patient: u32) -> &[u32] {
        self.out_edges.get(&patient).map_or(&[], Vec::as_slice)
    }

    /// Nodes with out-degree ≥ 1.
    pub fn infectors(&self) -> impl Iterator<Item = u32> + '_ {
        self.out_edges
            .iter()
            .filter(|(_, dsts)| !dsts.is_empty())
            .map(|(&src, _)| src)
    }
}

/// Build the contact graph from parsed records.
///
/// Dangling contracted-from references produce a warning and no edge.
/// A cycle in the resulting graph signals corrupt data and is fatal.
pub fn build_contact_graph(
    records: &[PatientRecord],
) -> Result<(ContactGraph, Vec<ParseWarning>), IngestError> {
    let mut graph = ContactGraph::default();
    let mut warnings = Vec::new();

    for r in records {
        graph
            .nodes
            .insert(r.patient_number, r.region().map(str::to_owned));
    }
    for r in records {
        for &src in &r.contracted_from {
            if !graph.nodes.contains_key(&src) {
                warnings.push(ParseWarning::new(
                    None,
                    Some("contracted_from"),
                    format!(
                        "patient {} references unknown infector P{src}; edge omitted",
                        r.patient_number
                    ),
                ));
                continue;
            }
            graph.out_edges.entry(src).or_default().push(r.patient_number);
            graph.in_edges.entry(r.patient_number).or_default().push(src);
            graph.edge_count += 1;
        }
    }

    if let Some(chain) = find_cycle(&graph) {
        return Err(IngestError::CycleDetected { chain });
    }
    Ok((graph, warnings))
}

/// DFS cycle search; returns the offending chain (closed: first == last).
fn find_cycle(graph: &ContactGraph) -> Option<Vec<u32>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        InProgress,
        Done,
    }
    let mut marks: HashMap<u32, Mark> = HashMap::new();

    for start in graph.nodes() {
        if marks.contains_key(&start) {
            continue;
        }
        // Iterative DFS keeping the current path for chain reconstruction.
        let mut stack: Vec<(u32, usize)> = vec![(start, 0)];
        let mut path: Vec<u32> = Vec::new();
        while let Some(&(node, next)) = stack.last() {
            if next == 0 {
                marks.insert(node, Mark::InProgress);
                path.push(node);
            }
            let children = graph.out_edges.get(&node).map_or(&[][..], Vec::as_slice);
            if let Some(&child) = children.get(next) {
                stack.last_mut().expect("frame").1 += 1;
                match marks.get(&child) {
                    Some(Mark::InProgress) => {
                        let pos = path.iter().position(|&p| p == child).unwrap_or(0);
                        let mut chain = path[pos..].to_vec();
                        chain.push(child);
                        return Some(chain);
                    }
                    Some(Mark::Done) => {}
                    None => stack.push((child, 0)),
                }
            } else {
                marks.insert(node, Mark::Done);
                path.pop();
                stack.pop();
            }
        }
    }
    None
}
