use std::collections::HashMap;
use std::io::BufRead;

use super::Graph;
use crate::{Error, Result};

/// Per-node label sets. An empty set means the node is unlabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeLabels {
    label_count: usize,
    assignments: Vec<Vec<u32>>,
    multi_label: bool,
}

impl NodeLabels {
    /// Label sets are sorted and deduplicated on the way in.
    pub fn new(label_count: usize, mut assignments: Vec<Vec<u32>>, multi_label: bool) -> Result<Self> {
        for (node, set) in assignments.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(&bad) = set.iter().find(|&&l| l as usize >= label_count) {
                return Err(Error::Config(format!("node {node} has label {bad} >= label count {label_count}")));
            }
            if !multi_label && set.len() > 1 {
                return Err(Error::Config(format!("node {node} has {} labels in single-label mode", set.len())));
            }
        }
        Ok(Self {
            label_count,
            assignments,
            multi_label,
        })
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn node_count(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_multi_label(&self) -> bool {
        self.multi_label
    }

    pub fn labels_of(&self, node: usize) -> &[u32] {
        &self.assignments[node]
    }

    pub fn is_labeled(&self, node: usize) -> bool {
        !self.assignments[node].is_empty()
    }

    /// Nodes carrying at least one label, ascending.
    pub fn labeled_nodes(&self) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&u| self.is_labeled(u)).collect()
    }

    /// Class of a single-label node.
    pub fn class_of(&self, node: usize) -> Option<u32> {
        match self.assignments[node].as_slice() {
            [c] if !self.multi_label => Some(*c),
            _ => None,
        }
    }
}

/// Reads `node_id label_id [label_id ...]` lines, resolving node tokens
/// through the graph's own node naming. Label ids are non-negative integers
/// and the label count is one past the largest id seen.
pub fn load_labels<R: BufRead>(src: R, multi_label: bool, graph: &Graph) -> Result<NodeLabels> {
    let lookup: HashMap<String, usize> = (0..graph.node_count()).map(|u| (graph.node_name(u), u)).collect();
    let mut assignments: Vec<Vec<u32>> = vec![Vec::new(); graph.node_count()];
    let mut max_label: Option<u32> = None;

    for (i, line) in src.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let tok = fields.next().expect("non-empty line has a first field");
        let node = *lookup
            .get(tok)
            .ok_or_else(|| Error::parse(lineno, format!("unknown node id {tok:?}")))?;
        let mut labels = Vec::new();
        for f in fields {
            let l: u32 = f
                .parse()
                .map_err(|_| Error::parse(lineno, format!("label id {f:?} is not a non-negative integer")))?;
            labels.push(l);
        }
        if labels.is_empty() {
            return Err(Error::parse(lineno, "node without label ids"));
        }
        let set = &mut assignments[node];
        set.extend(labels);
        set.sort_unstable();
        set.dedup();
        if !multi_label && set.len() > 1 {
            return Err(Error::parse(lineno, format!("node {tok:?} has more than one label in single-label mode")));
        }
        max_label = max_label.max(set.last().copied());
    }

    let label_count = max_label.map_or(0, |m| m as usize + 1);
    NodeLabels::new(label_count, assignments, multi_label)
}
