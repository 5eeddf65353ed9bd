//! Undirected friendship graph of the incumbent site.

use std::collections::HashMap;

use thiserror::Error;

use crate::cascade::NodeState;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("state vector has length {got}, graph has {expected} nodes")]
    StateLength { got: usize, expected: usize },
}

/// Simple undirected graph with dense node ids `0..node_count`.
///
/// Adjacency lists are sorted, symmetric, free of self-loops and duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    external_ids: Vec<u64>,
}

/// What was discarded while loading an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestSummary {
    pub lines_read: usize,
    pub edges_read: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

/// Degree of a node split by the state of its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborPartition {
    pub degree: usize,
    pub exclusive: usize,
    pub dual: usize,
}

impl Graph {
    /// Builds a graph on `node_count` nodes whose external ids equal the
    /// internal ones. Self-loops and repeated edges are dropped.
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); node_count];
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, node_count });
                }
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        let (graph, _) = Self::finish(adjacency, (0..node_count as u64).collect());
        Ok(graph)
    }

    /// Parses a SNAP-style edge list. See [`Graph::parse_edge_list_with_summary`].
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        Self::parse_edge_list_with_summary(text).map(|(g, _)| g)
    }

    /// Parses a whitespace-separated two-column edge list.
    ///
    /// Lines starting with `#` and blank lines are skipped. Edges are treated
    /// as undirected; self-loops are dropped and duplicates (in either
    /// direction) collapsed. Ids are remapped to `0..n` in order of first
    /// appearance.
    pub fn parse_edge_list_with_summary(text: &str) -> Result<(Self, IngestSummary), GraphError> {
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut external_ids = Vec::new();
        let mut adjacency: Vec<Vec<usize>> = Vec::new();
        let mut summary = IngestSummary::default();

        let mut intern = |id: u64, adjacency: &mut Vec<Vec<usize>>| -> usize {
            *index.entry(id).or_insert_with(|| {
                external_ids.push(id);
                adjacency.push(Vec::new());
                external_ids.len() - 1
            })
        };

        for (lineno, line) in text.lines().enumerate() {
            let line_number = lineno + 1;
            summary.lines_read += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_ascii_whitespace().collect();
            if tokens.len() != 2 {
                return Err(GraphError::Parse {
                    line: line_number,
                    message: format!("expected 2 tokens, found {}", tokens.len()),
                });
            }
            let parse = |tok: &str| {
                tok.parse::<u64>().map_err(|_| GraphError::Parse {
                    line: line_number,
                    message: format!("invalid node id {tok:?}"),
                })
            };
            let (a, b) = (parse(tokens[0])?, parse(tokens[1])?);
            summary.edges_read += 1;
            let u = intern(a, &mut adjacency);
            let v = intern(b, &mut adjacency);
            if u == v {
                summary.self_loops_dropped += 1;
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }

        let (graph, removed) = Self::finish(adjacency, external_ids);
        summary.duplicates_collapsed = removed;
        Ok((graph, summary))
    }

    /// Sorts and deduplicates adjacency lists; returns the number of
    /// undirected duplicate edges removed.
    fn finish(mut adjacency: Vec<Vec<usize>>, external_ids: Vec<u64>) -> (Self, usize) {
        let mut removed_entries = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            removed_entries += before - list.len();
        }
        // each duplicate undirected edge leaves one extra entry on both endpoints
        (
            Graph {
                adjacency,
                external_ids,
            },
            removed_entries / 2,
        )
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn external_id(&self, node: usize) -> u64 {
        self.external_ids[node]
    }

    pub fn external_ids(&self) -> &[u64] {
        &self.external_ids
    }

    /// Undirected edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_node(&self, node: usize) -> Result<(), GraphError> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node,
                node_count: self.node_count(),
            })
        }
    }

    /// Splits the degree of `node` into exclusive and dual neighbours.
    pub fn neighbor_partition(
        &self,
        states: &[NodeState],
        node: usize,
    ) -> Result<NeighborPartition, GraphError> {
        self.check_node(node)?;
        if states.len() != self.node_count() {
            return Err(GraphError::StateLength {
                got: states.len(),
                expected: self.node_count(),
            });
        }
        Ok(self.partition_unchecked(states, node))
    }

    pub(crate) fn partition_unchecked(
        &self,
        states: &[NodeState],
        node: usize,
    ) -> NeighborPartition {
        let neighbors = &self.adjacency[node];
        let dual = neighbors
            .iter()
            .filter(|&&v| states[v] == NodeState::Dual)
            .count();
        NeighborPartition {
            degree: neighbors.len(),
            exclusive: neighbors.len() - dual,
            dual,
        }
    }
}
