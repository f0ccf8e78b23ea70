//! Undirected simple graphs in compressed sparse row form.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Immutable undirected simple graph.
///
/// Adjacency is stored in CSR layout with sorted neighbor lists. Every edge
/// `{i, j}` appears in both rows, so `degrees[i] == neighbors(i).len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    labels: Option<Vec<String>>,
}

/// Counts of what was dropped while building a graph from raw pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub pairs_read: usize,
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

impl Graph {
    /// Builds a graph over nodes `0..n` from index pairs.
    ///
    /// Self-loops and repeated edges (in either orientation) are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        Self::from_edges_with_report(n, edges).map(|(g, _)| g)
    }

    pub fn from_edges_with_report(
        n: usize,
        edges: &[(usize, usize)],
    ) -> Result<(Graph, LoadReport)> {
        let mut report = LoadReport {
            pairs_read: edges.len(),
            ..LoadReport::default()
        };
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            for idx in [a, b] {
                if idx >= n {
                    return Err(Error::OutOfBounds { index: idx, n });
                }
            }
            if a == b {
                report.self_loops += 1;
                continue;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        let mut dup_entries = 0;
        for row in adj.iter_mut() {
            row.sort_unstable();
            let before = row.len();
            row.dedup();
            dup_entries += before - row.len();
            targets.extend_from_slice(row);
            offsets.push(targets.len());
        }
        // each duplicate undirected edge removed two adjacency entries
        report.duplicate_edges = dup_entries / 2;
        Ok((
            Graph {
                offsets,
                targets,
                labels: None,
            },
            report,
        ))
    }

    /// Builds a graph from pairs of node identifiers.
    ///
    /// Identifiers are mapped to dense indices in first-seen order and kept
    /// as labels for output.
    pub fn from_edge_list<S: AsRef<str>>(pairs: &[(S, S)]) -> Graph {
        Self::from_edge_list_with_report(pairs).0
    }

    pub fn from_edge_list_with_report<S: AsRef<str>>(pairs: &[(S, S)]) -> (Graph, LoadReport) {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut labels: Vec<String> = Vec::new();
        let mut intern = |id: &str| -> usize {
            if let Some(&i) = index.get(id) {
                return i;
            }
            let i = labels.len();
            index.insert(id.to_string(), i);
            labels.push(id.to_string());
            i
        };
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .map(|(a, b)| (intern(a.as_ref()), intern(b.as_ref())))
            .collect();
        let n = labels.len();
        let (mut g, report) =
            Self::from_edges_with_report(n, &edges).expect("interned indices are in range");
        g.labels = Some(labels);
        (g, report)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Undirected edges as `(i, j)` with `i < j`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of node `i`: its original identifier if known, else the index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// Nodes with at least one neighbor.
    pub fn non_isolated(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.degree(i) > 0).collect()
    }

    /// Subgraph induced by `nodes`, re-indexed in the given order.
    ///
    /// Node `k` of the result is `nodes[k]` of `self`; labels carry over.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let n = self.n();
        let mut local = vec![usize::MAX; n];
        for (k, &i) in nodes.iter().enumerate() {
            if i >= n {
                return Err(Error::OutOfBounds { index: i, n });
            }
            local[i] = k;
        }
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &i in nodes {
            let start = targets.len();
            targets.extend(
                self.neighbors(i)
                    .iter()
                    .map(|&j| local[j])
                    .filter(|&k| k != usize::MAX),
            );
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| nodes.iter().map(|&i| l[i].clone()).collect());
        Ok(Graph {
            offsets,
            targets,
            labels,
        })
    }
}

/// A node subset with its cached edge statistics.
///
/// `w` counts every internal edge twice, `b` counts cut edges once and
/// `v = w + b` is the total degree of the subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    pub members: Vec<usize>,
    pub w: u64,
    pub b: u64,
    pub v: u64,
}

impl NodeSet {
    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of edges with both endpoints inside the set.
    #[inline]
    pub fn internal_edges(&self) -> u64 {
        self.w / 2
    }
}

/// Computes W(S), B(S) and V(S) for the node set `s`. Duplicates are ignored.
pub fn set_stats(g: &Graph, s: &[usize]) -> Result<NodeSet> {
    let n = g.n();
    let mut inside = vec![false; n];
    let mut members = Vec::with_capacity(s.len());
    for &i in s {
        if i >= n {
            return Err(Error::OutOfBounds { index: i, n });
        }
        if !inside[i] {
            inside[i] = true;
            members.push(i);
        }
    }
    members.sort_unstable();
    let (mut w, mut b) = (0u64, 0u64);
    for &i in &members {
        for &j in g.neighbors(i) {
            if inside[j] {
                w += 1;
            } else {
                b += 1;
            }
        }
    }
    Ok(NodeSet {
        members,
        w,
        b,
        v: w + b,
    })
}
