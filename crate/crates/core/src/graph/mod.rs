//! Undirected simple graphs with stable positive vertex ids, plus the
//! colorings, orientations and validators built on top of them.

mod change;
mod coloring;
pub mod enumerate;
mod generate;
mod independence;
pub mod io;
mod orientation;

use std::collections::{BTreeMap, BTreeSet};

pub use change::{ChangeBatch, ChangeEvent};
pub use coloring::{coloring_defect, validate_coloring, Coloring, ColoringReport, DefectReport};
pub use generate::{generate_graph, GraphFamily};
pub use independence::{
    max_independent_set_size, neighborhood_independence, neighborhood_independence_with_cap,
    DEFAULT_INDEPENDENCE_DEGREE_CAP,
};
pub use orientation::{
    orientation_by_id, orientation_from_coloring, Orientation, PartialOrientation,
};

use thiserror::Error;

pub type VertexId = u32;
pub type Color = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex id 0 is reserved")]
    ZeroVertexId,
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("vertex {0} does not exist")]
    MissingVertex(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge {0}-{1} already exists")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge {0}-{1} does not exist")]
    MissingEdge(VertexId, VertexId),
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("vertex {vertex} has degree {degree}, above the exhaustive-search cap {cap}")]
    DegreeAboveCap {
        vertex: VertexId,
        degree: usize,
        cap: usize,
    },
    #[error("coloring is not proper: {0} conflicting edges")]
    ImproperColoring(usize),
    #[error("vertex {0} is uncolored")]
    Uncolored(VertexId),
    #[error("adjacent vertices {0} and {1} carry the same label")]
    LabelTie(VertexId, VertexId),
    #[error("missing label for vertex {0}")]
    MissingLabel(VertexId),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An undirected simple graph.
///
/// Adjacency lives in ordered maps so that iteration order, and therefore
/// every simulation built on top of it, is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adjacency: BTreeMap<VertexId, BTreeSet<VertexId>>,
    edge_count: usize,
    max_degree: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Edgeless graph on ids `1..=n`.
    pub fn with_vertices(n: u32) -> Self {
        let mut g = Graph::new();
        for v in 1..=n {
            g.adjacency.insert(v, BTreeSet::new());
        }
        g
    }

    pub fn from_edges(n: u32, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut g = Graph::with_vertices(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if v == 0 {
            return Err(GraphError::ZeroVertexId);
        }
        if self.adjacency.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.adjacency.insert(v, BTreeSet::new());
        Ok(())
    }

    /// Removes `v` and its incident edges, returning its former neighbors.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<BTreeSet<VertexId>, GraphError> {
        let neighbors = self
            .adjacency
            .remove(&v)
            .ok_or(GraphError::MissingVertex(v))?;
        for u in &neighbors {
            if let Some(adj) = self.adjacency.get_mut(u) {
                adj.remove(&v);
            }
        }
        self.edge_count -= neighbors.len();
        self.recompute_max_degree();
        Ok(neighbors)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !self.adjacency.contains_key(&u) {
            return Err(GraphError::MissingVertex(u));
        }
        if !self.adjacency.contains_key(&v) {
            return Err(GraphError::MissingVertex(v));
        }
        if !self.adjacency.get_mut(&u).unwrap().insert(v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adjacency.get_mut(&v).unwrap().insert(u);
        self.edge_count += 1;
        self.max_degree = self.max_degree.max(self.degree(u)).max(self.degree(v));
        Ok(())
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        let removed = self
            .adjacency
            .get_mut(&u)
            .map(|adj| adj.remove(&v))
            .unwrap_or(false);
        if !removed {
            return Err(GraphError::MissingEdge(u.min(v), u.max(v)));
        }
        self.adjacency.get_mut(&v).unwrap().remove(&u);
        self.edge_count -= 1;
        if self.degree(u) + 1 == self.max_degree || self.degree(v) + 1 == self.max_degree {
            self.recompute_max_degree();
        }
        Ok(())
    }

    fn recompute_max_degree(&mut self) {
        self.max_degree = self
            .adjacency
            .values()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(0);
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency.get(&u).is_some_and(|adj| adj.contains(&v))
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency.get(&v).map_or(0, BTreeSet::len)
    }

    /// Vertex ids in increasing order.
    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.adjacency.keys().copied()
    }

    /// Neighbors of `v` in increasing order; empty for an absent vertex.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency
            .get(&v)
            .into_iter()
            .flat_map(|adj| adj.iter().copied())
    }

    pub fn neighbor_set(&self, v: VertexId) -> Option<&BTreeSet<VertexId>> {
        self.adjacency.get(&v)
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&u, adj)| adj.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.adjacency.keys().next_back().copied()
    }

    /// The id handed to a newly inserted vertex: one past the current maximum.
    pub fn fresh_vertex_id(&self) -> VertexId {
        self.max_vertex_id().map_or(1, |m| m + 1)
    }

    /// Subgraph induced by `members`; ids absent from the graph are ignored.
    pub fn induced_subgraph(&self, members: &BTreeSet<VertexId>) -> Graph {
        let mut g = Graph::new();
        for &v in members {
            if let Some(adj) = self.adjacency.get(&v) {
                let kept: BTreeSet<VertexId> = adj.intersection(members).copied().collect();
                g.edge_count += kept.len();
                g.max_degree = g.max_degree.max(kept.len());
                g.adjacency.insert(v, kept);
            }
        }
        g.edge_count /= 2;
        g
    }

    /// Same vertex set, keeping only the edges for which `keep` holds.
    pub fn filter_edges(&self, mut keep: impl FnMut(VertexId, VertexId) -> bool) -> Graph {
        let mut g = Graph::new();
        for v in self.vertices() {
            g.adjacency.insert(v, BTreeSet::new());
        }
        for (u, v) in self.edges() {
            if keep(u, v) {
                g.add_edge(u, v).expect("edge of a simple graph");
            }
        }
        g
    }

    /// Whether the graph is connected (the empty graph counts as connected).
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.adjacency.keys().next().copied() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        seen.len() == self.vertex_count()
    }

    /// Whether `set` is independent in the graph.
    pub fn is_independent(&self, set: &[VertexId]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.contains_edge(u, v)))
    }

    /// Checks adjacency symmetry, the absence of self-loops and the cached
    /// counters. Used by tests and `verify`.
    pub fn check_invariants(&self) -> bool {
        let mut half_edges = 0;
        for (&u, adj) in &self.adjacency {
            if u == 0 || adj.contains(&u) {
                return false;
            }
            for v in adj {
                if !self.contains_edge(*v, u) {
                    return false;
                }
            }
            half_edges += adj.len();
        }
        let max = self
            .adjacency
            .values()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(0);
        half_edges == 2 * self.edge_count && max == self.max_degree
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_and_remove_keep_max_degree_cached() {
        let mut g = Graph::from_edges(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(g.max_degree(), 3);
        g.remove_edge(1, 4).unwrap();
        assert_eq!(g.max_degree(), 2);
        let former = g.remove_vertex(1).unwrap();
        assert_eq!(former, BTreeSet::from([2, 3]));
        assert_eq!(g.max_degree(), 0);
        assert_eq!(g.edge_count(), 0);
        assert!(g.check_invariants());
    }

    #[test]
    fn rejects_loops_duplicates_and_missing() {
        let mut g = Graph::with_vertices(3);
        assert_eq!(g.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        g.add_edge(1, 2).unwrap();
        assert_eq!(g.add_edge(2, 1), Err(GraphError::DuplicateEdge(1, 2)));
        assert_eq!(g.add_edge(1, 9), Err(GraphError::MissingVertex(9)));
        assert_eq!(g.remove_edge(2, 3), Err(GraphError::MissingEdge(2, 3)));
        assert_eq!(g.add_vertex(0), Err(GraphError::ZeroVertexId));
        assert_eq!(g.add_vertex(3), Err(GraphError::DuplicateVertex(3)));
    }

    #[test]
    fn edges_are_sorted_pairs() {
        let g = Graph::from_edges(4, &[(3, 1), (2, 4), (1, 2)]).unwrap();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(1, 2), (1, 3), (2, 4)]);
    }

    #[test]
    fn induced_subgraph_drops_outside_edges() {
        let g = Graph::from_edges(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let h = g.induced_subgraph(&BTreeSet::from([2, 3, 4]));
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 2);
        assert!(h.check_invariants());
        assert_eq!(g.fresh_vertex_id(), 5);
    }
}
