use std::collections::{BTreeMap, BTreeSet};

use super::{Coloring, Graph, GraphError, VertexId};

/// Full orientation: every edge points from the endpoint with the larger
/// label to its parent, the endpoint with the strictly smaller label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    parent_of_edge: BTreeMap<(VertexId, VertexId), VertexId>,
    labels: BTreeMap<VertexId, u32>,
}

impl Orientation {
    /// Orients `g` by `labels`; adjacent vertices must carry distinct labels.
    pub fn from_labels(g: &Graph, labels: BTreeMap<VertexId, u32>) -> Result<Self, GraphError> {
        let mut parent_of_edge = BTreeMap::new();
        for (u, v) in g.edges() {
            let lu = *labels.get(&u).ok_or(GraphError::MissingLabel(u))?;
            let lv = *labels.get(&v).ok_or(GraphError::MissingLabel(v))?;
            if lu == lv {
                return Err(GraphError::LabelTie(u, v));
            }
            parent_of_edge.insert((u, v), if lu < lv { u } else { v });
        }
        Ok(Orientation {
            parent_of_edge,
            labels,
        })
    }

    pub fn label(&self, v: VertexId) -> u32 {
        self.labels[&v]
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, u32> {
        &self.labels
    }

    /// Parent endpoint of the edge `{u, v}`.
    pub fn parent_of(&self, u: VertexId, v: VertexId) -> Option<VertexId> {
        self.parent_of_edge.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn edge_parents(&self) -> &BTreeMap<(VertexId, VertexId), VertexId> {
        &self.parent_of_edge
    }

    /// Parents of `v`: neighbors with a smaller label, in increasing id order.
    pub fn parents(&self, g: &Graph, v: VertexId) -> Vec<VertexId> {
        g.neighbors(v)
            .filter(|&u| self.parent_of(u, v) == Some(u))
            .collect()
    }

    /// Kahn's algorithm over child→parent arcs.
    pub fn is_acyclic(&self, g: &Graph) -> bool {
        self.topological_order(g).is_some()
    }

    /// Vertices ordered so that every parent precedes its children.
    pub fn topological_order(&self, g: &Graph) -> Option<Vec<VertexId>> {
        let mut pending: BTreeMap<VertexId, usize> = g
            .vertices()
            .map(|v| (v, self.parents(g, v).len()))
            .collect();
        let mut ready: Vec<VertexId> = pending
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut order = Vec::with_capacity(g.vertex_count());
        while let Some(v) = ready.pop() {
            order.push(v);
            for u in g.neighbors(v) {
                if self.parent_of(u, v) == Some(v) {
                    let d = pending.get_mut(&u).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.push(u);
                    }
                }
            }
        }
        (order.len() == g.vertex_count()).then_some(order)
    }

    /// Number of vertices on the longest directed path.
    pub fn longest_path_vertices(&self, g: &Graph) -> usize {
        let Some(order) = self.topological_order(g) else {
            return 0;
        };
        let mut depth: BTreeMap<VertexId, usize> = BTreeMap::new();
        for v in order {
            let d = self
                .parents(g, v)
                .iter()
                .map(|p| depth[p])
                .max()
                .unwrap_or(0)
                + 1;
            depth.insert(v, d);
        }
        depth.values().copied().max().unwrap_or(0)
    }
}

/// Orientation whose labels are the colors of a proper complete coloring.
pub fn orientation_from_coloring(g: &Graph, c: &Coloring) -> Result<Orientation, GraphError> {
    let report = super::validate_coloring(g, c, true);
    if !report.proper {
        if let Some(v) = g.vertices().find(|&v| c.get(v) == 0) {
            return Err(GraphError::Uncolored(v));
        }
        return Err(GraphError::ImproperColoring(report.violations.len()));
    }
    Orientation::from_labels(g, g.vertices().map(|v| (v, c.get(v))).collect())
}

/// Orientation towards the larger id; the smaller id is the parent.
pub fn orientation_by_id(g: &Graph) -> Orientation {
    Orientation::from_labels(g, g.vertices().map(|v| (v, v)).collect()).expect("ids are distinct")
}

/// Partial orientation: each vertex keeps an ordered parent list `M(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialOrientation {
    pub parent_sets: BTreeMap<VertexId, Vec<VertexId>>,
    pub labels: BTreeMap<VertexId, u32>,
}

impl PartialOrientation {
    pub fn parents(&self, v: VertexId) -> &[VertexId] {
        self.parent_sets.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn max_parents(&self) -> usize {
        self.parent_sets.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Every parent is a smaller-labeled neighbor, every parent set is
    /// independent, and (given `k`) no vertex has more than `k` parents.
    pub fn validate(&self, g: &Graph, k: Option<usize>) -> bool {
        self.parent_sets.iter().all(|(&v, parents)| {
            let lv = self.labels[&v];
            parents
                .iter()
                .all(|&u| g.contains_edge(u, v) && self.labels[&u] < lv)
                && g.is_independent(parents)
                && k.is_none_or(|k| parents.len() <= k)
                && parents.iter().collect::<BTreeSet<_>>().len() == parents.len()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn smaller_color_is_parent() {
        let c = Coloring::from_map([(1, 1), (2, 2), (3, 3)].into(), 3);
        let o = orientation_from_coloring(&k3(), &c).unwrap();
        assert_eq!(o.parent_of(1, 2), Some(1));
        assert_eq!(o.parent_of(3, 1), Some(1));
        assert_eq!(o.parent_of(2, 3), Some(2));
        assert!(o.is_acyclic(&k3()));
    }

    #[test]
    fn leaves_parent_the_center_of_p3() {
        let p3 = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        let c = Coloring::from_map([(1, 1), (2, 2), (3, 1)].into(), 2);
        let o = orientation_from_coloring(&p3, &c).unwrap();
        assert_eq!(o.parents(&p3, 2), vec![1, 3]);
        assert!(o.parents(&p3, 1).is_empty());
        assert!(o.is_acyclic(&p3));
    }

    #[test]
    fn edgeless_graph_has_no_parents() {
        let g = Graph::with_vertices(4);
        let o = orientation_from_coloring(&g, &Coloring::from_ids(&g)).unwrap();
        assert!(o.edge_parents().is_empty());
    }

    #[test]
    fn rejects_improper_or_incomplete() {
        let c = Coloring::from_map([(1, 1), (2, 1), (3, 2)].into(), 2);
        assert_eq!(
            orientation_from_coloring(&k3(), &c),
            Err(GraphError::ImproperColoring(1))
        );
        let c = Coloring::from_map([(1, 1), (2, 2)].into(), 2);
        assert_eq!(
            orientation_from_coloring(&k3(), &c),
            Err(GraphError::Uncolored(3))
        );
    }

    #[test]
    fn id_orientation() {
        let p3 = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        let o = orientation_by_id(&p3);
        assert_eq!(o.parent_of(1, 2), Some(1));
        assert_eq!(o.parent_of(2, 3), Some(2));
        assert_eq!(orientation_by_id(&k3()).longest_path_vertices(&k3()), 3);

        let star = Graph::from_edges(4, &[(4, 1), (4, 2), (4, 3)]).unwrap();
        let o = orientation_by_id(&star);
        assert_eq!(o.parents(&star, 4), vec![1, 2, 3]);
    }
}
