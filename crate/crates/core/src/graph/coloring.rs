use std::collections::{BTreeMap, BTreeSet};

use super::{Color, Graph, GraphError, VertexId};

/// Vertex coloring with a declared palette size. Color 0 means uncolored.
///
/// Properness is a predicate checked by [`validate_coloring`], not an
/// invariant of the type: defective colorings are ordinary values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coloring {
    assignment: BTreeMap<VertexId, Color>,
    palette: Color,
}

impl Coloring {
    pub fn new(palette: Color) -> Self {
        Coloring {
            assignment: BTreeMap::new(),
            palette,
        }
    }

    /// Builds a coloring, raising `palette` if some color exceeds it.
    pub fn from_map(assignment: BTreeMap<VertexId, Color>, palette: Color) -> Self {
        let max = assignment.values().copied().max().unwrap_or(0);
        Coloring {
            assignment,
            palette: palette.max(max),
        }
    }

    /// Every vertex gets its own id as color.
    pub fn from_ids(g: &Graph) -> Self {
        Coloring::from_map(g.vertices().map(|v| (v, v)).collect(), 0)
    }

    pub fn palette(&self) -> Color {
        self.palette
    }

    pub fn set_palette(&mut self, palette: Color) {
        self.palette = palette.max(self.max_color());
    }

    pub fn get(&self, v: VertexId) -> Color {
        self.assignment.get(&v).copied().unwrap_or(0)
    }

    pub fn set(&mut self, v: VertexId, color: Color) {
        self.palette = self.palette.max(color);
        self.assignment.insert(v, color);
    }

    pub fn remove(&mut self, v: VertexId) {
        self.assignment.remove(&v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Color)> + '_ {
        self.assignment.iter().map(|(&v, &c)| (v, c))
    }

    pub fn as_map(&self) -> &BTreeMap<VertexId, Color> {
        &self.assignment
    }

    pub fn max_color(&self) -> Color {
        self.assignment.values().copied().max().unwrap_or(0)
    }

    pub fn colors_used(&self) -> usize {
        self.assignment
            .values()
            .filter(|&&c| c != 0)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Restriction to `members`.
    pub fn restrict(&self, members: &BTreeSet<VertexId>) -> Coloring {
        Coloring {
            assignment: members.iter().map(|&v| (v, self.get(v))).collect(),
            palette: self.palette,
        }
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        validate_coloring(g, self, true).proper
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringReport {
    pub proper: bool,
    pub violations: Vec<(VertexId, VertexId)>,
    pub colors_used: usize,
}

/// Proper iff no edge joins two equal nonzero colors and, when
/// `require_complete`, no vertex of `g` is uncolored.
pub fn validate_coloring(g: &Graph, c: &Coloring, require_complete: bool) -> ColoringReport {
    let violations: Vec<_> = g
        .edges()
        .filter(|&(u, v)| {
            let cu = c.get(u);
            cu != 0 && cu == c.get(v)
        })
        .collect();
    let complete = !require_complete || g.vertices().all(|v| c.get(v) != 0);
    let colors_used = g
        .vertices()
        .map(|v| c.get(v))
        .filter(|&x| x != 0)
        .collect::<BTreeSet<_>>()
        .len();
    ColoringReport {
        proper: violations.is_empty() && complete,
        violations,
        colors_used,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectReport {
    pub per_vertex: BTreeMap<VertexId, usize>,
    pub max_defect: usize,
}

/// Number of same-colored neighbors of each vertex.
pub fn coloring_defect(g: &Graph, c: &Coloring) -> Result<DefectReport, GraphError> {
    let mut per_vertex = BTreeMap::new();
    for v in g.vertices() {
        let color = c.get(v);
        if color == 0 {
            return Err(GraphError::Uncolored(v));
        }
        per_vertex.insert(v, g.neighbors(v).filter(|&u| c.get(u) == color).count());
    }
    let max_defect = per_vertex.values().copied().max().unwrap_or(0);
    Ok(DefectReport {
        per_vertex,
        max_defect,
    })
}
