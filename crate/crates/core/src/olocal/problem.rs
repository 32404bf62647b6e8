use std::collections::BTreeMap;
use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use crate::graph::{Color, Graph, VertexId};
use crate::sim::WireSize;

/// What a vertex knows when it decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideContext {
    pub id: VertexId,
    /// Degree in the whole graph.
    pub degree: usize,
}

/// A problem each vertex can solve once its parents in an acyclic
/// orientation have decided.
pub trait OLocalProblem: Clone + Send + Sync {
    type Decision: Clone + Eq + Debug + Display + WireSize + Send + Sync;

    fn name(&self) -> &'static str;

    /// Must be a pure function of its arguments.
    fn decide(
        &self,
        ctx: &DecideContext,
        parents: &BTreeMap<VertexId, Self::Decision>,
    ) -> Self::Decision;

    /// Checks a complete solution on `g`.
    fn validate(
        &self,
        g: &Graph,
        decisions: &BTreeMap<VertexId, Self::Decision>,
    ) -> Result<(), String>;

    /// Whether a vertex that decided `own` may need to change its decision
    /// once a neighbor that decided `former` no longer backs it, even though
    /// the vertex itself was untouched by an update.
    fn stale_without(&self, _own: &Self::Decision, _former: &Self::Decision) -> bool {
        false
    }
}

fn require_complete<D>(g: &Graph, decisions: &BTreeMap<VertexId, D>) -> Result<(), String> {
    if let Some(v) = g.vertices().find(|v| !decisions.contains_key(v)) {
        return Err(format!("vertex {v} has no decision"));
    }
    if let Some(v) = decisions.keys().find(|v| !g.contains_vertex(**v)) {
        return Err(format!("decision for unknown vertex {v}"));
    }
    Ok(())
}

/// Smallest positive color not taken by a parent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyColoring;

impl OLocalProblem for GreedyColoring {
    type Decision = Color;

    fn name(&self) -> &'static str {
        "greedy-coloring"
    }

    fn decide(&self, _ctx: &DecideContext, parents: &BTreeMap<VertexId, Color>) -> Color {
        let mut taken: Vec<Color> = parents.values().copied().collect();
        taken.sort_unstable();
        taken.dedup();
        let mut color = 1;
        for c in taken {
            if c == color {
                color += 1;
            } else if c > color {
                break;
            }
        }
        color
    }

    fn validate(&self, g: &Graph, decisions: &BTreeMap<VertexId, Color>) -> Result<(), String> {
        require_complete(g, decisions)?;
        for (u, v) in g.edges() {
            if decisions[&u] == decisions[&v] {
                return Err(format!("edge {u}-{v} is monochromatic ({})", decisions[&u]));
            }
        }
        for v in g.vertices() {
            let c = decisions[&v];
            if c == 0 || c as usize > g.degree(v) + 1 {
                return Err(format!("vertex {v} has color {c}, degree {}", g.degree(v)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MisState {
    In,
    Out,
}

impl Display for MisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MisState::In => "IN",
            MisState::Out => "OUT",
        })
    }
}

impl WireSize for MisState {
    fn wire_size(&self) -> usize {
        1
    }
}

/// Maximal independent set: join unless a parent joined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Mis;

impl OLocalProblem for Mis {
    type Decision = MisState;

    fn name(&self) -> &'static str {
        "mis"
    }

    fn decide(&self, _ctx: &DecideContext, parents: &BTreeMap<VertexId, MisState>) -> MisState {
        if parents.values().any(|&d| d == MisState::In) {
            MisState::Out
        } else {
            MisState::In
        }
    }

    fn validate(&self, g: &Graph, decisions: &BTreeMap<VertexId, MisState>) -> Result<(), String> {
        require_complete(g, decisions)?;
        for (u, v) in g.edges() {
            if decisions[&u] == MisState::In && decisions[&v] == MisState::In {
                return Err(format!("adjacent vertices {u} and {v} are both IN"));
            }
        }
        for v in g.vertices() {
            if decisions[&v] == MisState::Out
                && !g.neighbors(v).any(|u| decisions[&u] == MisState::In)
            {
                return Err(format!("vertex {v} is OUT without an IN neighbor"));
            }
        }
        Ok(())
    }

    /// An OUT vertex may have relied on this IN neighbor alone.
    fn stale_without(&self, own: &MisState, former: &MisState) -> bool {
        *own == MisState::Out && *former == MisState::In
    }
}

/// The built-in problems, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    GreedyColoring,
    Mis,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 2] = [ProblemKind::GreedyColoring, ProblemKind::Mis];
}

impl Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::GreedyColoring => "greedy",
            ProblemKind::Mis => "mis",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "greedy" | "greedy-coloring" | "coloring" => Ok(ProblemKind::GreedyColoring),
            "mis" => Ok(ProblemKind::Mis),
            other => Err(format!(
                "unknown problem `{other}` (expected greedy or mis)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> DecideContext {
        DecideContext { id: 1, degree: 3 }
    }

    #[test]
    fn greedy_picks_first_gap() {
        let p = GreedyColoring;
        assert_eq!(p.decide(&ctx(), &BTreeMap::new()), 1);
        assert_eq!(p.decide(&ctx(), &[(2, 1), (3, 3)].into()), 2);
        assert_eq!(p.decide(&ctx(), &[(2, 2), (3, 1), (4, 1)].into()), 3);
        assert_eq!(p.decide(&ctx(), &[(2, 5)].into()), 1);
    }

    #[test]
    fn mis_rule_and_validator() {
        let p = Mis;
        assert_eq!(p.decide(&ctx(), &[(2, MisState::Out)].into()), MisState::In);
        assert_eq!(
            p.decide(&ctx(), &[(2, MisState::Out), (3, MisState::In)].into()),
            MisState::Out
        );
        let g = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        let good = [(1, MisState::In), (2, MisState::Out), (3, MisState::In)].into();
        assert!(p.validate(&g, &good).is_ok());
        let not_maximal = [(1, MisState::In), (2, MisState::Out), (3, MisState::Out)].into();
        assert!(p.validate(&g, &not_maximal).is_err());
        let dependent = [(1, MisState::In), (2, MisState::In), (3, MisState::Out)].into();
        assert!(p.validate(&g, &dependent).is_err());
        assert!(p.stale_without(&MisState::Out, &MisState::In));
        assert!(!p.stale_without(&MisState::In, &MisState::Out));
    }

    #[test]
    fn greedy_validator_checks_degree_bound() {
        let g = Graph::from_edges(2, &[(1, 2)]).unwrap();
        assert!(GreedyColoring
            .validate(&g, &[(1, 1), (2, 2)].into())
            .is_ok());
        assert!(GreedyColoring
            .validate(&g, &[(1, 1), (2, 3)].into())
            .is_err());
        assert!(GreedyColoring.validate(&g, &[(1, 1)].into()).is_err());
        assert_eq!("MIS".parse::<ProblemKind>(), Ok(ProblemKind::Mis));
    }
}
