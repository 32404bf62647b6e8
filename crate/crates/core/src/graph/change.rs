use std::fmt;
use std::str::FromStr;

use super::{Graph, GraphError, VertexId};

/// A single topology change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChangeEvent {
    AddVertex(VertexId),
    RemoveVertex(VertexId),
    AddEdge(VertexId, VertexId),
    RemoveEdge(VertexId, VertexId),
}

impl ChangeEvent {
    /// Applies the event, returning the neighbors a removed vertex had.
    pub fn apply(&self, g: &mut Graph) -> Result<Vec<VertexId>, GraphError> {
        match *self {
            ChangeEvent::AddVertex(v) => g.add_vertex(v).map(|_| Vec::new()),
            ChangeEvent::RemoveVertex(v) => g.remove_vertex(v).map(|n| n.into_iter().collect()),
            ChangeEvent::AddEdge(u, v) => g.add_edge(u, v).map(|_| Vec::new()),
            ChangeEvent::RemoveEdge(u, v) => g.remove_edge(u, v).map(|_| Vec::new()),
        }
    }
}

impl fmt::Display for ChangeEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChangeEvent::AddVertex(v) => write!(f, "+v {v}"),
            ChangeEvent::RemoveVertex(v) => write!(f, "-v {v}"),
            ChangeEvent::AddEdge(u, v) => write!(f, "+e {u} {v}"),
            ChangeEvent::RemoveEdge(u, v) => write!(f, "-e {u} {v}"),
        }
    }
}

impl FromStr for ChangeEvent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or("empty event")?;
        let ids: Vec<VertexId> = parts
            .map(|p| p.parse().map_err(|_| format!("bad vertex id `{p}`")))
            .collect::<Result<_, _>>()?;
        match (kind, ids.as_slice()) {
            ("+v", &[v]) => Ok(ChangeEvent::AddVertex(v)),
            ("-v", &[v]) => Ok(ChangeEvent::RemoveVertex(v)),
            ("+e", &[u, v]) => Ok(ChangeEvent::AddEdge(u, v)),
            ("-e", &[u, v]) => Ok(ChangeEvent::RemoveEdge(u, v)),
            _ => Err(format!("malformed event `{s}`")),
        }
    }
}

/// Ordered list of at most `t` events applied between two updates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChangeBatch {
    pub events: Vec<ChangeEvent>,
    pub t: usize,
}

impl ChangeBatch {
    pub fn new(events: Vec<ChangeEvent>, t: usize) -> Result<Self, GraphError> {
        if events.len() > t {
            return Err(GraphError::Infeasible(format!(
                "batch holds {} events, limit is {t}",
                events.len()
            )));
        }
        Ok(ChangeBatch { events, t })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One event per line.
    pub fn to_text(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }

    /// Parses the line format; `t` defaults to the number of events.
    pub fn parse(text: &str, t: Option<usize>) -> Result<Self, GraphError> {
        let events = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse().map_err(|message| GraphError::Parse {
                    line: i + 1,
                    message,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let t = t.unwrap_or(events.len());
        ChangeBatch::new(events, t)
    }
}
