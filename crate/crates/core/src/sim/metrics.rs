use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::graph::VertexId;

use super::Round;

/// Counters for one phase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PhaseMetrics {
    pub name: String,
    /// Rounds each participating vertex was awake.
    pub awake: BTreeMap<VertexId, u64>,
    pub clock_rounds: u64,
    pub messages_sent: u64,
    pub messages_delivered: u64,
    pub messages_dropped: u64,
    pub max_message_size: usize,
}

impl PhaseMetrics {
    pub fn max_awake(&self) -> u64 {
        self.awake.values().copied().max().unwrap_or(0)
    }
}

/// Counters accumulated over a sequence of phases run back to back.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub awake: BTreeMap<VertexId, u64>,
    pub clock_rounds: u64,
    pub messages_sent: u64,
    pub messages_delivered: u64,
    pub messages_dropped: u64,
    pub max_message_size: usize,
    pub phases: Vec<PhaseMetrics>,
}

impl Metrics {
    pub fn push_phase(&mut self, phase: PhaseMetrics) {
        for (&v, &count) in &phase.awake {
            *self.awake.entry(v).or_default() += count;
        }
        self.clock_rounds += phase.clock_rounds;
        self.messages_sent += phase.messages_sent;
        self.messages_delivered += phase.messages_delivered;
        self.messages_dropped += phase.messages_dropped;
        self.max_message_size = self.max_message_size.max(phase.max_message_size);
        self.phases.push(phase);
    }

    /// Appends every phase of `other`.
    pub fn extend(&mut self, other: Metrics) {
        for phase in other.phases {
            self.push_phase(phase);
        }
    }

    pub fn awake_of(&self, v: VertexId) -> u64 {
        self.awake.get(&v).copied().unwrap_or(0)
    }

    /// Sum of the named phases' clock rounds.
    pub fn clock_of_phases(&self, mut select: impl FnMut(&str) -> bool) -> u64 {
        self.phases
            .iter()
            .filter(|p| select(&p.name))
            .map(|p| p.clock_rounds)
            .sum()
    }

    /// Per-vertex awake rounds summed over the selected phases.
    pub fn awake_in_phases(&self, mut select: impl FnMut(&str) -> bool) -> BTreeMap<VertexId, u64> {
        let mut out = BTreeMap::new();
        for phase in self.phases.iter().filter(|p| select(&p.name)) {
            for (&v, &c) in &phase.awake {
                *out.entry(v).or_default() += c;
            }
        }
        out
    }

    /// Prefixes every phase name with `prefix/`.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for phase in &mut self.phases {
            phase.name = format!("{prefix}/{}", phase.name);
        }
        self
    }

    /// CSV with columns `phase,vertex,awake_rounds`: one row per phase and
    /// participating vertex, `total` rows with the summed counts, and a
    /// final `summary,max,<awake complexity>` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phase,vertex,awake_rounds\n");
        for phase in &self.phases {
            for (v, c) in &phase.awake {
                writeln!(out, "{},{v},{c}", phase.name).unwrap();
            }
        }
        for (v, c) in &self.awake {
            writeln!(out, "total,{v},{c}").unwrap();
        }
        writeln!(out, "summary,max,{}", awake_complexity(self)).unwrap();
        out
    }
}

/// Worst-case awake complexity: the largest per-vertex awake count.
pub fn awake_complexity(m: &Metrics) -> u64 {
    m.awake.values().copied().max().unwrap_or(0)
}

/// Awake set of one round, for debugging traces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundTrace {
    pub phase: String,
    pub round: Round,
    pub awake: Vec<VertexId>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phase(name: &str, awake: &[(VertexId, u64)], clock: u64) -> PhaseMetrics {
        PhaseMetrics {
            name: name.into(),
            awake: awake.iter().copied().collect(),
            clock_rounds: clock,
            ..Default::default()
        }
    }

    #[test]
    fn awake_complexity_is_the_maximum() {
        assert_eq!(awake_complexity(&Metrics::default()), 0);
        let mut m = Metrics::default();
        m.push_phase(phase("a", &[(1, 0), (2, 0)], 0));
        assert_eq!(awake_complexity(&m), 0);
        let mut m = Metrics::default();
        m.push_phase(phase("a", &[(1, 1), (2, 5), (3, 2)], 5));
        assert_eq!(awake_complexity(&m), 5);
    }

    #[test]
    fn phases_add_up() {
        let mut m = Metrics::default();
        m.push_phase(phase("a", &[(1, 1), (2, 3)], 4));
        m.push_phase(phase("b", &[(1, 2)], 2));
        assert_eq!(m.awake_of(1), 3);
        assert_eq!(m.awake_of(2), 3);
        assert_eq!(m.clock_rounds, 6);
        assert_eq!(m.clock_of_phases(|n| n == "b"), 2);
        let csv = m.prefixed("x").to_csv();
        assert!(csv.starts_with("phase,vertex,awake_rounds\nx/a,1,1\n"));
        assert!(csv.ends_with("total,1,3\ntotal,2,3\nsummary,max,3\n"));
    }
}
