//! Synchronous round engine with sleeping-model semantics.
//!
//! A node is awake only in the rounds of its wake schedule. In a round `r`
//! every awake node first sends, then receives whatever awake neighbors sent
//! to it in round `r`, then runs `on_wake`. Unicast messages to a sleeping
//! receiver are dropped (an error under strict delivery). A broadcast is heard
//! only by neighbors awake in that round and is counted once per listener.

mod metrics;
mod schedule;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Graph, VertexId};

pub use metrics::{awake_complexity, Metrics, PhaseMetrics, RoundTrace};
pub use schedule::{Round, WakeSchedule};

/// Environment variable capping the number of rounds of any phase.
pub const MAX_ROUNDS_ENV: &str = "SOMNUS_MAX_ROUNDS";
const DEFAULT_MAX_ROUNDS: Round = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("phase `{phase}`: no program for vertex {vertex}")]
    MissingProgram { phase: String, vertex: VertexId },
    #[error("phase `{phase}`: program given for vertex {vertex} outside the graph")]
    UnknownVertex { phase: String, vertex: VertexId },
    #[error("phase `{phase}`: not all programs finished within {max_rounds} rounds")]
    MaxRoundsExceeded { phase: String, max_rounds: Round },
    #[error("phase `{phase}`, round {round}: {from} sent to sleeping neighbor {to}")]
    StrictDelivery {
        phase: String,
        round: Round,
        from: VertexId,
        to: VertexId,
    },
    #[error("phase `{phase}`, round {round}: {from} sent to non-neighbor {to}")]
    NotANeighbor {
        phase: String,
        round: Round,
        from: VertexId,
        to: VertexId,
    },
    #[error("phase `{phase}`, round {round}: vertex {vertex} scheduled a wake-up at past round {requested}")]
    ScheduleInPast {
        phase: String,
        round: Round,
        vertex: VertexId,
        requested: Round,
    },
    #[error("phase `{phase}`, round {round}, vertex {vertex}: {reason}")]
    Program {
        phase: String,
        round: Round,
        vertex: VertexId,
        reason: String,
    },
}

/// Failure raised by a node program; the engine attaches phase, round and vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramError(pub String);

impl<S: Into<String>> From<S> for ProgramError {
    fn from(s: S) -> Self {
        ProgramError(s.into())
    }
}

/// Approximate encoded size of a payload, for reporting only.
pub trait WireSize {
    fn wire_size(&self) -> usize;
}

impl WireSize for u32 {
    fn wire_size(&self) -> usize {
        4
    }
}

impl WireSize for () {
    fn wire_size(&self) -> usize {
        0
    }
}

impl WireSize for Vec<u8> {
    fn wire_size(&self) -> usize {
        self.len()
    }
}

/// Static knowledge a node starts a phase with.
#[derive(Debug, Clone, Copy)]
pub struct NodeContext<'a> {
    pub id: VertexId,
    pub neighbors: &'a [VertexId],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outgoing<M> {
    To(VertexId, M),
    Broadcast(M),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope<M> {
    pub from: VertexId,
    pub payload: M,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Start {
    pub schedule: WakeSchedule,
    /// A program that is done at start never wakes.
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WakeOutcome {
    /// Extra future rounds to wake in.
    pub wake_at: Vec<Round>,
    pub done: bool,
}

impl WakeOutcome {
    pub fn continue_() -> Self {
        WakeOutcome::default()
    }

    pub fn done() -> Self {
        WakeOutcome {
            wake_at: Vec::new(),
            done: true,
        }
    }
}

/// Behavior of one node for one phase.
///
/// The engine only calls `send` and `on_wake` in rounds where the node is
/// awake, so a node cannot compute while asleep.
pub trait NodeProgram {
    type Message: Clone + WireSize;
    type Output;

    fn on_start(&mut self, ctx: &NodeContext<'_>) -> Result<Start, ProgramError>;

    /// Messages transmitted at the beginning of awake round `round`.
    fn send(&mut self, _round: Round) -> Result<Vec<Outgoing<Self::Message>>, ProgramError> {
        Ok(Vec::new())
    }

    /// Called after delivery; `inbox` is sorted by sender id.
    fn on_wake(
        &mut self,
        round: Round,
        inbox: Vec<Envelope<Self::Message>>,
    ) -> Result<WakeOutcome, ProgramError>;

    fn into_output(self) -> Self::Output;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub max_rounds: Round,
    pub strict_delivery: bool,
    pub phase_name: String,
    pub trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        let max_rounds = std::env::var(MAX_ROUNDS_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_ROUNDS);
        SimConfig {
            max_rounds,
            strict_delivery: true,
            phase_name: "phase".into(),
            trace: false,
        }
    }
}

#[derive(Debug)]
pub struct PhaseOutcome<O> {
    pub outputs: BTreeMap<VertexId, O>,
    pub metrics: PhaseMetrics,
    pub trace: Vec<RoundTrace>,
}

struct Slot<P> {
    program: P,
    done: bool,
}

/// Runs one phase of `programs` (one per vertex of `g`) to completion.
pub fn run_phase<P: NodeProgram>(
    g: &Graph,
    programs: BTreeMap<VertexId, P>,
    config: &SimConfig,
) -> Result<PhaseOutcome<P::Output>, SimError> {
    let phase = config.phase_name.as_str();
    let ids: Vec<VertexId> = g.vertices().collect();
    if let Some(&v) = programs.keys().find(|v| !g.contains_vertex(**v)) {
        return Err(SimError::UnknownVertex {
            phase: phase.into(),
            vertex: v,
        });
    }
    if programs.len() != ids.len() {
        let v = ids
            .iter()
            .copied()
            .find(|v| !programs.contains_key(v))
            .unwrap();
        return Err(SimError::MissingProgram {
            phase: phase.into(),
            vertex: v,
        });
    }
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let neighbor_ids: Vec<Vec<VertexId>> = ids.iter().map(|&v| g.neighbors(v).collect()).collect();
    let neighbor_idx: Vec<Vec<usize>> = neighbor_ids
        .iter()
        .map(|ns| ns.iter().map(|u| index[u]).collect())
        .collect();

    let mut slots: Vec<Slot<P>> = programs
        .into_values()
        .map(|program| Slot {
            program,
            done: false,
        })
        .collect();
    let mut agenda: BTreeSet<(Round, usize)> = BTreeSet::new();
    let mut metrics = PhaseMetrics {
        name: phase.into(),
        awake: ids.iter().map(|&v| (v, 0)).collect(),
        ..Default::default()
    };
    let mut awake_count = vec![0u64; ids.len()];
    let mut remaining = ids.len();
    let program_error = |round: Round, i: usize, e: ProgramError| SimError::Program {
        phase: phase.into(),
        round,
        vertex: ids[i],
        reason: e.0,
    };

    for (i, slot) in slots.iter_mut().enumerate() {
        let ctx = NodeContext {
            id: ids[i],
            neighbors: &neighbor_ids[i],
        };
        let start = slot
            .program
            .on_start(&ctx)
            .map_err(|e| program_error(0, i, e))?;
        if start.done {
            slot.done = true;
            remaining -= 1;
        } else {
            agenda.extend(start.schedule.rounds().map(|r| (r, i)));
        }
    }

    let mut trace = Vec::new();
    let mut awake_stamp: Vec<Round> = vec![0; ids.len()];
    let mut inboxes: Vec<Vec<Envelope<P::Message>>> = (0..ids.len()).map(|_| Vec::new()).collect();
    let mut last_round: Round = 0;

    while remaining > 0 {
        let Some(&(round, _)) = agenda.first() else {
            // Nobody will ever wake again, so the remaining programs cannot finish.
            return Err(SimError::MaxRoundsExceeded {
                phase: phase.into(),
                max_rounds: config.max_rounds,
            });
        };
        if round > config.max_rounds {
            return Err(SimError::MaxRoundsExceeded {
                phase: phase.into(),
                max_rounds: config.max_rounds,
            });
        }
        let mut awake = Vec::new();
        while let Some(&(r, i)) = agenda.first() {
            if r != round {
                break;
            }
            agenda.pop_first();
            if !slots[i].done {
                awake.push(i);
                awake_stamp[i] = round;
            }
        }

        for &i in &awake {
            let outgoing = slots[i]
                .program
                .send(round)
                .map_err(|e| program_error(round, i, e))?;
            for out in outgoing {
                match out {
                    Outgoing::To(to, payload) => {
                        let Some(pos) = neighbor_ids[i].iter().position(|&u| u == to) else {
                            return Err(SimError::NotANeighbor {
                                phase: phase.into(),
                                round,
                                from: ids[i],
                                to,
                            });
                        };
                        let j = neighbor_idx[i][pos];
                        metrics.messages_sent += 1;
                        metrics.max_message_size =
                            metrics.max_message_size.max(payload.wire_size());
                        if awake_stamp[j] == round {
                            metrics.messages_delivered += 1;
                            inboxes[j].push(Envelope {
                                from: ids[i],
                                payload,
                            });
                        } else if config.strict_delivery {
                            return Err(SimError::StrictDelivery {
                                phase: phase.into(),
                                round,
                                from: ids[i],
                                to,
                            });
                        } else {
                            metrics.messages_dropped += 1;
                        }
                    }
                    Outgoing::Broadcast(payload) => {
                        let size = payload.wire_size();
                        for &j in &neighbor_idx[i] {
                            if awake_stamp[j] == round {
                                metrics.messages_sent += 1;
                                metrics.messages_delivered += 1;
                                metrics.max_message_size = metrics.max_message_size.max(size);
                                inboxes[j].push(Envelope {
                                    from: ids[i],
                                    payload: payload.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }

        for &i in &awake {
            let mut inbox = std::mem::take(&mut inboxes[i]);
            inbox.sort_by_key(|e| e.from);
            let outcome = slots[i]
                .program
                .on_wake(round, inbox)
                .map_err(|e| program_error(round, i, e))?;
            awake_count[i] += 1;
            for requested in outcome.wake_at {
                if requested <= round {
                    return Err(SimError::ScheduleInPast {
                        phase: phase.into(),
                        round,
                        vertex: ids[i],
                        requested,
                    });
                }
                agenda.insert((requested, i));
            }
            if outcome.done {
                slots[i].done = true;
                remaining -= 1;
            }
        }
        if config.trace {
            trace.push(RoundTrace {
                phase: phase.into(),
                round,
                awake: awake.iter().map(|&i| ids[i]).collect(),
            });
        }
        last_round = round;
    }

    metrics.clock_rounds = u64::from(last_round);
    for (i, &v) in ids.iter().enumerate() {
        metrics.awake.insert(v, awake_count[i]);
    }
    let outputs = ids
        .iter()
        .copied()
        .zip(slots.into_iter().map(|s| s.program.into_output()))
        .collect();
    Ok(PhaseOutcome {
        outputs,
        metrics,
        trace,
    })
}

/// Runs phases back to back, accumulating their metrics and traces.
#[derive(Debug, Clone, Default)]
pub struct Pipeline {
    pub config: SimConfig,
    pub metrics: Metrics,
    pub trace: Vec<RoundTrace>,
}

impl Pipeline {
    pub fn new(config: SimConfig) -> Self {
        Pipeline {
            config,
            metrics: Metrics::default(),
            trace: Vec::new(),
        }
    }

    pub fn run<P: NodeProgram>(
        &mut self,
        name: &str,
        g: &Graph,
        programs: BTreeMap<VertexId, P>,
    ) -> Result<BTreeMap<VertexId, P::Output>, SimError> {
        let config = SimConfig {
            phase_name: name.to_string(),
            ..self.config.clone()
        };
        let outcome = run_phase(g, programs, &config)?;
        self.metrics.push_phase(outcome.metrics);
        self.trace.extend(outcome.trace);
        Ok(outcome.outputs)
    }

    /// A fresh pipeline with the same configuration.
    pub fn child(&self) -> Pipeline {
        Pipeline::new(self.config.clone())
    }

    /// Appends the phases of `child`, prefixing their names with `prefix`.
    pub fn absorb(&mut self, child: Pipeline, prefix: &str) {
        self.metrics.extend(child.metrics.prefixed(prefix));
        self.trace.extend(child.trace.into_iter().map(|mut t| {
            t.phase = format!("{prefix}/{}", t.phase);
            t
        }));
    }

    pub fn finish(self) -> Metrics {
        self.metrics
    }
}

/// One step of a pipeline: consumes the previous step's value and may run
/// any number of phases on the shared [`Pipeline`].
pub type PhaseStep<'a, T> = Box<dyn FnOnce(&Graph, T, &mut Pipeline) -> Result<T, SimError> + 'a>;

/// Threads `init` through `steps` in order; metrics accumulate across them.
pub fn run_pipeline<T>(
    g: &Graph,
    init: T,
    steps: Vec<PhaseStep<'_, T>>,
    config: &SimConfig,
) -> Result<(T, Metrics), SimError> {
    let mut pipeline = Pipeline::new(config.clone());
    let mut value = init;
    for step in steps {
        value = step(g, value, &mut pipeline)?;
    }
    Ok((value, pipeline.finish()))
}
