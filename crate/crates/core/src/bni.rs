//! Solving O-LOCAL problems with few awake rounds on graphs of small
//! neighborhood independence.
//!
//! Each vertex keeps as parents an independent set `M(v)` of its
//! smaller-labeled neighbors, wakes only at their label rounds and at its
//! own, and relays every neighbor decision it holds. A neighbor that is not
//! in `M(v)` is adjacent to a larger-labeled member of `M(v)`, which already
//! holds its decision when it wakes at its own label round.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::coloring::linial_coloring_in;
use crate::graph::{Graph, GraphError, PartialOrientation, VertexId};
use crate::olocal::{DecideContext, Decisions, OLocalProblem};
use crate::sim::{
    Envelope, Metrics, NodeContext, NodeProgram, Outgoing, Pipeline, ProgramError, Round,
    SimConfig, Start, WakeOutcome, WakeSchedule, WireSize,
};
use crate::{Error, Result};

/// Where vertex labels come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelSource {
    Ids,
    Linial,
}

impl std::str::FromStr for LabelSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ids" => Ok(LabelSource::Ids),
            "linial" => Ok(LabelSource::Linial),
            other => Err(Error::Invalid(format!(
                "unknown label source `{other}` (expected ids or linial)"
            ))),
        }
    }
}

impl std::fmt::Display for LabelSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LabelSource::Ids => "ids",
            LabelSource::Linial => "linial",
        })
    }
}

fn check_labels(g: &Graph, labels: &BTreeMap<VertexId, u32>) -> Result<()> {
    for v in g.vertices() {
        match labels.get(&v) {
            None | Some(0) => return Err(GraphError::MissingLabel(v).into()),
            Some(_) => {}
        }
    }
    if let Some((u, v)) = g.edges().find(|(u, v)| labels[u] == labels[v]) {
        return Err(GraphError::LabelTie(u, v).into());
    }
    Ok(())
}

/// Greedy independent subset of the smaller-labeled neighbors, scanned by
/// decreasing label (smaller id first on equal labels).
fn ruling_parents(
    label: u32,
    neighbor_labels: &BTreeMap<VertexId, u32>,
    adjacent: impl Fn(VertexId, VertexId) -> bool,
) -> Vec<VertexId> {
    let mut candidates: Vec<(u32, VertexId)> = neighbor_labels
        .iter()
        .filter(|(_, &l)| l < label)
        .map(|(&u, &l)| (l, u))
        .collect();
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<VertexId> = Vec::new();
    for (_, u) in candidates {
        if chosen.iter().all(|&w| !adjacent(u, w)) {
            chosen.push(u);
        }
    }
    chosen
}

/// Centralized construction of the parent sets.
pub fn build_partial_orientation(
    g: &Graph,
    labels: &BTreeMap<VertexId, u32>,
) -> Result<PartialOrientation> {
    check_labels(g, labels)?;
    let parent_sets = g
        .vertices()
        .map(|v| {
            let nl = g.neighbors(v).map(|u| (u, labels[&u])).collect();
            (
                v,
                ruling_parents(labels[&v], &nl, |a, b| g.contains_edge(a, b)),
            )
        })
        .collect();
    Ok(PartialOrientation {
        parent_sets,
        labels: labels.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    pub label: u32,
    pub neighbors: Vec<VertexId>,
}

impl WireSize for Adjacency {
    fn wire_size(&self) -> usize {
        4 * (1 + self.neighbors.len())
    }
}

/// What a vertex knows after the collection round.
#[derive(Debug, Clone, Default)]
struct LocalView {
    neighbor_labels: BTreeMap<VertexId, u32>,
    parents: Vec<VertexId>,
}

struct CollectNode {
    label: u32,
    neighbors: Vec<VertexId>,
    view: LocalView,
}

impl NodeProgram for CollectNode {
    type Message = Adjacency;
    type Output = LocalView;

    fn on_start(&mut self, ctx: &NodeContext<'_>) -> std::result::Result<Start, ProgramError> {
        self.neighbors = ctx.neighbors.to_vec();
        Ok(Start {
            schedule: WakeSchedule::from_rounds([1]),
            done: false,
        })
    }

    fn send(
        &mut self,
        _round: Round,
    ) -> std::result::Result<Vec<Outgoing<Adjacency>>, ProgramError> {
        Ok(vec![Outgoing::Broadcast(Adjacency {
            label: self.label,
            neighbors: self.neighbors.clone(),
        })])
    }

    fn on_wake(
        &mut self,
        _round: Round,
        inbox: Vec<Envelope<Adjacency>>,
    ) -> std::result::Result<WakeOutcome, ProgramError> {
        if inbox.len() != self.neighbors.len() {
            return Err("collection round missed a neighbor".into());
        }
        let adjacency: BTreeMap<VertexId, BTreeSet<VertexId>> = inbox
            .iter()
            .map(|e| (e.from, e.payload.neighbors.iter().copied().collect()))
            .collect();
        self.view.neighbor_labels = inbox.iter().map(|e| (e.from, e.payload.label)).collect();
        if let Some((&u, _)) = self
            .view
            .neighbor_labels
            .iter()
            .find(|(_, &l)| l == self.label)
        {
            return Err(format!("label tie with neighbor {u}").into());
        }
        self.view.parents = ruling_parents(self.label, &self.view.neighbor_labels, |a, b| {
            adjacency[&a].contains(&b)
        });
        Ok(WakeOutcome::done())
    }

    fn into_output(self) -> LocalView {
        self.view
    }
}

/// A relayed decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relay<D> {
    pub origin: VertexId,
    pub origin_label: u32,
    pub value: D,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelayBundle<D>(pub Vec<Relay<D>>);

impl<D: WireSize> WireSize for RelayBundle<D> {
    fn wire_size(&self) -> usize {
        self.0.iter().map(|r| 8 + r.value.wire_size()).sum()
    }
}

/// One received relay whose origin neighbors the receiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Receipt {
    pub round: Round,
    pub from: VertexId,
    pub origin: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecisionRecord {
    pub vertex: VertexId,
    pub label: u32,
    pub decided_round: Round,
    pub decision: String,
    pub parents: Vec<VertexId>,
    pub receipts: Vec<Receipt>,
}

struct SolveNode<'a, P: OLocalProblem> {
    problem: &'a P,
    ctx: DecideContext,
    label: u32,
    view: LocalView,
    held: BTreeMap<VertexId, Relay<P::Decision>>,
    decision: Option<P::Decision>,
    receipts: Vec<Receipt>,
}

impl<P: OLocalProblem> NodeProgram for SolveNode<'_, P> {
    type Message = RelayBundle<P::Decision>;
    type Output = (P::Decision, DecisionRecord);

    fn on_start(&mut self, _ctx: &NodeContext<'_>) -> std::result::Result<Start, ProgramError> {
        let rounds = self
            .view
            .parents
            .iter()
            .map(|u| self.view.neighbor_labels[u])
            .chain([self.label]);
        Ok(Start {
            schedule: rounds.collect(),
            done: false,
        })
    }

    fn send(
        &mut self,
        round: Round,
    ) -> std::result::Result<Vec<Outgoing<Self::Message>>, ProgramError> {
        if round == self.label {
            let mut parents = BTreeMap::new();
            for (&u, &l) in &self.view.neighbor_labels {
                if l < self.label {
                    let Some(relay) = self.held.get(&u) else {
                        return Err(format!("decision of parent {u} never arrived").into());
                    };
                    parents.insert(u, relay.value.clone());
                }
            }
            let own = self.problem.decide(&self.ctx, &parents);
            self.held.insert(
                self.ctx.id,
                Relay {
                    origin: self.ctx.id,
                    origin_label: self.label,
                    value: own.clone(),
                },
            );
            self.decision = Some(own);
        }
        if self.held.is_empty() {
            return Ok(Vec::new());
        }
        Ok(vec![Outgoing::Broadcast(RelayBundle(
            self.held.values().cloned().collect(),
        ))])
    }

    fn on_wake(
        &mut self,
        round: Round,
        inbox: Vec<Envelope<Self::Message>>,
    ) -> std::result::Result<WakeOutcome, ProgramError> {
        for env in inbox {
            for relay in env.payload.0 {
                // only decisions of neighbors are ever needed here or downstream
                if !self.view.neighbor_labels.contains_key(&relay.origin) {
                    continue;
                }
                self.receipts.push(Receipt {
                    round,
                    from: env.from,
                    origin: relay.origin,
                });
                self.held.entry(relay.origin).or_insert(relay);
            }
        }
        Ok(WakeOutcome {
            wake_at: Vec::new(),
            done: round == self.label,
        })
    }

    fn into_output(self) -> (P::Decision, DecisionRecord) {
        let decision = self.decision.expect("own label round always runs");
        let record = DecisionRecord {
            vertex: self.ctx.id,
            label: self.label,
            decided_round: self.label,
            decision: decision.to_string(),
            parents: self.view.parents,
            receipts: self.receipts,
        };
        (decision, record)
    }
}

#[derive(Debug, Clone)]
pub struct BniRun<D> {
    pub labels: BTreeMap<VertexId, u32>,
    pub orientation: PartialOrientation,
    pub decisions: Decisions<D>,
    pub log: BTreeMap<VertexId, DecisionRecord>,
    pub metrics: Metrics,
}

impl<D> BniRun<D> {
    /// Phases of the collection and solve steps, excluding label computation.
    pub fn is_bni_phase(name: &str) -> bool {
        name.starts_with("bni-")
    }

    pub fn bni_awake(&self) -> u64 {
        self.metrics
            .awake_in_phases(Self::is_bni_phase)
            .values()
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub fn log_json(&self) -> String {
        serde_json::to_string_pretty(&self.log.values().collect::<Vec<_>>())
            .expect("log serializes")
    }
}

/// Collection round plus label-indexed solve phase on `pipeline`.
pub fn bni_solve_in<P: OLocalProblem>(
    pipeline: &mut Pipeline,
    g: &Graph,
    labels: &BTreeMap<VertexId, u32>,
    problem: &P,
) -> Result<(
    Decisions<P::Decision>,
    PartialOrientation,
    BTreeMap<VertexId, DecisionRecord>,
)> {
    check_labels(g, labels)?;
    let collect = g
        .vertices()
        .map(|v| {
            (
                v,
                CollectNode {
                    label: labels[&v],
                    neighbors: Vec::new(),
                    view: LocalView::default(),
                },
            )
        })
        .collect();
    let views = pipeline.run("bni-collect", g, collect)?;
    let orientation = PartialOrientation {
        parent_sets: views
            .iter()
            .map(|(&v, view)| (v, view.parents.clone()))
            .collect(),
        labels: labels.clone(),
    };
    let programs = views
        .into_iter()
        .map(|(v, view)| {
            let node = SolveNode {
                problem,
                ctx: DecideContext {
                    id: v,
                    degree: g.degree(v),
                },
                label: labels[&v],
                view,
                held: BTreeMap::new(),
                decision: None,
                receipts: Vec::new(),
            };
            (v, node)
        })
        .collect();
    let out = pipeline.run("bni-solve", g, programs)?;
    let mut decisions = BTreeMap::new();
    let mut log = BTreeMap::new();
    for (v, (d, record)) in out {
        decisions.insert(v, d);
        log.insert(v, record);
    }
    Ok((decisions, orientation, log))
}

/// Labels from ids, or from a Linial coloring computed on `pipeline`.
pub fn compute_labels(
    pipeline: &mut Pipeline,
    g: &Graph,
    source: LabelSource,
) -> Result<BTreeMap<VertexId, u32>> {
    match source {
        LabelSource::Ids => Ok(g.vertices().map(|v| (v, v)).collect()),
        LabelSource::Linial => {
            let (c, _) = linial_coloring_in(pipeline, g, g.max_degree() as u64)?;
            Ok(c.as_map().clone())
        }
    }
}

pub fn bni_solve<P: OLocalProblem>(
    g: &Graph,
    labels: &BTreeMap<VertexId, u32>,
    problem: &P,
    config: &SimConfig,
) -> Result<BniRun<P::Decision>> {
    let mut pipeline = Pipeline::new(config.clone());
    let (decisions, orientation, log) = bni_solve_in(&mut pipeline, g, labels, problem)?;
    Ok(BniRun {
        labels: labels.clone(),
        orientation,
        decisions,
        log,
        metrics: pipeline.finish(),
    })
}

pub fn bni_solve_with<P: OLocalProblem>(
    g: &Graph,
    source: LabelSource,
    problem: &P,
    config: &SimConfig,
) -> Result<BniRun<P::Decision>> {
    let mut pipeline = Pipeline::new(config.clone());
    let labels = compute_labels(&mut pipeline, g, source)?;
    let (decisions, orientation, log) = bni_solve_in(&mut pipeline, g, &labels, problem)?;
    Ok(BniRun {
        labels,
        orientation,
        decisions,
        log,
        metrics: pipeline.finish(),
    })
}

/// Searches the log for a forwarding chain carrying `origin`'s decision to
/// `target`: each hop sent at the sender's own label round, labels strictly
/// decreasing from `target` towards `origin`. Returns the chain from
/// `target` to `origin`.
pub fn relay_chain(
    log: &BTreeMap<VertexId, DecisionRecord>,
    origin: VertexId,
    target: VertexId,
) -> Option<Vec<VertexId>> {
    fn search(
        log: &BTreeMap<VertexId, DecisionRecord>,
        origin: VertexId,
        at: VertexId,
        seen: &mut BTreeSet<VertexId>,
    ) -> Option<Vec<VertexId>> {
        let here = log.get(&at)?;
        let origin_label = log.get(&origin)?.label;
        for r in here.receipts.iter().filter(|r| r.origin == origin) {
            let sender_label = log.get(&r.from)?.label;
            if r.round != sender_label || sender_label >= here.label || sender_label < origin_label
            {
                continue;
            }
            if r.from == origin {
                return Some(vec![at, origin]);
            }
            if seen.insert(r.from) {
                if let Some(mut rest) = search(log, origin, r.from, seen) {
                    rest.insert(0, at);
                    return Some(rest);
                }
            }
        }
        None
    }
    search(log, origin, target, &mut BTreeSet::new())
}

/// Checks the relay chain of every (parent, child) edge.
pub fn check_relay_chains(
    g: &Graph,
    log: &BTreeMap<VertexId, DecisionRecord>,
) -> std::result::Result<(), String> {
    for (u, v) in g.edges() {
        let (lu, lv) = (log[&u].label, log[&v].label);
        let (parent, child) = if lu < lv { (u, v) } else { (v, u) };
        if relay_chain(log, parent, child).is_none() {
            return Err(format!("no relay chain from {parent} to {child}"));
        }
    }
    Ok(())
}
