//! Maintaining an O-LOCAL solution while the graph changes in batches.
//!
//! After a batch only the changed set `S` is recolored and re-solved, with
//! every outside neighbor acting as a fixed parent. Vertices outside `S`
//! normally wake for a single collection round. When a problem reports that
//! an untouched vertex may lose the support of a neighbor in `S` (an OUT
//! vertex of an independent set whose IN neighbor is being recomputed), that
//! vertex is recomputed too and its own outside neighbors wake for one
//! extra round.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::{
    batched_kw_reduce_in, h_k_in, h_star_k, linial_coloring_in, sleeping_kw_iterative_in,
    BlockedColoring, Epsilon,
};
use crate::graph::{ChangeBatch, ChangeEvent, Color, Coloring, Graph, GraphError, VertexId};
use crate::olocal::{
    algorithm_a_in, algorithm_a_on_subgraph, Decisions, FixedParents, GreedyColoring, OLocalProblem,
};
use crate::sim::{
    awake_complexity, Envelope, Metrics, NodeContext, NodeProgram, Outgoing, Pipeline,
    ProgramError, Round, SimConfig, Start, WakeOutcome, WakeSchedule, WireSize,
};
use crate::{Error, Result};

/// How the changed set is brought down to few colors before solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// Linial, then a single greedy pass of the interval schedule.
    #[default]
    Direct,
    /// Linial, then pairwise block merging.
    Kw31,
    /// Linial, then merging `ceil(sqrt(delta))` blocks at a time.
    Batched32,
    /// The defective-coloring cascade.
    Hstar33,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Direct,
        Strategy::Kw31,
        Strategy::Batched32,
        Strategy::Hstar33,
    ];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Direct => "direct",
            Strategy::Kw31 => "kw31",
            Strategy::Batched32 => "batched32",
            Strategy::Hstar33 => "hstar33",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "direct" => Ok(Strategy::Direct),
            "kw31" => Ok(Strategy::Kw31),
            "batched32" => Ok(Strategy::Batched32),
            "hstar33" => Ok(Strategy::Hstar33),
            other => Err(Error::Invalid(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Proper coloring of `g` with at most `delta + 1` colors, run on `pipeline`.
fn color_with(
    pipeline: &mut Pipeline,
    g: &Graph,
    strategy: Strategy,
    delta: u64,
) -> Result<Coloring> {
    if g.vertex_count() == 0 {
        return Ok(Coloring::new(1));
    }
    if strategy == Strategy::Hstar33 {
        return Ok(h_k_in(pipeline, g, h_star_k(delta), delta, &mut Vec::new())?.coloring);
    }
    let (initial, _) = linial_coloring_in(pipeline, g, delta)?;
    let width = delta as u32 + 1;
    Ok(match strategy {
        Strategy::Direct => {
            let d = algorithm_a_in(pipeline, "reduce", g, &initial, &GreedyColoring)?;
            Coloring::from_map(d, width)
        }
        Strategy::Kw31 => sleeping_kw_iterative_in(pipeline, g, &initial, delta)?.coloring,
        Strategy::Batched32 => {
            let blocked = BlockedColoring::new(initial, width)?;
            batched_kw_reduce_in(pipeline, g, &blocked, Epsilon { num: 1, den: 2 }, delta)?.coloring
        }
        Strategy::Hstar33 => unreachable!(),
    })
}

#[derive(Debug, Clone)]
pub struct DynamicState<P: OLocalProblem> {
    pub graph: Graph,
    pub problem: P,
    pub decisions: Decisions<P::Decision>,
    pub coloring: Coloring,
    pub strategy: Strategy,
    pub t: usize,
}

/// Solves `problem` on `g` from scratch.
pub fn prepare<P: OLocalProblem>(
    g: Graph,
    problem: P,
    strategy: Strategy,
    t: usize,
    config: &SimConfig,
) -> Result<(DynamicState<P>, Metrics)> {
    let mut root = Pipeline::new(config.clone());
    let mut pipeline = root.child();
    let coloring = color_with(&mut pipeline, &g, strategy, g.max_degree() as u64)?;
    let decisions = algorithm_a_in(&mut pipeline, "solve", &g, &coloring, &problem)?;
    root.absorb(pipeline, "prepare");
    let state = DynamicState {
        graph: g,
        problem,
        decisions,
        coloring,
        strategy,
        t,
    };
    Ok((state, root.finish()))
}

/// Applies `batch` to a copy of `g` and returns it with the changed set:
/// endpoints of changed edges that still exist, added vertices, and the
/// surviving former neighbors of removed vertices.
pub fn extract_changed_set(g: &Graph, batch: &ChangeBatch) -> Result<(Graph, BTreeSet<VertexId>)> {
    let mut next = g.clone();
    let mut touched = BTreeSet::new();
    for event in &batch.events {
        let former = event.apply(&mut next)?;
        match *event {
            ChangeEvent::AddVertex(v) => {
                touched.insert(v);
            }
            ChangeEvent::RemoveVertex(_) => touched.extend(former),
            ChangeEvent::AddEdge(u, v) | ChangeEvent::RemoveEdge(u, v) => {
                touched.insert(u);
                touched.insert(v);
            }
        }
    }
    touched.retain(|v| next.contains_vertex(*v));
    Ok((next, touched))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Announce<D> {
    pub changed: bool,
    pub color: Color,
    pub decision: Option<D>,
}

impl<D: WireSize> WireSize for Announce<D> {
    fn wire_size(&self) -> usize {
        5 + self.decision.as_ref().map_or(0, WireSize::wire_size)
    }
}

struct CollectNode<'a, P: OLocalProblem> {
    problem: &'a P,
    own: Announce<P::Decision>,
    heard: BTreeMap<VertexId, Option<P::Decision>>,
    dependent: bool,
}

impl<P: OLocalProblem> NodeProgram for CollectNode<'_, P> {
    type Message = Announce<P::Decision>;
    type Output = (BTreeMap<VertexId, Option<P::Decision>>, bool);

    fn on_start(&mut self, _ctx: &NodeContext<'_>) -> std::result::Result<Start, ProgramError> {
        Ok(Start {
            schedule: WakeSchedule::from_rounds([1]),
            done: false,
        })
    }

    fn send(
        &mut self,
        _round: Round,
    ) -> std::result::Result<Vec<Outgoing<Self::Message>>, ProgramError> {
        Ok(vec![Outgoing::Broadcast(self.own.clone())])
    }

    fn on_wake(
        &mut self,
        _round: Round,
        inbox: Vec<Envelope<Self::Message>>,
    ) -> std::result::Result<WakeOutcome, ProgramError> {
        for env in inbox {
            if !self.own.changed && env.payload.changed {
                if let (Some(own), Some(former)) = (&self.own.decision, &env.payload.decision) {
                    self.dependent |= self.problem.stale_without(own, former);
                }
            }
            self.heard.insert(env.from, env.payload.decision);
        }
        Ok(WakeOutcome::done())
    }

    fn into_output(self) -> Self::Output {
        (self.heard, self.dependent)
    }
}

fn collect_round<P: OLocalProblem>(
    pipeline: &mut Pipeline,
    name: &str,
    g: &Graph,
    awake: &BTreeSet<VertexId>,
    changed: &BTreeSet<VertexId>,
    state: &DynamicState<P>,
) -> Result<BTreeMap<VertexId, (BTreeMap<VertexId, Option<P::Decision>>, bool)>> {
    let sub = g.induced_subgraph(awake);
    let programs = awake
        .iter()
        .map(|&v| {
            let own = Announce {
                changed: changed.contains(&v),
                color: state.coloring.get(v),
                decision: state.decisions.get(&v).cloned(),
            };
            (
                v,
                CollectNode {
                    problem: &state.problem,
                    own,
                    heard: BTreeMap::new(),
                    dependent: false,
                },
            )
        })
        .collect();
    Ok(pipeline.run(name, &sub, programs)?)
}

fn neighborhood(g: &Graph, set: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut out = set.clone();
    for &v in set {
        out.extend(g.neighbors(v));
    }
    out
}

/// Per-update summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpdateReport {
    pub changed: BTreeSet<VertexId>,
    /// Untouched vertices recomputed because they may have lost support.
    pub dependents: BTreeSet<VertexId>,
    /// The batch only added edges or vertices.
    pub additions_only: bool,
    pub alpha: u64,
    pub beta: u64,
    pub max_awake: u64,
    pub clock_rounds: u64,
    pub valid: bool,
    pub violation: Option<String>,
}

impl<P: OLocalProblem> DynamicState<P> {
    /// Applies `batch` and repairs the solution; the state is left unchanged
    /// on error.
    pub fn update(
        &mut self,
        batch: &ChangeBatch,
        config: &SimConfig,
    ) -> Result<(UpdateReport, Metrics)> {
        let (next, changed) = extract_changed_set(&self.graph, batch)?;
        let delta = next.max_degree() as u64;
        let t = batch.t.max(batch.len()) as u64;
        let alpha = delta.min(t);
        let beta = (next.vertex_count() as u64).min(t);
        let mut pipeline = Pipeline::new(config.clone());
        let mut decisions = self.decisions.clone();
        decisions.retain(|v, _| next.contains_vertex(*v));
        let mut coloring = Coloring::from_map(
            self.coloring
                .iter()
                .filter(|(v, _)| next.contains_vertex(*v) && !changed.contains(v))
                .collect(),
            self.coloring.palette(),
        );
        let mut dependents = BTreeSet::new();

        if !changed.is_empty() {
            let prior = DynamicState {
                graph: next.clone(),
                problem: self.problem.clone(),
                decisions: decisions.clone(),
                coloring: coloring.clone(),
                strategy: self.strategy,
                t: self.t,
            };
            let around = neighborhood(&next, &changed);
            let mut heard =
                collect_round(&mut pipeline, "collect", &next, &around, &changed, &prior)?;
            dependents = heard
                .iter()
                .filter(|(_, (_, dep))| *dep)
                .map(|(&v, _)| v)
                .collect();
            let recompute: BTreeSet<VertexId> = changed.union(&dependents).copied().collect();
            if !dependents.is_empty() {
                let mut second: BTreeSet<VertexId> = neighborhood(&next, &dependents)
                    .difference(&changed)
                    .copied()
                    .collect();
                second.extend(dependents.iter().copied());
                let extra = collect_round(
                    &mut pipeline,
                    "collect-dependents",
                    &next,
                    &second,
                    &recompute,
                    &prior,
                )?;
                for v in &dependents {
                    heard
                        .get_mut(v)
                        .expect("dependents were awake")
                        .0
                        .extend(extra[v].0.clone());
                }
            }

            let mut fixed: FixedParents<P::Decision> = BTreeMap::new();
            for &v in &recompute {
                let known = &heard[&v].0;
                let mut outside = BTreeMap::new();
                for u in next.neighbors(v).filter(|u| !recompute.contains(u)) {
                    match known.get(&u) {
                        Some(Some(d)) => {
                            outside.insert(u, d.clone());
                        }
                        _ => {
                            return Err(Error::Invalid(format!(
                                "vertex {v} never heard the decision of {u}"
                            )))
                        }
                    }
                }
                fixed.insert(v, outside);
            }

            let inner = next.induced_subgraph(&recompute);
            let inner_delta = inner.max_degree() as u64;
            let colors = color_with(&mut pipeline, &inner, self.strategy, inner_delta)?;
            let solved = algorithm_a_on_subgraph(
                &mut pipeline,
                "solve",
                &next,
                &recompute,
                &colors,
                &fixed,
                &self.problem,
            )?;
            for (v, d) in solved {
                decisions.insert(v, d);
            }
            for (v, c) in colors.iter() {
                coloring.set(v, c);
            }
        }

        let violation = self.problem.validate(&next, &decisions).err();
        let metrics = pipeline.finish();
        let report = UpdateReport {
            changed,
            dependents,
            additions_only: batch
                .events
                .iter()
                .all(|e| matches!(e, ChangeEvent::AddEdge(..) | ChangeEvent::AddVertex(_))),
            alpha,
            beta,
            max_awake: awake_complexity(&metrics),
            clock_rounds: metrics.clock_rounds,
            valid: violation.is_none(),
            violation,
        };
        self.graph = next;
        self.decisions = decisions;
        self.coloring = coloring;
        Ok((report, metrics))
    }
}

/// Mix of change events drawn by [`random_batch`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchMix {
    pub add_edge: f64,
    pub remove_edge: f64,
    pub add_vertex: f64,
    pub remove_vertex: f64,
}

impl Default for BatchMix {
    fn default() -> Self {
        BatchMix {
            add_edge: 0.6,
            remove_edge: 0.3,
            add_vertex: 0.05,
            remove_vertex: 0.05,
        }
    }
}

/// `t` applicable events that keep every degree at most `cap`.
pub fn random_batch(
    g: &Graph,
    t: usize,
    cap: usize,
    mix: BatchMix,
    rng: &mut ChaCha8Rng,
) -> Result<ChangeBatch> {
    let mut scratch = g.clone();
    let mut events = Vec::with_capacity(t);
    let total = mix.add_edge + mix.remove_edge + mix.add_vertex + mix.remove_vertex;
    let mut attempts = 0;
    while events.len() < t {
        attempts += 1;
        if attempts > 100 * (t + 1) {
            return Err(GraphError::Infeasible("could not draw an applicable batch".into()).into());
        }
        let vertices: Vec<VertexId> = scratch.vertices().collect();
        let roll = rng.random_range(0.0..total);
        let event = if roll < mix.add_edge {
            let open: Vec<VertexId> = vertices
                .iter()
                .copied()
                .filter(|&v| scratch.degree(v) < cap)
                .collect();
            let (Some(&u), Some(&v)) = (open.choose(rng), open.choose(rng)) else {
                continue;
            };
            if u == v || scratch.contains_edge(u, v) {
                continue;
            }
            ChangeEvent::AddEdge(u.min(v), u.max(v))
        } else if roll < mix.add_edge + mix.remove_edge {
            let Some(&u) = vertices.choose(rng) else {
                continue;
            };
            let ns: Vec<VertexId> = scratch.neighbors(u).collect();
            let Some(&v) = ns.choose(rng) else { continue };
            ChangeEvent::RemoveEdge(u.min(v), u.max(v))
        } else if roll < mix.add_edge + mix.remove_edge + mix.add_vertex {
            ChangeEvent::AddVertex(scratch.fresh_vertex_id())
        } else {
            if vertices.len() <= 2 {
                continue;
            }
            let Some(&v) = vertices.choose(rng) else {
                continue;
            };
            ChangeEvent::RemoveVertex(v)
        };
        event.apply(&mut scratch)?;
        events.push(event);
    }
    Ok(ChangeBatch::new(events, t)?)
}

/// One CSV row per update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicRow {
    pub batch: usize,
    pub changed: usize,
    pub alpha: u64,
    pub beta: u64,
    pub max_awake: u64,
    pub clock_rounds: u64,
    pub valid: bool,
}

#[derive(Debug, Clone)]
pub struct DynamicReport {
    /// Row 0 is the preparation.
    pub rows: Vec<DynamicRow>,
    pub updates: Vec<UpdateReport>,
    pub update_metrics: Vec<Metrics>,
}

impl DynamicReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("batch,|S|,alpha,beta,max_awake,clock_rounds,valid\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.batch, r.changed, r.alpha, r.beta, r.max_awake, r.clock_rounds, r.valid
            ));
        }
        out
    }

    pub fn all_valid(&self) -> bool {
        self.rows.iter().all(|r| r.valid)
    }

    /// Mean per-update max awake, excluding the preparation.
    pub fn mean_update_awake(&self) -> f64 {
        let n = self.updates.len().max(1) as f64;
        self.updates.iter().map(|u| u.max_awake as f64).sum::<f64>() / n
    }
}

/// Prepares once, then applies every batch in order.
pub fn run_dynamic_experiment<P: OLocalProblem>(
    g0: Graph,
    problem: P,
    strategy: Strategy,
    batches: &[ChangeBatch],
    config: &SimConfig,
) -> Result<(DynamicReport, DynamicState<P>)> {
    let t = batches.iter().map(|b| b.t).max().unwrap_or(0);
    let n0 = g0.vertex_count();
    let (mut state, prep) = prepare(g0, problem, strategy, t, config)?;
    let prep_valid = state
        .problem
        .validate(&state.graph, &state.decisions)
        .is_ok();
    let mut rows = vec![DynamicRow {
        batch: 0,
        changed: n0,
        alpha: state.graph.max_degree() as u64,
        beta: n0 as u64,
        max_awake: awake_complexity(&prep),
        clock_rounds: prep.clock_rounds,
        valid: prep_valid,
    }];
    let mut updates = Vec::new();
    let mut update_metrics = Vec::new();
    for (i, batch) in batches.iter().enumerate() {
        let (report, metrics) = state.update(batch, config)?;
        rows.push(DynamicRow {
            batch: i + 1,
            changed: report.changed.len(),
            alpha: report.alpha,
            beta: report.beta,
            max_awake: report.max_awake,
            clock_rounds: report.clock_rounds,
            valid: report.valid,
        });
        updates.push(report);
        update_metrics.push(metrics);
    }
    Ok((
        DynamicReport {
            rows,
            updates,
            update_metrics,
        },
        state,
    ))
}

/// `count` random batches of `t` events each, drawn against the evolving graph.
pub fn random_batches(
    g: &Graph,
    count: usize,
    t: usize,
    cap: usize,
    seed: u64,
) -> Result<Vec<ChangeBatch>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = g.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let batch = random_batch(&g, t, cap, BatchMix::default(), &mut rng)?;
        for e in &batch.events {
            e.apply(&mut g)?;
        }
        out.push(batch);
    }
    Ok(out)
}
