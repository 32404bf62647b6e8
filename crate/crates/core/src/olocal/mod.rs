//! Problems solvable greedily along an acyclic orientation, and the interval
//! tree schedule that solves them from a proper coloring in `O(log d)` awake
//! rounds.

mod problem;
mod schedule;

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{validate_coloring, Coloring, Graph, GraphError, VertexId};
use crate::sim::{
    Envelope, Metrics, NodeContext, NodeProgram, Outgoing, Pipeline, ProgramError, Round,
    SimConfig, Start, WakeOutcome,
};
use crate::Result;

pub use problem::{DecideContext, GreedyColoring, Mis, MisState, OLocalProblem, ProblemKind};
pub use schedule::{build_interval_schedule, leaf_lca, tree_leaves, IntervalSchedule};

pub type Decisions<D> = BTreeMap<VertexId, D>;

/// Decisions of vertices outside a subgraph, keyed by the member they border.
pub type FixedParents<D> = BTreeMap<VertexId, BTreeMap<VertexId, D>>;

struct IntervalNode<'a, P: OLocalProblem> {
    problem: &'a P,
    ctx: DecideContext,
    plan: IntervalSchedule,
    parents: BTreeSet<VertexId>,
    known: BTreeMap<VertexId, P::Decision>,
    decision: Option<P::Decision>,
}

impl<P: OLocalProblem> NodeProgram for IntervalNode<'_, P> {
    type Message = P::Decision;
    type Output = P::Decision;

    fn on_start(&mut self, _ctx: &NodeContext<'_>) -> std::result::Result<Start, ProgramError> {
        Ok(Start {
            schedule: self.plan.schedule.clone(),
            done: false,
        })
    }

    fn send(
        &mut self,
        _round: Round,
    ) -> std::result::Result<Vec<Outgoing<P::Decision>>, ProgramError> {
        Ok(self
            .decision
            .iter()
            .cloned()
            .map(Outgoing::Broadcast)
            .collect())
    }

    fn on_wake(
        &mut self,
        round: Round,
        inbox: Vec<Envelope<P::Decision>>,
    ) -> std::result::Result<WakeOutcome, ProgramError> {
        for env in inbox {
            if self.parents.contains(&env.from) {
                self.known.insert(env.from, env.payload);
            }
        }
        if round == self.plan.decision_round {
            if let Some(p) = self.parents.iter().find(|p| !self.known.contains_key(p)) {
                return Err(format!("decision of parent {p} missing at decision round").into());
            }
            self.decision = Some(self.problem.decide(&self.ctx, &self.known));
        }
        Ok(WakeOutcome {
            wake_at: Vec::new(),
            done: Some(round) == self.plan.schedule.last(),
        })
    }

    fn into_output(self) -> P::Decision {
        self.decision
            .expect("interval schedule always reaches the decision round")
    }
}

fn check_labels(g: &Graph, c: &Coloring) -> Result<()> {
    let report = validate_coloring(g, c, true);
    if let Some(v) = g.vertices().find(|&v| c.get(v) == 0) {
        return Err(GraphError::Uncolored(v).into());
    }
    if !report.proper {
        return Err(GraphError::ImproperColoring(report.violations.len()).into());
    }
    Ok(())
}

/// Runs the interval schedule on `members` of `full`, using the colors of
/// `c` as labels. Each member's parents are its in-member neighbors with a
/// smaller label plus the fixed outside decisions in `fixed`; vertices
/// outside `members` never wake.
pub fn algorithm_a_on_subgraph<P: OLocalProblem>(
    pipeline: &mut Pipeline,
    name: &str,
    full: &Graph,
    members: &BTreeSet<VertexId>,
    c: &Coloring,
    fixed: &FixedParents<P::Decision>,
    problem: &P,
) -> Result<Decisions<P::Decision>> {
    if let Some(&v) = members.iter().find(|v| !full.contains_vertex(**v)) {
        return Err(GraphError::MissingVertex(v).into());
    }
    let sub = full.induced_subgraph(members);
    check_labels(&sub, c)?;
    let d = c.palette();
    let mut programs = BTreeMap::new();
    for v in sub.vertices() {
        let label = c.get(v);
        let parents = sub.neighbors(v).filter(|&u| c.get(u) < label).collect();
        programs.insert(
            v,
            IntervalNode {
                problem,
                ctx: DecideContext {
                    id: v,
                    degree: full.degree(v),
                },
                plan: build_interval_schedule(label, d)?,
                parents,
                known: fixed.get(&v).cloned().unwrap_or_default(),
                decision: None,
            },
        );
    }
    Ok(pipeline.run(name, &sub, programs)?)
}

/// Solves `problem` on `g` from the proper coloring `c` (palette `d`).
pub fn algorithm_a_in<P: OLocalProblem>(
    pipeline: &mut Pipeline,
    name: &str,
    g: &Graph,
    c: &Coloring,
    problem: &P,
) -> Result<Decisions<P::Decision>> {
    let members = g.vertices().collect();
    algorithm_a_on_subgraph(pipeline, name, g, &members, c, &BTreeMap::new(), problem)
}

/// [`algorithm_a_in`] as a standalone run.
pub fn algorithm_a<P: OLocalProblem>(
    g: &Graph,
    c: &Coloring,
    problem: &P,
    config: &SimConfig,
) -> Result<(Decisions<P::Decision>, Metrics)> {
    let mut pipeline = Pipeline::new(config.clone());
    let decisions = algorithm_a_in(&mut pipeline, "algorithm-a", g, c, problem)?;
    Ok((decisions, pipeline.finish()))
}

/// Centralized reference: decide vertices one by one in increasing
/// `(label, id)` order, each seeing its smaller-labeled neighbors.
pub fn sequential_solve<P: OLocalProblem>(
    g: &Graph,
    labels: &BTreeMap<VertexId, u32>,
    problem: &P,
) -> Result<Decisions<P::Decision>> {
    let mut order: Vec<VertexId> = g.vertices().collect();
    for &v in &order {
        if !labels.contains_key(&v) {
            return Err(GraphError::MissingLabel(v).into());
        }
    }
    order.sort_by_key(|&v| (labels[&v], v));
    let mut out: Decisions<P::Decision> = BTreeMap::new();
    for v in order {
        let parents = g
            .neighbors(v)
            .filter(|u| (labels[u], *u) < (labels[&v], v))
            .map(|u| (u, out[&u].clone()))
            .collect();
        let ctx = DecideContext {
            id: v,
            degree: g.degree(v),
        };
        out.insert(v, problem.decide(&ctx, &parents));
    }
    Ok(out)
}

/// Writes decisions as CSV with columns `vertex,decision`.
pub fn decisions_to_csv<D: std::fmt::Display>(decisions: &Decisions<D>) -> String {
    let mut out = String::from("vertex,decision\n");
    for (v, d) in decisions {
        out.push_str(&format!("{v},{d}\n"));
    }
    out
}

#[cfg(test)]
mod tests;
