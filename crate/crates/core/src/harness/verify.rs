use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bni::{bni_solve, check_relay_chains};
use crate::coloring::{
    batched_kw_coloring, defective_coloring_in, h_star_coloring, linial_coloring_in,
    sleeping_kw_coloring, Epsilon,
};
use crate::graph::enumerate::connected_graphs_up_to;
use crate::graph::{
    coloring_defect, generate_graph, neighborhood_independence, validate_coloring, Coloring, Graph,
    GraphFamily, VertexId,
};
use crate::math::ceil_log2;
use crate::olocal::{
    algorithm_a, build_interval_schedule, leaf_lca, sequential_solve, tree_leaves, GreedyColoring,
    Mis, OLocalProblem,
};
use crate::sim::{Pipeline, SimConfig};
use crate::Result;

/// Outcome of one suite.
#[derive(Debug, Clone, Default)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        // a handful of examples is enough to debug from
        if !ok && self.failures.len() < 5 {
            self.failures.push(detail());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "{status} {} ({} cases, {} failures)",
                c.name,
                c.cases,
                c.failures.len()
            )
            .unwrap();
            for f in c.failures.iter().filter(|f| !f.is_empty()) {
                writeln!(out, "    {f}").unwrap();
            }
        }
        out
    }
}

/// Every pair of labels `a < b` meets at their tree LCA, strictly after
/// `a` decides and strictly before `b` does, and schedules stay within
/// `ceil(log2 D) + 1` rounds ending by `2D - 1`.
pub fn check_interval_schedules(max_d: u32) -> Check {
    let mut check = Check::new("interval schedules");
    for d in 1..=max_d {
        let plans: Vec<_> = (1..=d).map(|l| build_interval_schedule(l, d)).collect();
        let Ok(plans) = plans.into_iter().collect::<Result<Vec<_>>>() else {
            check.record(false, || format!("d={d}: schedule construction failed"));
            continue;
        };
        let leaves = u64::from(tree_leaves(d));
        for (i, plan) in plans.iter().enumerate() {
            let ok = plan.schedule.len() as u32 <= ceil_log2(leaves) + 1
                && u64::from(plan.schedule.last().unwrap_or(0)) <= 2 * leaves - 1;
            check.record(ok, || {
                format!("d={d} label {}: schedule {:?}", i + 1, plan.schedule)
            });
        }
        for a in 1..=d {
            for b in a + 1..=d {
                let lca = leaf_lca(a, b) as u32;
                let (pa, pb) = (&plans[a as usize - 1], &plans[b as usize - 1]);
                let ok = pa.schedule.contains(lca)
                    && pb.schedule.contains(lca)
                    && pa.decision_round < lca
                    && lca < pb.decision_round;
                check.record(ok, || {
                    format!("d={d}: labels {a} < {b} do not meet in order (lca round {lca})")
                });
            }
        }
    }
    check
}

fn ids(g: &Graph) -> BTreeMap<VertexId, u32> {
    g.vertices().map(|v| (v, v)).collect()
}

/// Proper coloring by the greedy rule in id order.
fn greedy_labels(g: &Graph) -> Result<BTreeMap<VertexId, u32>> {
    sequential_solve(g, &ids(g), &GreedyColoring)
}

fn oracle_case<P: OLocalProblem>(
    g: &Graph,
    labels: &BTreeMap<VertexId, u32>,
    problem: &P,
    config: &SimConfig,
    algo_a: &mut Check,
    bni: &mut Check,
) -> Result<()> {
    let expected = sequential_solve(g, labels, problem)?;
    let palette = labels.values().copied().max().unwrap_or(1);
    let c = Coloring::from_map(labels.clone(), palette);
    let (got, _) = algorithm_a(g, &c, problem, config)?;
    algo_a.record(got == expected, || {
        format!(
            "{} on {:?}: {:?} vs oracle {:?}",
            problem.name(),
            g.edges().collect::<Vec<_>>(),
            got,
            expected
        )
    });
    let run = bni_solve(g, labels, problem, config)?;
    bni.record(run.decisions == expected, || {
        format!(
            "{} on {:?}: bni disagrees with the oracle",
            problem.name(),
            g.edges().collect::<Vec<_>>()
        )
    });
    Ok(())
}

/// algorithm_a and bni_solve against the sequential oracle on every
/// connected graph with at most `max_n` vertices, under id labels and the
/// greedy id-order coloring; plus relay chains and the `K + 2` awake bound.
pub fn check_exhaustive(max_n: usize, config: &SimConfig) -> Result<Vec<Check>> {
    let mut algo_a = Check::new(&format!(
        "algorithm-a oracle, all connected graphs n <= {max_n}"
    ));
    let mut bni = Check::new(&format!("bni oracle, all connected graphs n <= {max_n}"));
    let mut relay = Check::new("bni relay chains and K+2 awake bound");
    let mut valid = Check::new("validators accept oracle outputs");
    for g in connected_graphs_up_to(max_n) {
        let k = neighborhood_independence(&g)?.max(1) as u64;
        for labels in [ids(&g), greedy_labels(&g)?] {
            oracle_case(&g, &labels, &Mis, config, &mut algo_a, &mut bni)?;
            oracle_case(&g, &labels, &GreedyColoring, config, &mut algo_a, &mut bni)?;
            let run = bni_solve(&g, &labels, &Mis, config)?;
            let chains = check_relay_chains(&g, &run.log);
            relay.record(chains.is_ok() && run.bni_awake() <= k + 2, || {
                format!(
                    "{:?}: {:?}, awake {} with K={k}",
                    g.edges().collect::<Vec<_>>(),
                    chains,
                    run.bni_awake()
                )
            });
            valid.record(Mis.validate(&g, &run.decisions).is_ok(), || {
                format!("{:?}: invalid MIS", g.edges().collect::<Vec<_>>())
            });
        }
    }
    Ok(vec![algo_a, bni, relay, valid])
}

/// Every proper coloring with at most 4 colors of every connected graph
/// with at most `max_n` vertices, used as algorithm_a labels.
pub fn check_all_colorings(max_n: usize, config: &SimConfig) -> Result<Check> {
    let mut check = Check::new(&format!(
        "algorithm-a oracle, all proper 4-colorings n <= {max_n}"
    ));
    for g in connected_graphs_up_to(max_n) {
        let vs: Vec<VertexId> = g.vertices().collect();
        let total = 4usize.pow(vs.len() as u32);
        for code in 0..total {
            let labels: BTreeMap<VertexId, u32> = vs
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, (code / 4usize.pow(i as u32) % 4) as u32 + 1))
                .collect();
            if g.edges().any(|(u, v)| labels[&u] == labels[&v]) {
                continue;
            }
            let c = Coloring::from_map(labels.clone(), 4);
            for ok in [
                algorithm_a(&g, &c, &Mis, config)?.0 == sequential_solve(&g, &labels, &Mis)?,
                algorithm_a(&g, &c, &GreedyColoring, config)?.0
                    == sequential_solve(&g, &labels, &GreedyColoring)?,
            ] {
                check.record(ok, || {
                    format!("{:?} colored {labels:?}", g.edges().collect::<Vec<_>>())
                });
            }
        }
    }
    Ok(check)
}

/// Coloring pipelines on generated graphs of every family.
pub fn check_coloring_corpus(config: &SimConfig) -> Result<Check> {
    let mut check = Check::new("coloring pipelines on the generated corpus");
    let families = [
        GraphFamily::Path,
        GraphFamily::Cycle,
        GraphFamily::Star,
        GraphFamily::RandomBoundedDegree,
        GraphFamily::LineGraphOfRandom { rank: 2 },
        GraphFamily::LineGraphOfRandom { rank: 3 },
        GraphFamily::UnitInterval,
    ];
    let eps = Epsilon::new(1, 2)?;
    for family in families {
        for (n, dmax) in [(40, 4), (120, 9)] {
            for seed in 1..=3 {
                let dmax = if family == GraphFamily::Star {
                    n - 1
                } else {
                    dmax
                };
                let g = generate_graph(family, n, dmax, seed)?;
                let delta = g.max_degree() as u64;
                let name = format!("{family} n={n} dmax={dmax} seed={seed}");
                let mut pipeline = Pipeline::new(config.clone());
                let (linial, _) = linial_coloring_in(&mut pipeline, &g, delta)?;
                check.record(validate_coloring(&g, &linial, true).proper, || {
                    format!("{name}: linial improper")
                });
                for (algo, run) in [
                    ("kw31", sleeping_kw_coloring(&g, config)?),
                    ("batched32", batched_kw_coloring(&g, eps, config)?),
                    ("hstar", h_star_coloring(&g, config)?),
                ] {
                    let ok = validate_coloring(&g, &run.coloring, true).proper
                        && u64::from(run.coloring.max_color()) <= delta + 1
                        && run
                            .levels
                            .iter()
                            .all(|l| l.measured_max_defect <= l.defect_bound);
                    check.record(ok, || format!("{name}: {algo} output invalid"));
                }
                for p in [1, 2, 3] {
                    let r = defective_coloring_in(&mut pipeline, &g, delta, p)?;
                    let measured = coloring_defect(&g, &r.coloring)?.max_defect as u64;
                    check.record(measured <= delta.div_ceil(p), || {
                        format!("{name}: p={p} defect {measured}")
                    });
                }
            }
        }
    }
    Ok(check)
}

/// All suites. `max_n` bounds the exhaustive graph enumeration (at most 8).
pub fn cmd_verify(max_n: usize, config: &SimConfig) -> Result<VerifyReport> {
    let mut checks = vec![check_interval_schedules(128)];
    checks.extend(check_exhaustive(max_n, config)?);
    checks.push(check_all_colorings(max_n.min(5), config)?);
    checks.push(check_coloring_corpus(config)?);
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let config = SimConfig::default();
        let report = cmd_verify(5, &config).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert!(report.to_text().lines().all(|l| l.starts_with("PASS")));
    }

    #[test]
    fn failures_are_reported() {
        let mut c = Check::new("x");
        c.record(true, String::new);
        c.record(false, || "broken".into());
        assert!(!c.passed());
        let report = VerifyReport { checks: vec![c] };
        assert!(report
            .to_text()
            .starts_with("FAIL x (2 cases, 1 failures)\n    broken"));
    }
}
