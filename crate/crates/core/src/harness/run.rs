use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bni::{bni_solve_in, check_relay_chains, compute_labels};
use crate::coloring::{
    batched_kw_reduce_in, defective_coloring_in, h_k_in, h_star_k, linial_coloring_in,
    sleeping_kw_iterative_in, BlockedColoring, CascadeLevel,
};
use crate::dynamic::{random_batches, run_dynamic_experiment, DynamicReport};
use crate::graph::{generate_graph, validate_coloring, ChangeBatch, Coloring, Graph};
use crate::olocal::{
    algorithm_a_in, decisions_to_csv, GreedyColoring, Mis, OLocalProblem, ProblemKind,
};
use crate::sim::{Metrics, Pipeline, RoundTrace, SimConfig};
use crate::Result;

use super::{Algo, ExperimentConfig};

/// Result of one algorithm run on one seed's graph.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub graph: Graph,
    pub metrics: Metrics,
    pub trace: Vec<RoundTrace>,
    /// Distinct colors or decisions in the output.
    pub colors: usize,
    pub valid: bool,
    pub violation: Option<String>,
    pub decisions_csv: String,
    /// Per-vertex decision log, for the bni algorithm only.
    pub log_json: Option<String>,
    /// Defective levels of the hk and hstar cascades.
    pub levels: Vec<CascadeLevel>,
}

impl SeedRun {
    pub fn trace_json(&self) -> String {
        serde_json::to_string_pretty(&self.trace).expect("trace serializes")
    }
}

pub(crate) fn sim_config(config: &ExperimentConfig) -> SimConfig {
    SimConfig {
        strict_delivery: config.strict,
        trace: config.trace,
        ..SimConfig::default()
    }
}

fn coloring_check(g: &Graph, c: &Coloring, max_colors: Option<u64>) -> (bool, Option<String>) {
    let report = validate_coloring(g, c, true);
    if !report.proper {
        return (
            false,
            Some(format!(
                "{} conflicting edges or uncolored vertices",
                report.violations.len().max(1)
            )),
        );
    }
    if let Some(max) = max_colors {
        if u64::from(c.max_color()) > max {
            return (
                false,
                Some(format!("color {} exceeds {max}", c.max_color())),
            );
        }
    }
    (true, None)
}

struct Solved {
    colors: usize,
    valid: bool,
    violation: Option<String>,
    decisions_csv: String,
    log_json: Option<String>,
}

fn solve_problem<P: OLocalProblem>(
    pipeline: &mut Pipeline,
    config: &ExperimentConfig,
    g: &Graph,
    problem: &P,
) -> Result<Solved> {
    let delta = g.max_degree() as u64;
    let (decisions, mut violation, log_json) = if config.algo == Algo::Bni {
        let labels = compute_labels(pipeline, g, config.labels)?;
        let (decisions, _, log) = bni_solve_in(pipeline, g, &labels, problem)?;
        let relay = check_relay_chains(g, &log).err();
        let json = serde_json::to_string_pretty(&log.values().collect::<Vec<_>>())
            .expect("log serializes");
        (decisions, relay, Some(json))
    } else {
        let (c, _) = linial_coloring_in(pipeline, g, delta)?;
        (
            algorithm_a_in(pipeline, "algorithm-a", g, &c, problem)?,
            None,
            None,
        )
    };
    if let Err(e) = problem.validate(g, &decisions) {
        violation.get_or_insert(e);
    }
    let colors = decisions
        .values()
        .map(|d| d.to_string())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    Ok(Solved {
        colors,
        valid: violation.is_none(),
        violation,
        decisions_csv: decisions_to_csv(&decisions),
        log_json,
    })
}

/// Runs the configured algorithm on the graph of `seed`.
pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<SeedRun> {
    let g = generate_graph(config.family, config.n, config.dmax, seed)?;
    let delta = g.max_degree() as u64;
    let mut pipeline = Pipeline::new(sim_config(config));
    let proper_bound = Some(delta + 1);
    let mut levels = Vec::new();

    let colored = |c: Coloring, bound: Option<u64>, g: &Graph| {
        let (valid, violation) = coloring_check(g, &c, bound);
        let csv = decisions_to_csv(c.as_map());
        Solved {
            colors: c.colors_used(),
            valid,
            violation,
            decisions_csv: csv,
            log_json: None,
        }
    };
    let solved = match config.algo {
        Algo::AlgorithmA | Algo::Bni => match config.problem {
            ProblemKind::Mis => solve_problem(&mut pipeline, config, &g, &Mis)?,
            ProblemKind::GreedyColoring => {
                solve_problem(&mut pipeline, config, &g, &GreedyColoring)?
            }
        },
        Algo::Linial => {
            let (c, _) = linial_coloring_in(&mut pipeline, &g, delta)?;
            colored(c, None, &g)
        }
        Algo::Defective => {
            let p = config.p.expect("validated");
            let r = defective_coloring_in(&mut pipeline, &g, delta, p)?;
            let mut s = colored(r.coloring, None, &g);
            s.valid = r.measured_max_defect <= r.defect_bound;
            s.violation = (!s.valid).then(|| {
                format!(
                    "defect {} exceeds {}",
                    r.measured_max_defect, r.defect_bound
                )
            });
            s
        }
        Algo::Kw31 => {
            let (c, _) = linial_coloring_in(&mut pipeline, &g, delta)?;
            let out = sleeping_kw_iterative_in(&mut pipeline, &g, &c, delta)?;
            colored(out.coloring, proper_bound, &g)
        }
        Algo::Batched32 => {
            let (c, _) = linial_coloring_in(&mut pipeline, &g, delta)?;
            let blocked = BlockedColoring::new(c, delta as u32 + 1)?;
            let out = batched_kw_reduce_in(&mut pipeline, &g, &blocked, config.eps, delta)?;
            colored(out.coloring, proper_bound, &g)
        }
        Algo::Hk | Algo::Hstar => {
            let k = if config.algo == Algo::Hk {
                config.k.expect("validated")
            } else {
                h_star_k(delta)
            };
            let out = h_k_in(&mut pipeline, &g, k, delta, &mut levels)?;
            colored(out.coloring, proper_bound, &g)
        }
    };
    Ok(SeedRun {
        seed,
        graph: g,
        trace: std::mem::take(&mut pipeline.trace),
        metrics: pipeline.finish(),
        colors: solved.colors,
        valid: solved.valid,
        violation: solved.violation,
        decisions_csv: solved.decisions_csv,
        log_json: solved.log_json,
        levels,
    })
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: String,
    pub runs: Vec<SeedRun>,
}

impl RunOutput {
    pub fn all_valid(&self) -> bool {
        self.runs.iter().all(|r| r.valid)
    }
}

pub const RUN_CSV_HEADER: &str =
    "seed,phase,max_awake,clock_rounds,messages_sent,messages_delivered,messages_dropped,max_message_size,colors,valid";

/// Runs every seed (concurrently) and renders one CSV row per phase plus a
/// `total` row per seed. Nothing is returned if any run fails.
pub fn cmd_run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let results: Vec<Result<SeedRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .seeds
            .iter()
            .map(|&seed| scope.spawn(move || run_seed(config, seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("seed run panicked"))
            .collect()
    });
    let mut runs = results.into_iter().collect::<Result<Vec<_>>>()?;
    runs.sort_by_key(|r| r.seed);

    let mut csv = format!(
        "# config {} algo={}\n{RUN_CSV_HEADER}\n",
        config.hash(),
        config.algo
    );
    for run in &runs {
        for phase in &run.metrics.phases {
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{}",
                run.seed,
                phase.name,
                phase.max_awake(),
                phase.clock_rounds,
                phase.messages_sent,
                phase.messages_delivered,
                phase.messages_dropped,
                phase.max_message_size,
                run.colors,
                run.valid
            )
            .unwrap();
        }
        let m = &run.metrics;
        writeln!(
            csv,
            "{},total,{},{},{},{},{},{},{},{}",
            run.seed,
            crate::sim::awake_complexity(m),
            m.clock_rounds,
            m.messages_sent,
            m.messages_delivered,
            m.messages_dropped,
            m.max_message_size,
            run.colors,
            run.valid
        )
        .unwrap();
    }
    Ok(RunOutput { csv, runs })
}

/// Dynamic experiment for one seed: the initial graph and its batches.
#[derive(Debug, Clone)]
pub struct DynamicRun {
    pub seed: u64,
    pub batches: Vec<ChangeBatch>,
    pub report: DynamicReport,
}

#[derive(Debug, Clone)]
pub struct DynamicOutput {
    pub csv: String,
    pub runs: Vec<DynamicRun>,
}

impl DynamicOutput {
    pub fn all_valid(&self) -> bool {
        self.runs.iter().all(|r| r.report.all_valid())
    }
}

/// Prepares on the seed's graph, then applies `batches` random batches of
/// `t` events. The CSV has one block per seed, headed by a `# seed` line.
pub fn cmd_dynamic(config: &ExperimentConfig) -> Result<DynamicOutput> {
    config.validate()?;
    let sim = sim_config(config);
    let mut runs = Vec::new();
    let mut csv = format!(
        "# config {} strategy={} problem={} t={}\n",
        config.hash(),
        config.strategy,
        config.problem,
        config.t
    );
    for &seed in &config.seeds {
        let g = generate_graph(config.family, config.n, config.dmax, seed)?;
        let batches = random_batches(&g, config.batches, config.t, config.dmax as usize, seed)?;
        let report = match config.problem {
            ProblemKind::Mis => run_dynamic_experiment(g, Mis, config.strategy, &batches, &sim)?.0,
            ProblemKind::GreedyColoring => {
                run_dynamic_experiment(g, GreedyColoring, config.strategy, &batches, &sim)?.0
            }
        };
        writeln!(csv, "# seed {seed}").unwrap();
        csv.push_str(&report.to_csv());
        runs.push(DynamicRun {
            seed,
            batches,
            report,
        });
    }
    Ok(DynamicOutput { csv, runs })
}

/// Graph files (`graph-<seed>.txt`) for every configured seed.
pub fn cmd_gen(config: &ExperimentConfig) -> Result<BTreeMap<String, String>> {
    config.validate()?;
    let mut files = BTreeMap::new();
    for &seed in &config.seeds {
        let g = generate_graph(config.family, config.n, config.dmax, seed)?;
        files.insert(
            format!("graph-{seed}.txt"),
            crate::graph::io::write_graph(&g)?,
        );
    }
    Ok(files)
}
