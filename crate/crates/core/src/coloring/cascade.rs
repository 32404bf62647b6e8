//! Full `(delta + 1)`-coloring pipelines built from the reductions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{Coloring, Graph};
use crate::math::{iterated_log2, log_star};
use crate::sim::{Metrics, Pipeline, SimConfig};
use crate::Result;

use super::kw::{
    batched_kw_reduce_in, sleeping_kw_iterative_in, BlockedColoring, Epsilon, KwOutcome,
};
use super::reduce::{defective_coloring_in, linial_coloring_in};

/// What one level of the cascade did.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeLevel {
    pub k: u32,
    pub delta: u64,
    pub p: u64,
    pub defect_bound: u64,
    pub measured_max_defect: u64,
    /// Palette of the defective coloring.
    pub classes: u64,
    pub color_factor: f64,
}

#[derive(Debug, Clone)]
pub struct ColoringRun {
    pub coloring: Coloring,
    pub metrics: Metrics,
    /// The last block-merging reduction of the pipeline.
    pub reduction: KwOutcome,
    pub levels: Vec<CascadeLevel>,
}

/// Linial coloring followed by pairwise block merging.
pub fn sleeping_kw_coloring(g: &Graph, config: &SimConfig) -> Result<ColoringRun> {
    let delta = g.max_degree() as u64;
    let mut pipeline = Pipeline::new(config.clone());
    let (initial, _) = linial_coloring_in(&mut pipeline, g, delta)?;
    let reduction = sleeping_kw_iterative_in(&mut pipeline, g, &initial, delta)?;
    Ok(ColoringRun {
        coloring: reduction.coloring.clone(),
        metrics: pipeline.finish(),
        reduction,
        levels: Vec::new(),
    })
}

/// Linial coloring followed by merging `ceil(delta^eps)` blocks at a time.
pub fn batched_kw_coloring(g: &Graph, eps: Epsilon, config: &SimConfig) -> Result<ColoringRun> {
    let delta = g.max_degree() as u64;
    let mut pipeline = Pipeline::new(config.clone());
    let (initial, _) = linial_coloring_in(&mut pipeline, g, delta)?;
    let blocked = BlockedColoring::new(initial, delta as u32 + 1)?;
    let reduction = batched_kw_reduce_in(&mut pipeline, g, &blocked, eps, delta)?;
    Ok(ColoringRun {
        coloring: reduction.coloring.clone(),
        metrics: pipeline.finish(),
        reduction,
        levels: Vec::new(),
    })
}

/// `max(2, ceil(log2^(k-1) delta))`.
pub fn cascade_p(delta: u64, k: u32) -> u64 {
    let x = iterated_log2(delta as f64, k.saturating_sub(1));
    (x.ceil().max(0.0) as u64).max(2)
}

/// `max(1, log* delta)`.
pub fn h_star_k(delta: u64) -> u32 {
    log_star(delta as f64).max(1)
}

/// Runs level `k` of the cascade on `g`, whose degrees are at most `delta`.
pub fn h_k_in(
    pipeline: &mut Pipeline,
    g: &Graph,
    k: u32,
    delta: u64,
    levels: &mut Vec<CascadeLevel>,
) -> Result<KwOutcome> {
    if k <= 1 {
        let mut child = pipeline.child();
        let (initial, _) = linial_coloring_in(&mut child, g, delta)?;
        let out = sleeping_kw_iterative_in(&mut child, g, &initial, delta)?;
        pipeline.absorb(child, "h1");
        return Ok(out);
    }
    let p = cascade_p(delta, k);
    let mut child = pipeline.child();
    let defective = defective_coloring_in(&mut child, g, delta, p)?;
    levels.push(CascadeLevel {
        k,
        delta,
        p,
        defect_bound: defective.defect_bound,
        measured_max_defect: defective.measured_max_defect,
        classes: defective.colors_bound,
        color_factor: defective.color_factor(),
    });
    let class = &defective.coloring;
    // Classes are vertex-disjoint, so one run over their union colors them all in parallel.
    let within = g.filter_edges(|u, v| class.get(u) == class.get(v));
    let inner_delta = defective.defect_bound;
    let inner = h_k_in(&mut child, &within, k - 1, inner_delta, levels)?;
    let width = inner_delta as u32 + 1;
    let combined: BTreeMap<_, _> = g
        .vertices()
        .map(|v| (v, (class.get(v) - 1) * width + inner.coloring.get(v)))
        .collect();
    let mu = Coloring::from_map(combined, defective.colors_bound as u32 * width);
    let out = sleeping_kw_iterative_in(&mut child, g, &mu, delta)?;
    pipeline.absorb(child, &format!("h{k}"));
    Ok(out)
}

pub fn h_k_coloring(g: &Graph, k: u32, config: &SimConfig) -> Result<ColoringRun> {
    let mut pipeline = Pipeline::new(config.clone());
    let mut levels = Vec::new();
    let reduction = h_k_in(&mut pipeline, g, k, g.max_degree() as u64, &mut levels)?;
    Ok(ColoringRun {
        coloring: reduction.coloring.clone(),
        metrics: pipeline.finish(),
        reduction,
        levels,
    })
}

pub fn h_star_coloring(g: &Graph, config: &SimConfig) -> Result<ColoringRun> {
    h_k_coloring(g, h_star_k(g.max_degree() as u64), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{coloring_defect, generate_graph, GraphFamily};

    fn config() -> SimConfig {
        SimConfig::default()
    }

    #[test]
    fn parameters() {
        assert_eq!(h_star_k(2), 1);
        assert_eq!(h_star_k(1), 1);
        assert_eq!(h_star_k(16), 3);
        assert_eq!(h_star_k(32), 4);
        assert_eq!(cascade_p(16, 2), 4);
        assert_eq!(cascade_p(16, 3), 2);
        assert_eq!(cascade_p(64, 2), 6);
        assert_eq!(cascade_p(4, 5), 2);
    }

    #[test]
    fn h1_on_cycle() {
        let g = generate_graph(GraphFamily::Cycle, 5, 2, 0).unwrap();
        let run = h_k_coloring(&g, 1, &config()).unwrap();
        assert!(run.coloring.is_proper(&g) && run.coloring.max_color() <= 3);
    }

    #[test]
    fn h2_on_random_graph() {
        let g = generate_graph(GraphFamily::RandomBoundedDegree, 300, 16, 3).unwrap();
        let run = h_k_coloring(&g, 2, &config()).unwrap();
        assert!(run.coloring.is_proper(&g));
        assert!(run.coloring.max_color() as usize <= g.max_degree() + 1);
        let level = &run.levels[0];
        assert_eq!(level.p, cascade_p(g.max_degree() as u64, 2));
        assert!(level.measured_max_defect <= level.defect_bound);
    }

    #[test]
    fn small_degree_terminates_for_every_k() {
        let g = generate_graph(GraphFamily::RandomBoundedDegree, 80, 4, 9).unwrap();
        for k in 1..=5 {
            let run = h_k_coloring(&g, k, &config()).unwrap();
            assert!(run.coloring.is_proper(&g) && run.coloring.max_color() <= 5);
        }
    }

    #[test]
    fn pipelines_agree_on_palette() {
        let g = generate_graph(GraphFamily::RandomBoundedDegree, 200, 8, 5).unwrap();
        let delta = g.max_degree() as u32;
        for run in [
            sleeping_kw_coloring(&g, &config()).unwrap(),
            batched_kw_coloring(&g, Epsilon::new(1, 2).unwrap(), &config()).unwrap(),
            h_star_coloring(&g, &config()).unwrap(),
        ] {
            assert!(run.coloring.is_proper(&g) && run.coloring.max_color() <= delta + 1);
            assert_eq!(coloring_defect(&g, &run.coloring).unwrap().max_defect, 0);
        }
    }
}
