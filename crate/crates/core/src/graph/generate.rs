use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError, VertexId};

/// Graph families used as test corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFamily {
    Path,
    Cycle,
    /// Center gets the largest id.
    Star,
    RandomBoundedDegree,
    /// Line graph of a random `rank`-uniform hypergraph; rank 2 is the
    /// ordinary line graph. Neighborhood independence is at most `rank`.
    LineGraphOfRandom {
        rank: u32,
    },
    /// Unit interval graph over randomly spaced points, ids in left-to-right order.
    UnitInterval,
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Path => f.write_str("path"),
            GraphFamily::Cycle => f.write_str("cycle"),
            GraphFamily::Star => f.write_str("star"),
            GraphFamily::RandomBoundedDegree => f.write_str("random-bounded-degree"),
            GraphFamily::LineGraphOfRandom { rank: 2 } => f.write_str("line-graph-of-random"),
            GraphFamily::LineGraphOfRandom { rank } => write!(f, "line-graph-of-random:{rank}"),
            GraphFamily::UnitInterval => f.write_str("unit-interval"),
        }
    }
}

impl FromStr for GraphFamily {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || GraphError::UnknownFamily(s.to_string());
        Ok(match s {
            "path" => GraphFamily::Path,
            "cycle" => GraphFamily::Cycle,
            "star" => GraphFamily::Star,
            "random" | "random-bounded-degree" => GraphFamily::RandomBoundedDegree,
            "line-graph" | "line-graph-of-random" => GraphFamily::LineGraphOfRandom { rank: 2 },
            "unit-interval" => GraphFamily::UnitInterval,
            other => {
                let rank = other
                    .strip_prefix("line-graph-of-random:")
                    .or_else(|| other.strip_prefix("line-graph:"))
                    .ok_or_else(unknown)?;
                let rank: u32 = rank.parse().map_err(|_| unknown())?;
                if rank < 2 {
                    return Err(unknown());
                }
                GraphFamily::LineGraphOfRandom { rank }
            }
        })
    }
}

/// Deterministic generator: the same arguments always give the same graph.
/// Ids are `1..=n`. The maximum degree never exceeds `max_degree_cap`.
pub fn generate_graph(
    family: GraphFamily,
    n: u32,
    max_degree_cap: u32,
    seed: u64,
) -> Result<Graph, GraphError> {
    if max_degree_cap == 0 {
        return Err(GraphError::Infeasible(
            "degree cap must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = max_degree_cap as usize;
    match family {
        GraphFamily::Path => {
            if n >= 3 && cap < 2 {
                return Err(GraphError::Infeasible(format!(
                    "path on {n} vertices needs degree 2"
                )));
            }
            let edges: Vec<_> = (1..n).map(|v| (v, v + 1)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphFamily::Cycle => {
            if n < 3 {
                return Err(GraphError::Infeasible(format!(
                    "cycle needs n >= 3, got {n}"
                )));
            }
            if cap < 2 {
                return Err(GraphError::Infeasible("cycle needs degree 2".into()));
            }
            let mut edges: Vec<_> = (1..n).map(|v| (v, v + 1)).collect();
            edges.push((n, 1));
            Graph::from_edges(n, &edges)
        }
        GraphFamily::Star => {
            if n >= 1 && (n - 1) as usize > cap {
                return Err(GraphError::Infeasible(format!(
                    "star on {n} vertices has degree {}, cap is {cap}",
                    n - 1
                )));
            }
            let edges: Vec<_> = (1..n).map(|leaf| (n, leaf)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphFamily::RandomBoundedDegree => Ok(random_bounded_degree(n, cap, &mut rng)),
        GraphFamily::LineGraphOfRandom { rank } => line_graph_of_random(n, cap, rank, &mut rng),
        GraphFamily::UnitInterval => Ok(unit_interval(n, cap, &mut rng)),
    }
}

/// Random graph targeting `n * cap / 2` edges, never exceeding degree `cap`.
fn random_bounded_degree(n: u32, cap: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::with_vertices(n);
    if n < 2 {
        return g;
    }
    let target = n as usize * cap / 2;
    let mut open: Vec<VertexId> = (1..=n).collect();
    let mut misses = 0;
    while g.edge_count() < target && open.len() >= 2 && misses < 64 * n as usize {
        let i = rng.random_range(0..open.len());
        let j = rng.random_range(0..open.len());
        let (u, v) = (open[i], open[j]);
        if u == v || g.contains_edge(u, v) {
            misses += 1;
            continue;
        }
        g.add_edge(u, v).expect("checked");
        // swap_remove the larger index first so the smaller one stays valid
        for idx in [i.max(j), i.min(j)] {
            if g.degree(open[idx]) >= cap {
                open.swap_remove(idx);
            }
        }
    }
    g
}

fn line_graph_of_random(
    n: u32,
    cap: usize,
    rank: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GraphError> {
    let rank = rank as usize;
    // Each base vertex may lie in at most `per_vertex` hyperedges, so a
    // hyperedge meets at most rank * (per_vertex - 1) others.
    let per_vertex = cap / rank + 1;
    if per_vertex < 2 {
        return Err(GraphError::Infeasible(format!(
            "line graph of rank {rank} needs degree cap >= {rank}"
        )));
    }
    let base_vertices = ((n as usize * rank).div_ceil(per_vertex) * 3 / 2).max(rank + 1);
    let mut load = vec![0usize; base_vertices];
    let mut hyperedges: Vec<Vec<usize>> = Vec::with_capacity(n as usize);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut attempts = 0usize;
    while hyperedges.len() < n as usize {
        attempts += 1;
        if attempts > 1000 * (n as usize + 1) {
            return Err(GraphError::Infeasible(format!(
                "could not place {n} hyperedges of rank {rank}"
            )));
        }
        let open: Vec<usize> = (0..base_vertices)
            .filter(|&x| load[x] < per_vertex)
            .collect();
        if open.len() < rank {
            return Err(GraphError::Infeasible("base hypergraph saturated".into()));
        }
        let mut pick: Vec<usize> = open.choose_multiple(rng, rank).copied().collect();
        pick.sort_unstable();
        if !seen.insert(pick.clone()) {
            continue;
        }
        for &x in &pick {
            load[x] += 1;
        }
        hyperedges.push(pick);
    }
    let mut incident: Vec<Vec<VertexId>> = vec![Vec::new(); base_vertices];
    for (i, e) in hyperedges.iter().enumerate() {
        for &x in e {
            incident[x].push(i as VertexId + 1);
        }
    }
    let mut g = Graph::with_vertices(n);
    for members in &incident {
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                if !g.contains_edge(u, v) {
                    g.add_edge(u, v)?;
                }
            }
        }
    }
    Ok(g)
}

/// Points on a line with integer gaps in `[step, 2 * step]`, where
/// `step * (cap / 2) >= UNIT`; at most `cap / 2` points fit within unit
/// distance on either side, so the degree stays below the cap.
fn unit_interval(n: u32, cap: usize, rng: &mut ChaCha8Rng) -> Graph {
    const UNIT: u64 = 1 << 20;
    let half = (cap / 2) as u64;
    let step = if half == 0 {
        UNIT + 1
    } else {
        UNIT.div_ceil(half)
    };
    let mut positions = Vec::with_capacity(n as usize);
    let mut x = 0u64;
    for _ in 0..n {
        positions.push(x);
        x += rng.random_range(step..=2 * step);
    }
    let mut g = Graph::with_vertices(n);
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[j] - positions[i] > UNIT {
                break;
            }
            g.add_edge(i as VertexId + 1, j as VertexId + 1)
                .expect("fresh pair");
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_star_shapes() {
        let p3 = generate_graph(GraphFamily::Path, 3, 2, 99).unwrap();
        assert_eq!(p3.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 3)]);
        let star = generate_graph(GraphFamily::Star, 4, 3, 0).unwrap();
        assert_eq!(star.neighbors(4).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(star.edge_count(), 3);
    }

    #[test]
    fn infeasible_parameters() {
        assert!(matches!(
            generate_graph(GraphFamily::Cycle, 2, 2, 0),
            Err(GraphError::Infeasible(_))
        ));
        assert!(generate_graph(GraphFamily::Star, 5, 3, 0).is_err());
        assert!(generate_graph(GraphFamily::Path, 5, 0, 0).is_err());
        assert!("hexagonal".parse::<GraphFamily>().is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for name in [
            "path",
            "cycle",
            "star",
            "random-bounded-degree",
            "line-graph-of-random",
            "line-graph-of-random:3",
            "unit-interval",
        ] {
            assert_eq!(name.parse::<GraphFamily>().unwrap().to_string(), name);
        }
    }

    #[test]
    fn random_generation_is_deterministic_and_capped() {
        let a = generate_graph(GraphFamily::RandomBoundedDegree, 100, 8, 7).unwrap();
        let b = generate_graph(GraphFamily::RandomBoundedDegree, 100, 8, 7).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        assert!(a.max_degree() <= 8);
        assert!(a.check_invariants());
        let c = generate_graph(GraphFamily::RandomBoundedDegree, 100, 8, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn structured_families_respect_cap() {
        for family in [
            GraphFamily::LineGraphOfRandom { rank: 2 },
            GraphFamily::LineGraphOfRandom { rank: 3 },
            GraphFamily::LineGraphOfRandom { rank: 4 },
            GraphFamily::UnitInterval,
        ] {
            for cap in [4, 8, 12] {
                let g = generate_graph(family, 200, cap, 3).unwrap();
                assert_eq!(g.vertex_count(), 200);
                assert!(g.max_degree() <= cap as usize, "{family} cap {cap}");
                assert!(g.check_invariants());
            }
        }
    }
}
