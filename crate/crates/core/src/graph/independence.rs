use super::{Graph, GraphError, VertexId};

pub const DEFAULT_INDEPENDENCE_DEGREE_CAP: usize = 20;

/// Neighborhood independence with the default degree cap of 20.
pub fn neighborhood_independence(g: &Graph) -> Result<usize, GraphError> {
    neighborhood_independence_with_cap(g, DEFAULT_INDEPENDENCE_DEGREE_CAP)
}

/// Largest independent set found inside any open neighborhood, by
/// exhaustive branching. Refuses graphs with a degree above `cap`.
pub fn neighborhood_independence_with_cap(g: &Graph, cap: usize) -> Result<usize, GraphError> {
    let mut best = 0;
    for v in g.vertices() {
        let degree = g.degree(v);
        if degree > cap {
            return Err(GraphError::DegreeAboveCap {
                vertex: v,
                degree,
                cap,
            });
        }
        let nbrs: Vec<VertexId> = g.neighbors(v).collect();
        best = best.max(max_independent_set_size(g, &nbrs));
    }
    Ok(best)
}

/// Size of a maximum independent set of the subgraph induced by `members`
/// (at most 64 of them).
pub fn max_independent_set_size(g: &Graph, members: &[VertexId]) -> usize {
    assert!(
        members.len() <= 64,
        "exhaustive search supports at most 64 vertices"
    );
    let adj: Vec<u64> = members
        .iter()
        .map(|&u| {
            members
                .iter()
                .enumerate()
                .filter(|&(_, &w)| g.contains_edge(u, w))
                .fold(0u64, |mask, (j, _)| mask | (1 << j))
        })
        .collect();
    let all = if members.len() == 64 {
        u64::MAX
    } else {
        (1u64 << members.len()) - 1
    };
    branch(&adj, all)
}

fn branch(adj: &[u64], candidates: u64) -> usize {
    if candidates == 0 {
        return 0;
    }
    // Vertices with no candidate neighbor are always taken.
    let mut forced = 0usize;
    let mut rest = candidates;
    let mut iter = candidates;
    while iter != 0 {
        let i = iter.trailing_zeros() as usize;
        iter &= iter - 1;
        if adj[i] & candidates == 0 {
            forced += 1;
            rest &= !(1 << i);
        }
    }
    if rest == 0 {
        return forced;
    }
    // Branch on the candidate with most neighbors among the rest.
    let pivot = bits(rest)
        .max_by_key(|&i| (adj[i] & rest).count_ones())
        .expect("nonempty");
    let with = 1 + branch(adj, rest & !adj[pivot] & !(1 << pivot));
    let without = branch(adj, rest & !(1 << pivot));
    forced + with.max(without)
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            i
        })
    })
}
