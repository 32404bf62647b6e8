use proptest::prelude::*;

use super::*;
use crate::graph::{generate_graph, GraphFamily};
use crate::sim::awake_complexity;

fn labels(pairs: &[(VertexId, u32)], palette: u32) -> Coloring {
    Coloring::from_map(pairs.iter().copied().collect(), palette)
}

fn run<P: OLocalProblem>(g: &Graph, c: &Coloring, p: &P) -> (Decisions<P::Decision>, Metrics) {
    algorithm_a(g, c, p, &SimConfig::default()).unwrap()
}

/// Repeatedly decides any vertex whose smaller-colored neighbors are all decided.
fn fixpoint_oracle<P: OLocalProblem>(g: &Graph, c: &Coloring, p: &P) -> Decisions<P::Decision> {
    let mut out: Decisions<P::Decision> = BTreeMap::new();
    while out.len() < g.vertex_count() {
        for v in g.vertices() {
            if out.contains_key(&v) {
                continue;
            }
            let parents: Vec<VertexId> = g.neighbors(v).filter(|&u| c.get(u) < c.get(v)).collect();
            if parents.iter().all(|u| out.contains_key(u)) {
                let known = parents.iter().map(|&u| (u, out[&u].clone())).collect();
                out.insert(
                    v,
                    p.decide(
                        &DecideContext {
                            id: v,
                            degree: g.degree(v),
                        },
                        &known,
                    ),
                );
            }
        }
    }
    out
}

#[test]
fn triangle_greedy() {
    let g = Graph::from_edges(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
    let (d, m) = run(&g, &labels(&[(1, 1), (2, 2), (3, 3)], 3), &GreedyColoring);
    assert_eq!(d, [(1, 1), (2, 2), (3, 3)].into());
    assert!(awake_complexity(&m) <= 3);
}

#[test]
fn path_mis_from_center() {
    let g = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
    let (d, _) = run(&g, &labels(&[(1, 2), (2, 1), (3, 2)], 2), &Mis);
    assert_eq!(
        d,
        [(1, MisState::Out), (2, MisState::In), (3, MisState::Out)].into()
    );
}

#[test]
fn single_vertex_decides_in_round_one() {
    let g = Graph::with_vertices(1);
    let (d, m) = run(&g, &labels(&[(1, 1)], 1), &Mis);
    assert_eq!(d[&1], MisState::In);
    assert_eq!(m.clock_rounds, 1);
    assert_eq!(awake_complexity(&m), 1);
}

#[test]
fn rejects_bad_labels() {
    let g = Graph::from_edges(2, &[(1, 2)]).unwrap();
    assert!(algorithm_a(
        &g,
        &labels(&[(1, 1), (2, 1)], 2),
        &Mis,
        &SimConfig::default()
    )
    .is_err());
    assert!(algorithm_a(&g, &labels(&[(1, 1)], 2), &Mis, &SimConfig::default()).is_err());
}

#[test]
fn subgraph_runs() {
    let g = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
    let mut p = Pipeline::new(SimConfig::default());
    let empty = algorithm_a_on_subgraph(
        &mut p,
        "s",
        &g,
        &BTreeSet::new(),
        &Coloring::new(1),
        &BTreeMap::new(),
        &Mis,
    )
    .unwrap();
    assert!(empty.is_empty());
    assert_eq!(p.metrics.clock_rounds, 0);
    assert_eq!(awake_complexity(&p.metrics), 0);

    let center: BTreeSet<_> = [2].into();
    let fixed: FixedParents<u32> = [(2, [(1, 1), (3, 2)].into())].into();
    let d = algorithm_a_on_subgraph(
        &mut p,
        "s",
        &g,
        &center,
        &labels(&[(2, 1)], 1),
        &fixed,
        &GreedyColoring,
    )
    .unwrap();
    assert_eq!(d, [(2, 3)].into());
    let fixed: FixedParents<MisState> = [(2, [(1, MisState::In), (3, MisState::In)].into())].into();
    let d = algorithm_a_on_subgraph(
        &mut p,
        "s",
        &g,
        &center,
        &labels(&[(2, 1)], 1),
        &fixed,
        &Mis,
    )
    .unwrap();
    assert_eq!(d[&2], MisState::Out);
    // outside vertices never woke
    assert_eq!(p.metrics.awake_of(1), 0);
    assert_eq!(p.metrics.awake_of(3), 0);
}

#[test]
fn awake_and_clock_bounds_on_complete_graphs() {
    for d in [1u32, 2, 3, 4, 9, 17, 33] {
        let edges: Vec<_> = (1..=d)
            .flat_map(|u| (u + 1..=d).map(move |v| (u, v)))
            .collect();
        let g = Graph::from_edges(d, &edges).unwrap();
        let c = Coloring::from_ids(&g);
        let (dec, m) = run(&g, &c, &GreedyColoring);
        let leaves = tree_leaves(d);
        assert_eq!(awake_complexity(&m), u64::from(leaves.trailing_zeros() + 1));
        assert!(m.clock_rounds <= u64::from(2 * leaves - 1));
        assert_eq!(dec, fixpoint_oracle(&g, &c, &GreedyColoring));
    }
}

proptest! {
    #[test]
    fn matches_the_oracle_on_random_graphs(seed in 0u64..10_000, n in 1u32..60, cap in 1u32..7, shift in 0u32..5) {
        let g = generate_graph(GraphFamily::RandomBoundedDegree, n, cap, seed).unwrap();
        // greedy coloring by id, spread out to leave unused labels
        let mut c = Coloring::new(1);
        for v in g.vertices() {
            let used: BTreeSet<u32> = g.neighbors(v).map(|u| c.get(u)).collect();
            let color = (1..).map(|k| k * (shift + 1)).find(|x| !used.contains(x)).unwrap();
            c.set(v, color);
        }
        let (mis, m1) = run(&g, &c, &Mis);
        prop_assert_eq!(&mis, &fixpoint_oracle(&g, &c, &Mis));
        prop_assert!(Mis.validate(&g, &mis).is_ok());
        let (col, m2) = run(&g, &c, &GreedyColoring);
        prop_assert_eq!(&col, &fixpoint_oracle(&g, &c, &GreedyColoring));
        prop_assert!(GreedyColoring.validate(&g, &col).is_ok());
        let bound = u64::from(tree_leaves(c.palette()).trailing_zeros() + 1);
        prop_assert!(awake_complexity(&m1) <= bound && awake_complexity(&m2) <= bound);
        let labels = c.as_map().clone();
        prop_assert_eq!(sequential_solve(&g, &labels, &Mis).unwrap(), mis);
    }
}
