//! Isomorphism-free enumeration of small graphs (up to 8 vertices) for the
//! exhaustive oracle suites.
//!
//! Graphs are grown one vertex at a time; each candidate is reduced to a
//! canonical code (the smallest adjacency bit string over all vertex orders
//! compatible with a colour-refinement partition) and deduplicated.

use std::collections::BTreeSet;

use super::{Graph, VertexId};

pub const MAX_ENUMERATED_VERTICES: usize = 8;

type Adjacency = Vec<u8>;

/// All graphs on exactly `n` vertices up to isomorphism, each with ids
/// `1..=n` in canonical order.
pub fn nonisomorphic_graphs(n: usize, connected_only: bool) -> Vec<Graph> {
    assert!(n <= MAX_ENUMERATED_VERTICES, "enumeration supports n <= 8");
    let mut level: BTreeSet<u32> = BTreeSet::from([0]);
    for k in 1..n {
        let mut next = BTreeSet::new();
        for &code in &level {
            let adj = decode(code, k);
            for mask in 0u16..(1 << k) {
                let mut grown: Adjacency = adj.clone();
                grown.push(mask as u8);
                for (u, row) in grown.iter_mut().enumerate().take(k) {
                    if mask & (1 << u) != 0 {
                        *row |= 1 << k;
                    }
                }
                next.insert(canonical_code(&grown));
            }
        }
        level = next;
    }
    if n == 0 {
        return vec![Graph::new()];
    }
    level
        .into_iter()
        .map(|code| to_graph(&decode(code, n)))
        .filter(|g| !connected_only || g.is_connected())
        .collect()
}

/// All connected graphs with `1..=max_n` vertices up to isomorphism.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<Graph> {
    (1..=max_n)
        .flat_map(|n| nonisomorphic_graphs(n, true))
        .collect()
}

fn to_graph(adj: &Adjacency) -> Graph {
    let mut g = Graph::with_vertices(adj.len() as u32);
    for (u, &row) in adj.iter().enumerate() {
        for v in u + 1..adj.len() {
            if row & (1 << v) != 0 {
                g.add_edge(u as VertexId + 1, v as VertexId + 1)
                    .expect("simple");
            }
        }
    }
    g
}

/// Pairs ordered (0,1), (0,2), (1,2), (0,3), ...; first pair is the most
/// significant bit.
fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn decode(code: u32, n: usize) -> Adjacency {
    let total = pair_count(n);
    let mut adj = vec![0u8; n];
    let mut bit = 0;
    for j in 1..n {
        for i in 0..j {
            if code >> (total - 1 - bit) & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
            bit += 1;
        }
    }
    adj
}

fn refine(adj: &Adjacency) -> Vec<u32> {
    let n = adj.len();
    let mut colors: Vec<u32> = adj.iter().map(|r| r.count_ones()).collect();
    loop {
        let signatures: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut around: Vec<u32> = (0..n)
                    .filter(|&u| adj[v] & (1 << u) != 0)
                    .map(|u| colors[u])
                    .collect();
                around.sort_unstable();
                (colors[v], around)
            })
            .collect();
        let distinct: BTreeSet<&(u32, Vec<u32>)> = signatures.iter().collect();
        let ranked: Vec<&(u32, Vec<u32>)> = distinct.into_iter().collect();
        let next: Vec<u32> = signatures
            .iter()
            .map(|s| ranked.binary_search(&s).expect("present") as u32)
            .collect();
        let before = colors.iter().collect::<BTreeSet<_>>().len();
        let after = next.iter().collect::<BTreeSet<_>>().len();
        colors = next;
        if after == before {
            return colors;
        }
    }
}

fn canonical_code(adj: &Adjacency) -> u32 {
    let n = adj.len();
    let colors = refine(adj);
    let mut slots: Vec<u32> = colors.clone();
    slots.sort_unstable();
    let mut search = Search {
        adj,
        colors: &colors,
        slots: &slots,
        order: Vec::with_capacity(n),
        used: 0,
        best: u32::MAX,
        total: pair_count(n),
    };
    search.extend(0);
    if n <= 1 {
        0
    } else {
        search.best
    }
}

struct Search<'a> {
    adj: &'a Adjacency,
    colors: &'a [u32],
    slots: &'a [u32],
    order: Vec<usize>,
    used: u8,
    best: u32,
    total: usize,
}

impl Search<'_> {
    fn extend(&mut self, prefix: u32) {
        let j = self.order.len();
        if j == self.adj.len() {
            self.best = self.best.min(prefix);
            return;
        }
        for v in 0..self.adj.len() {
            if self.used & (1 << v) != 0 || self.colors[v] != self.slots[j] {
                continue;
            }
            let mut code = prefix;
            for &u in &self.order {
                code = code << 1 | u32::from(self.adj[u] & (1 << v) != 0);
            }
            let placed = pair_count(j + 1);
            if self.best != u32::MAX && code > self.best >> (self.total - placed) {
                continue;
            }
            self.order.push(v);
            self.used |= 1 << v;
            self.extend(code);
            self.order.pop();
            self.used &= !(1 << v);
        }
    }
}
