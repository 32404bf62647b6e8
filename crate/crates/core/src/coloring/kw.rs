//! Block merging color reductions. Colors are split into blocks of width
//! `delta + 1`; every phase merges consecutive blocks and recolors each merged
//! group greedily with the interval schedule.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::graph::{validate_coloring, Color, Coloring, Graph, GraphError, VertexId};
use crate::olocal::{algorithm_a_on_subgraph, GreedyColoring};
use crate::sim::Pipeline;
use crate::{Error, Result};

/// A coloring read as `(block, offset)` pairs with
/// `color = (block - 1) * width + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedColoring {
    pub coloring: Coloring,
    pub width: u32,
}

impl BlockedColoring {
    pub fn new(coloring: Coloring, width: u32) -> Result<Self> {
        if width == 0 {
            return Err(Error::Invalid("block width must be positive".into()));
        }
        Ok(BlockedColoring { coloring, width })
    }

    pub fn blocks(&self) -> u32 {
        self.coloring.palette().div_ceil(self.width).max(1)
    }

    pub fn split(&self, color: Color) -> (u32, u32) {
        ((color - 1) / self.width + 1, (color - 1) % self.width + 1)
    }

    pub fn join(&self, block: u32, offset: u32) -> Color {
        (block - 1) * self.width + offset
    }
}

/// A rational exponent in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Epsilon {
    pub num: u32,
    pub den: u32,
}

impl Epsilon {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::Invalid(format!(
                "epsilon {num}/{den} outside (0, 1]"
            )));
        }
        Ok(Epsilon { num, den })
    }

    pub fn as_f64(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// `max(2, ceil(delta^eps))`, computed exactly.
    pub fn group_size(&self, delta: u64) -> u64 {
        let target = (delta as u128).checked_pow(self.num).unwrap_or(u128::MAX);
        let mut lo = 1u64;
        let mut hi = delta.max(2);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let reaches = (mid as u128)
                .checked_pow(self.den)
                .is_none_or(|x| x >= target);
            if reaches {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo.max(2)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Invalid(format!("cannot parse epsilon `{s}`"));
        if let Some((a, b)) = s.split_once('/') {
            return Epsilon::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 6 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u32.pow(frac.len() as u32);
        let num = int.parse::<u32>().map_err(|_| bad())? * den
            + if frac.is_empty() {
                0
            } else {
                frac.parse::<u32>().map_err(|_| bad())?
            };
        let g = gcd(num, den);
        Epsilon::new(num / g.max(1), den / g.max(1))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KwOutcome {
    pub coloring: Coloring,
    /// Blocks at the start.
    pub blocks: u32,
    pub group_size: u32,
    pub phases: u32,
    /// Coloring after each phase, for checking properness at boundaries.
    pub after_phase: Vec<Coloring>,
}

/// Merges groups of `group` consecutive blocks until one block is left.
pub fn kw_merge(
    pipeline: &mut Pipeline,
    prefix: &str,
    g: &Graph,
    input: &BlockedColoring,
    group: u32,
) -> Result<KwOutcome> {
    if group < 2 {
        return Err(Error::Invalid(
            "groups must merge at least two blocks".into(),
        ));
    }
    let report = validate_coloring(g, &input.coloring, true);
    if !report.proper {
        return Err(GraphError::ImproperColoring(report.violations.len()).into());
    }
    let width = input.width;
    let mut current = input.clone();
    let blocks = current.blocks();
    let mut after_phase = Vec::new();
    while current.blocks() > 1 {
        let r = current.blocks();
        let group_of = |v: VertexId| (current.split(current.coloring.get(v)).0 - 1) / group + 1;
        let group_len = |grp: u32| (r - (grp - 1) * group).min(group);
        let merge_graph = g.filter_edges(|u, v| group_of(u) == group_of(v));
        let mut members = BTreeSet::new();
        let mut labels = Coloring::new(group * width);
        for v in g.vertices() {
            let (block, offset) = current.split(current.coloring.get(v));
            if group_len(group_of(v)) > 1 {
                members.insert(v);
                labels.set(v, ((block - 1) % group) * width + offset);
            }
        }
        let name = format!("{prefix}-{}", after_phase.len() + 1);
        let decisions = algorithm_a_on_subgraph(
            pipeline,
            &name,
            &merge_graph,
            &members,
            &labels,
            &Default::default(),
            &GreedyColoring,
        )?;
        let mut next = Coloring::new(r.div_ceil(group) * width);
        for v in g.vertices() {
            let grp = group_of(v);
            let offset = match decisions.get(&v) {
                Some(&d) => d,
                None => current.split(current.coloring.get(v)).1,
            };
            if offset > width {
                return Err(Error::Invalid(format!(
                    "vertex {v} got offset {offset} above width {width}"
                )));
            }
            next.set(v, (grp - 1) * width + offset);
        }
        after_phase.push(next.clone());
        current = BlockedColoring {
            coloring: next,
            width,
        };
    }
    Ok(KwOutcome {
        coloring: current.coloring,
        blocks,
        group_size: group,
        phases: after_phase.len() as u32,
        after_phase,
    })
}

/// Pairwise merging: `ceil(log2 r)` phases.
pub fn sleeping_kw_reduce_in(
    pipeline: &mut Pipeline,
    g: &Graph,
    input: &BlockedColoring,
) -> Result<KwOutcome> {
    kw_merge(pipeline, "kw", g, input, 2)
}

/// Wraps an arbitrary proper coloring into blocks of width `delta + 1` and
/// merges pairwise.
pub fn sleeping_kw_iterative_in(
    pipeline: &mut Pipeline,
    g: &Graph,
    c: &Coloring,
    delta: u64,
) -> Result<KwOutcome> {
    let blocked = BlockedColoring::new(c.clone(), delta as u32 + 1)?;
    sleeping_kw_reduce_in(pipeline, g, &blocked)
}

/// Merges `max(2, ceil(delta^eps))` blocks at a time.
pub fn batched_kw_reduce_in(
    pipeline: &mut Pipeline,
    g: &Graph,
    input: &BlockedColoring,
    eps: Epsilon,
    delta: u64,
) -> Result<KwOutcome> {
    let group = eps.group_size(delta).min(u64::from(u32::MAX)) as u32;
    kw_merge(pipeline, "batched", g, input, group)
}
