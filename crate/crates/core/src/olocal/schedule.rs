use crate::math::next_pow2;
use crate::sim::{Round, WakeSchedule};
use crate::{Error, Result};

/// Wake rounds of one vertex in the interval tree over the palette.
///
/// The leaves `1..=D` of a perfect binary tree (`D` the next power of two
/// `>= d`) are numbered together with the inner nodes by in-order traversal,
/// so leaf `l` gets round `2l - 1` and the root gets round `D`. A vertex with
/// label `l` wakes at its leaf and at every ancestor of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSchedule {
    pub schedule: WakeSchedule,
    pub decision_round: Round,
    /// Number of leaves of the tree.
    pub leaves: u32,
}

/// In-order index of the parent of in-order node `x`.
fn tree_parent(x: u64) -> u64 {
    let h = x.trailing_zeros();
    if (x >> (h + 1)) & 1 == 1 {
        x - (1 << h)
    } else {
        x + (1 << h)
    }
}

pub fn tree_leaves(d: u32) -> u32 {
    next_pow2(u64::from(d)) as u32
}

pub fn build_interval_schedule(label: u32, d: u32) -> Result<IntervalSchedule> {
    if label == 0 || label > d {
        return Err(Error::LabelOutOfRange { label, d });
    }
    let leaves = tree_leaves(d);
    let root = u64::from(leaves);
    let leaf = 2 * u64::from(label) - 1;
    let mut rounds = vec![leaf];
    let mut x = leaf;
    while x != root {
        x = tree_parent(x);
        rounds.push(x);
    }
    Ok(IntervalSchedule {
        schedule: rounds.into_iter().map(|r| r as Round).collect(),
        decision_round: leaf as Round,
        leaves,
    })
}

/// In-order index of the lowest common ancestor of leaves `a` and `b`.
pub fn leaf_lca(a: u32, b: u32) -> u64 {
    let (mut x, mut y) = (2 * u64::from(a) - 1, 2 * u64::from(b) - 1);
    while x != y {
        if x.trailing_zeros() <= y.trailing_zeros() {
            x = tree_parent(x);
        } else {
            y = tree_parent(y);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rounds(label: u32, d: u32) -> Vec<Round> {
        build_interval_schedule(label, d)
            .unwrap()
            .schedule
            .rounds()
            .collect()
    }

    #[test]
    fn small_trees() {
        assert_eq!(rounds(1, 1), vec![1]);
        assert_eq!(rounds(1, 2), vec![1, 2]);
        assert_eq!(rounds(2, 2), vec![2, 3]);
        assert_eq!(rounds(3, 4), vec![4, 5, 6]);
        assert_eq!(build_interval_schedule(3, 4).unwrap().decision_round, 5);
        assert_eq!(rounds(1, 5), vec![1, 2, 4, 8]);
        assert_eq!(rounds(8, 8), vec![8, 12, 14, 15]);
        assert!(build_interval_schedule(0, 3).is_err());
        assert!(build_interval_schedule(4, 3).is_err());
    }

    #[test]
    fn schedule_sizes() {
        for d in 1..=300u32 {
            let leaves = tree_leaves(d);
            for label in 1..=d {
                let s = build_interval_schedule(label, d).unwrap();
                assert_eq!(s.schedule.len() as u32, leaves.trailing_zeros() + 1);
                assert!(s.schedule.contains(2 * label - 1));
                assert!(s.schedule.last().unwrap() <= 2 * leaves - 1);
            }
        }
    }

    #[test]
    fn lca_lies_strictly_between_leaves() {
        for b in 1..=256u32 {
            let sb = build_interval_schedule(b, 256).unwrap().schedule;
            for a in 1..b {
                let lca = leaf_lca(a, b);
                assert!(
                    2 * u64::from(a) - 1 < lca && lca < 2 * u64::from(b) - 1,
                    "a={a} b={b}"
                );
                let sa = build_interval_schedule(a, 256).unwrap().schedule;
                assert!(sa.contains(lca as Round) && sb.contains(lca as Round));
            }
        }
    }
}
