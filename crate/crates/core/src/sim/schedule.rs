use std::collections::BTreeSet;

use serde::Serialize;

pub type Round = u32;

/// Phase-relative rounds (numbered from 1) in which a node is awake.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct WakeSchedule(BTreeSet<Round>);

impl WakeSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Round 0 does not exist; it is silently skipped.
    pub fn from_rounds(rounds: impl IntoIterator<Item = Round>) -> Self {
        WakeSchedule(rounds.into_iter().filter(|&r| r > 0).collect())
    }

    pub fn insert(&mut self, round: Round) {
        if round > 0 {
            self.0.insert(round);
        }
    }

    pub fn contains(&self, round: Round) -> bool {
        self.0.contains(&round)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Round> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Round> {
        self.0.last().copied()
    }

    pub fn rounds(&self) -> impl DoubleEndedIterator<Item = Round> + '_ {
        self.0.iter().copied()
    }

    /// The first scheduled round strictly after `round`.
    pub fn next_after(&self, round: Round) -> Option<Round> {
        self.0.range(round + 1..).next().copied()
    }
}

impl FromIterator<Round> for WakeSchedule {
    fn from_iter<I: IntoIterator<Item = Round>>(iter: I) -> Self {
        WakeSchedule::from_rounds(iter)
    }
}
