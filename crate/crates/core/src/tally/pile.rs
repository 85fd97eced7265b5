//! Ballot piles shared by the IRV and STV engines.

use crate::ballots::CandidateId;
use crate::numeric;
use num::BigRational;

/// A block of identical ballots sitting on one candidate's pile.
pub(super) struct Pile<'a> {
    pub ranking: &'a [CandidateId],
    /// Index into `ranking` of the candidate currently holding the block.
    pub pos: usize,
    pub weight: BigRational,
    pub count: u64,
}

impl Pile<'_> {
    pub fn amount(&self) -> BigRational {
        &self.weight * numeric::rational(self.count)
    }

    /// Advances to the next hopeful preference, if any.
    pub fn advance(&mut self, hopeful: &[bool]) -> Option<usize> {
        for p in self.pos + 1..self.ranking.len() {
            let candidate = self.ranking[p].0;
            if hopeful[candidate] {
                self.pos = p;
                return Some(candidate);
            }
        }
        None
    }
}
