//! Social-choice comparison metrics: pairwise matrices under the
//! weak-order model, Condorcet committees, representation degrees,
//! winner-set differences, and party-diversity counts.
//!
//! Partial ballots follow the weak-order model: every unranked candidate
//! is tied for last, so a ranked candidate beats an unranked one on that
//! ballot and two unranked candidates contribute to neither side.

use crate::ballots::{CandidateId, PreferenceProfile};
use crate::numeric;
use num::BigRational;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Enumerating committees is exponential in the candidate count; real
/// ward elections stay far below this.
pub const MAX_COMMITTEE_CANDIDATES: usize = 20;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("committee search supports at most {MAX_COMMITTEE_CANDIDATES} candidates, got {0}")]
    TooManyCandidates(usize),
    #[error("committee size {size} must satisfy 1 <= size < {candidates}")]
    InvalidCommitteeSize { size: usize, candidates: usize },
    #[error("winner set has {got} members, expected {expected}")]
    WinnerSetSize { got: usize, expected: usize },
    #[error("winner sets differ in size: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("no party recorded for candidate {0}")]
    MissingParty(usize),
}

/// Head-to-head preference counts. `wins(a, b)` is the number of voters
/// strictly preferring `a` to `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwiseMatrix {
    n: usize,
    wins: Vec<u64>,
}

impl PairwiseMatrix {
    pub fn num_candidates(&self) -> usize {
        self.n
    }

    pub fn wins(&self, a: CandidateId, b: CandidateId) -> u64 {
        self.wins[a.0 * self.n + b.0]
    }

    /// Strict majority preference: more voters rank `a` over `b` than the
    /// reverse. A head-to-head tie beats neither way.
    pub fn beats(&self, a: CandidateId, b: CandidateId) -> bool {
        self.wins(a, b) > self.wins(b, a)
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.wins[a * self.n + b]).collect())
            .collect()
    }
}

/// Counts every head-to-head matchup across the profile. Withdrawn
/// candidates keep their rows but never score.
pub fn pairwise_matrix(profile: &PreferenceProfile) -> PairwiseMatrix {
    let n = profile.num_candidates();
    let active = profile.active_candidates();
    let mut wins = vec![0u64; n * n];
    for (ballot, count) in profile.entries() {
        let ranking = ballot.ranking();
        let ranked: BTreeSet<CandidateId> = ranking.iter().copied().collect();
        for (pos, &a) in ranking.iter().enumerate() {
            // Ranked ahead of every later-ranked candidate...
            for &b in &ranking[pos + 1..] {
                wins[a.0 * n + b.0] += count;
            }
            // ...and ahead of every candidate left off the ballot.
            for &b in &active {
                if b != a && !ranked.contains(&b) {
                    wins[a.0 * n + b.0] += count;
                }
            }
        }
    }
    PairwiseMatrix { n, wins }
}

/// The unique size-`size` committee whose members each beat every
/// non-member head-to-head, if one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitteeResult {
    pub committee: Option<BTreeSet<CandidateId>>,
}

/// Exhaustive search over all size-`size` subsets of the active
/// candidates. At most one committee can exist: two distinct committees
/// of one size would need some pair to beat each other both ways.
pub fn condorcet_committee(
    profile: &PreferenceProfile,
    size: usize,
) -> Result<CommitteeResult, MetricsError> {
    let active = profile.active_candidates();
    if active.len() > MAX_COMMITTEE_CANDIDATES {
        return Err(MetricsError::TooManyCandidates(active.len()));
    }
    if size < 1 || size >= active.len() {
        return Err(MetricsError::InvalidCommitteeSize {
            size,
            candidates: active.len(),
        });
    }
    let matrix = pairwise_matrix(profile);
    let committee = committees_from_matrix(&matrix, &active, size)
        .into_iter()
        .next();
    Ok(CommitteeResult { committee })
}

/// All committees the matrix admits (at most one; exposed for the
/// uniqueness property tests).
pub fn committees_from_matrix(
    matrix: &PairwiseMatrix,
    candidates: &[CandidateId],
    size: usize,
) -> Vec<BTreeSet<CandidateId>> {
    let mut found = Vec::new();
    let mut subset: Vec<usize> = (0..size).collect();
    loop {
        let members: BTreeSet<CandidateId> = subset.iter().map(|&i| candidates[i]).collect();
        let ok = members.iter().all(|&a| {
            candidates
                .iter()
                .filter(|b| !members.contains(b))
                .all(|&b| matrix.beats(a, b))
        });
        if ok {
            found.push(members);
        }
        // Advance to the next k-subset in lexicographic order.
        let mut i = size;
        loop {
            if i == 0 {
                return found;
            }
            i -= 1;
            if subset[i] != i + candidates.len() - size {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..size {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

fn check_winner_set(w: &BTreeSet<CandidateId>, size: usize) -> Result<(), MetricsError> {
    if w.len() != size {
        return Err(MetricsError::WinnerSetSize {
            got: w.len(),
            expected: size,
        });
    }
    Ok(())
}

/// Voters none of whose top `min(size, ranked)` choices won a seat.
pub fn misrepresented_count(
    profile: &PreferenceProfile,
    size: usize,
    winners: &BTreeSet<CandidateId>,
) -> Result<u64, MetricsError> {
    check_winner_set(winners, size)?;
    let mut voters = 0u64;
    for (ballot, count) in profile.entries() {
        let top = &ballot.ranking()[..size.min(ballot.ranking().len())];
        if top.iter().all(|c| !winners.contains(c)) {
            voters += count;
        }
    }
    Ok(voters)
}

/// Percentage of voters with no top-`size` choice in the winner set. A
/// ballot ranking fewer than `size` candidates counts as misrepresented
/// iff none of its ranked candidates won.
pub fn degree_of_misrepresentation(
    profile: &PreferenceProfile,
    size: usize,
    winners: &BTreeSet<CandidateId>,
) -> Result<BigRational, MetricsError> {
    let count = misrepresented_count(profile, size, winners)?;
    Ok(numeric::percentage(count, profile.total_voters()))
}

/// Voters whose entire top `min(size, ranked)` block won seats. Ballots
/// ranking fewer than `size` candidates count when every ranked
/// candidate won.
pub fn maximally_represented_count(
    profile: &PreferenceProfile,
    size: usize,
    winners: &BTreeSet<CandidateId>,
) -> Result<u64, MetricsError> {
    check_winner_set(winners, size)?;
    let mut voters = 0u64;
    for (ballot, count) in profile.entries() {
        let top = &ballot.ranking()[..size.min(ballot.ranking().len())];
        if top.iter().all(|c| winners.contains(c)) {
            voters += count;
        }
    }
    Ok(voters)
}

/// Percentage of voters who got everything they asked for.
pub fn degree_of_maximal_representation(
    profile: &PreferenceProfile,
    size: usize,
    winners: &BTreeSet<CandidateId>,
) -> Result<BigRational, MetricsError> {
    let count = maximally_represented_count(profile, size, winners)?;
    Ok(numeric::percentage(count, profile.total_voters()))
}

/// `|w1 \ w2|`, half the symmetric difference. Errors on size mismatch.
pub fn winner_set_diff(
    w1: &BTreeSet<CandidateId>,
    w2: &BTreeSet<CandidateId>,
) -> Result<usize, MetricsError> {
    if w1.len() != w2.len() {
        return Err(MetricsError::SizeMismatch(w1.len(), w2.len()));
    }
    Ok(w1.difference(w2).count())
}

fn is_independent(party: &str) -> bool {
    party.eq_ignore_ascii_case("ind") || party.eq_ignore_ascii_case("independent")
}

/// Number of distinct parties among the winners. Independents each count
/// as their own party unless `merge_independents` is set.
pub fn party_count(
    winners: &BTreeSet<CandidateId>,
    parties: &BTreeMap<CandidateId, String>,
    merge_independents: bool,
) -> Result<usize, MetricsError> {
    let mut distinct: BTreeSet<&str> = BTreeSet::new();
    let mut independents = 0usize;
    for c in winners {
        let party = parties
            .get(c)
            .ok_or(MetricsError::MissingParty(c.0))?
            .as_str();
        if is_independent(party) && !merge_independents {
            independents += 1;
        } else {
            distinct.insert(party);
        }
    }
    Ok(distinct.len() + independents)
}
