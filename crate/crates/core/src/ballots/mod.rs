//! Ballot data model: preference profiles, candidate removal,
//! first-preference counts, and BLT file ingestion.
//!
//! All types are immutable after construction and cheap to share across
//! threads; the operations here are pure functions.

mod blt;

pub use blt::{parse_blt, serialize_blt, BltError};

use crate::numeric;
use num::{BigRational, One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Zero-based candidate index, stable for the lifetime of an election.
///
/// Candidate removal never renumbers: removed ids are marked withdrawn in
/// the resulting profile and the survivors keep their indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(pub usize);

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("ballot ranks no candidates")]
    EmptyRanking,
    #[error("candidate {0} appears more than once on a ballot")]
    DuplicateCandidate(usize),
    #[error("candidate index {index} out of range for {num_candidates} candidates")]
    CandidateOutOfRange { index: usize, num_candidates: usize },
    #[error("ballot weight must be non-negative")]
    NegativeWeight,
    #[error("ballot entry has a zero count")]
    ZeroCount,
    #[error("profile contains no ballots")]
    EmptyProfile,
    #[error("{names} candidate names given for {num_candidates} candidates")]
    NameCountMismatch { names: usize, num_candidates: usize },
    #[error("removal would leave no candidates")]
    AllCandidatesRemoved,
    #[error("removal would drop every ballot")]
    AllBallotsDropped,
    #[error("seat count {seats} must satisfy 1 <= seats < {candidates}")]
    InvalidSeatCount { seats: usize, candidates: usize },
}

/// One ranking with a transfer weight.
///
/// Parsed ballots always carry weight 1; fractional weights only arise
/// inside STV surplus transfers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ballot {
    ranking: Vec<CandidateId>,
    weight: BigRational,
}

impl Ballot {
    /// A unit-weight ballot. The ranking must be non-empty and free of
    /// duplicates.
    pub fn new(ranking: Vec<CandidateId>) -> Result<Self, ProfileError> {
        Self::with_weight(ranking, BigRational::one())
    }

    pub fn with_weight(
        ranking: Vec<CandidateId>,
        weight: BigRational,
    ) -> Result<Self, ProfileError> {
        if ranking.is_empty() {
            return Err(ProfileError::EmptyRanking);
        }
        let mut seen = BTreeSet::new();
        for c in &ranking {
            if !seen.insert(*c) {
                return Err(ProfileError::DuplicateCandidate(c.0));
            }
        }
        if weight < BigRational::zero() {
            return Err(ProfileError::NegativeWeight);
        }
        Ok(Ballot { ranking, weight })
    }

    pub fn ranking(&self) -> &[CandidateId] {
        &self.ranking
    }

    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn has_unit_weight(&self) -> bool {
        self.weight.is_one()
    }
}

/// Aggregated preference ballots: a multiset of rankings with counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceProfile {
    num_candidates: usize,
    candidate_names: Vec<String>,
    parties: Vec<Option<String>>,
    withdrawn: BTreeSet<CandidateId>,
    entries: Vec<(Ballot, u64)>,
}

impl PreferenceProfile {
    /// Builds a profile over `num_candidates` candidates. Every ranking is
    /// range-checked; the total voter count must be at least one.
    pub fn new(
        num_candidates: usize,
        candidate_names: Vec<String>,
        entries: Vec<(Ballot, u64)>,
    ) -> Result<Self, ProfileError> {
        if candidate_names.len() != num_candidates {
            return Err(ProfileError::NameCountMismatch {
                names: candidate_names.len(),
                num_candidates,
            });
        }
        for (ballot, count) in &entries {
            if *count == 0 {
                return Err(ProfileError::ZeroCount);
            }
            for c in ballot.ranking() {
                if c.0 >= num_candidates {
                    return Err(ProfileError::CandidateOutOfRange {
                        index: c.0,
                        num_candidates,
                    });
                }
            }
        }
        if entries.is_empty() {
            return Err(ProfileError::EmptyProfile);
        }
        Ok(PreferenceProfile {
            num_candidates,
            candidate_names,
            parties: vec![None; num_candidates],
            withdrawn: BTreeSet::new(),
            entries,
        })
    }

    /// Convenience constructor from `(count, ranking)` pairs with generated
    /// candidate names `C1..Cn`.
    pub fn from_rankings(
        num_candidates: usize,
        rankings: &[(u64, Vec<usize>)],
    ) -> Result<Self, ProfileError> {
        let names = (1..=num_candidates).map(|i| format!("C{i}")).collect();
        let entries = rankings
            .iter()
            .map(|(count, ranking)| {
                let ids = ranking.iter().map(|&i| CandidateId(i)).collect();
                Ballot::new(ids).map(|b| (b, *count))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(num_candidates, names, entries)
    }

    pub fn with_parties(mut self, parties: Vec<Option<String>>) -> Result<Self, ProfileError> {
        if parties.len() != self.num_candidates {
            return Err(ProfileError::NameCountMismatch {
                names: parties.len(),
                num_candidates: self.num_candidates,
            });
        }
        self.parties = parties;
        Ok(self)
    }

    /// Total number of candidates, including withdrawn ones.
    pub fn num_candidates(&self) -> usize {
        self.num_candidates
    }

    pub fn candidate_name(&self, id: CandidateId) -> &str {
        &self.candidate_names[id.0]
    }

    pub fn candidate_names(&self) -> &[String] {
        &self.candidate_names
    }

    pub fn party(&self, id: CandidateId) -> Option<&str> {
        self.parties[id.0].as_deref()
    }

    pub fn parties(&self) -> &[Option<String>] {
        &self.parties
    }

    pub fn withdrawn(&self) -> &BTreeSet<CandidateId> {
        &self.withdrawn
    }

    /// Candidates still standing (not withdrawn), in index order.
    pub fn active_candidates(&self) -> Vec<CandidateId> {
        (0..self.num_candidates)
            .map(CandidateId)
            .filter(|c| !self.withdrawn.contains(c))
            .collect()
    }

    pub fn num_active(&self) -> usize {
        self.num_candidates - self.withdrawn.len()
    }

    pub fn entries(&self) -> &[(Ballot, u64)] {
        &self.entries
    }

    /// Total voter count `V`.
    pub fn total_voters(&self) -> u64 {
        self.entries.iter().map(|(_, count)| count).sum()
    }

    /// Total ballot weight (`V` for unit-weight profiles).
    pub fn total_weight(&self) -> BigRational {
        self.entries
            .iter()
            .map(|(ballot, count)| ballot.weight() * numeric::rational(*count))
            .sum()
    }

    pub fn has_unit_weights(&self) -> bool {
        self.entries.iter().all(|(b, _)| b.has_unit_weight())
    }

    /// Canonical form: entries sorted by ranking with equal entries merged.
    /// Merging never changes any tabulation result.
    pub fn merged(&self) -> Self {
        let mut buckets: BTreeMap<(Vec<CandidateId>, BigRational), u64> = BTreeMap::new();
        for (ballot, count) in &self.entries {
            *buckets
                .entry((ballot.ranking.clone(), ballot.weight.clone()))
                .or_insert(0) += count;
        }
        let entries = buckets
            .into_iter()
            .map(|((ranking, weight), count)| (Ballot { ranking, weight }, count))
            .collect();
        PreferenceProfile {
            num_candidates: self.num_candidates,
            candidate_names: self.candidate_names.clone(),
            parties: self.parties.clone(),
            withdrawn: self.withdrawn.clone(),
            entries,
        }
    }

    /// Same profile with every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        assert!(factor > 0, "scale factor must be positive");
        let mut scaled = self.clone();
        for (_, count) in &mut scaled.entries {
            *count *= factor;
        }
        scaled
    }
}

/// A preference profile together with the number of seats to fill.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    profile: PreferenceProfile,
    seats: usize,
    title: String,
}

impl Election {
    /// Requires `1 <= seats < n` over the profile's active candidates.
    pub fn new(profile: PreferenceProfile, seats: usize) -> Result<Self, ProfileError> {
        if seats < 1 || seats >= profile.num_active() {
            return Err(ProfileError::InvalidSeatCount {
                seats,
                candidates: profile.num_active(),
            });
        }
        Ok(Election {
            profile,
            seats,
            title: String::from("Election"),
        })
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = title.into();
        self
    }

    pub fn profile(&self) -> &PreferenceProfile {
        &self.profile
    }

    pub fn seats(&self) -> usize {
        self.seats
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    /// Same election with a different seat count (used by batch analysis
    /// when overriding the declared seats).
    pub fn with_seats(&self, seats: usize) -> Result<Self, ProfileError> {
        Election::new(self.profile.clone(), seats).map(|e| e.with_title(self.title.clone()))
    }
}

/// Result of removing candidates from a profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemovalOutcome {
    pub profile: PreferenceProfile,
    /// Voters whose ballots ranked only removed candidates and were dropped.
    pub dropped_ballots: u64,
}

/// Deletes `removed` from every ranking, preserving the relative order of
/// the survivors. Ballots left with an empty ranking are dropped and their
/// count reported. Removed ids are marked withdrawn in the result.
pub fn remove_candidates(
    profile: &PreferenceProfile,
    removed: &BTreeSet<CandidateId>,
) -> Result<RemovalOutcome, ProfileError> {
    for c in removed {
        if c.0 >= profile.num_candidates {
            return Err(ProfileError::CandidateOutOfRange {
                index: c.0,
                num_candidates: profile.num_candidates,
            });
        }
    }
    let withdrawn: BTreeSet<CandidateId> = profile.withdrawn.union(removed).copied().collect();
    if withdrawn.len() == profile.num_candidates {
        return Err(ProfileError::AllCandidatesRemoved);
    }
    let mut entries = Vec::with_capacity(profile.entries.len());
    let mut dropped_ballots = 0u64;
    for (ballot, count) in &profile.entries {
        let ranking: Vec<CandidateId> = ballot
            .ranking
            .iter()
            .filter(|c| !removed.contains(c))
            .copied()
            .collect();
        if ranking.is_empty() {
            dropped_ballots += count;
        } else {
            entries.push((
                Ballot {
                    ranking,
                    weight: ballot.weight.clone(),
                },
                *count,
            ));
        }
    }
    if entries.is_empty() {
        return Err(ProfileError::AllBallotsDropped);
    }
    Ok(RemovalOutcome {
        profile: PreferenceProfile {
            num_candidates: profile.num_candidates,
            candidate_names: profile.candidate_names.clone(),
            parties: profile.parties.clone(),
            withdrawn,
            entries,
        },
        dropped_ballots,
    })
}

/// First-preference weight per continuing candidate, plus the weight of
/// ballots that rank no continuing candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstPlaceTotals {
    pub totals: BTreeMap<CandidateId, BigRational>,
    pub exhausted: BigRational,
}

/// Credits each ballot's `weight * count` to its highest-ranked continuing
/// candidate. Every continuing candidate gets an entry, zero included.
pub fn first_place_totals(
    profile: &PreferenceProfile,
    continuing: &BTreeSet<CandidateId>,
) -> FirstPlaceTotals {
    debug_assert!(!continuing.is_empty());
    let mut totals: BTreeMap<CandidateId, BigRational> = continuing
        .iter()
        .map(|c| (*c, BigRational::zero()))
        .collect();
    let mut exhausted = BigRational::zero();
    for (ballot, count) in &profile.entries {
        let amount = ballot.weight() * numeric::rational(*count);
        match ballot.ranking.iter().find(|c| continuing.contains(c)) {
            Some(first) => *totals.get_mut(first).expect("seeded above") += amount,
            None => exhausted += amount,
        }
    }
    FirstPlaceTotals { totals, exhausted }
}

#[cfg(test)]
pub(crate) mod tests;
