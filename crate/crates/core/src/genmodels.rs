//! Random election generation and the disjoint-winner construction.
//!
//! Two classical voter models are implemented, both over complete
//! rankings:
//!
//! * impartial culture (IC): every voter draws one of the `n!` rankings
//!   uniformly and independently;
//! * impartial anonymous culture (IAC): the anonymous vote distribution
//!   `(v_1, ..., v_{n!})` is uniform over all compositions of `V` into
//!   `n!` non-negative parts, realized with a Pólya urn holding one token
//!   per ranking type (draw, replace, add one of the drawn type; a flat
//!   Dirichlet-multinomial).
//!
//! Sampling is deterministic in the seed. The RNG is ChaCha8 everywhere;
//! concurrent replicas must derive independent streams rather than share
//! a generator (see [`crate::simulation`]).

use crate::ballots::{CandidateId, Election, PreferenceProfile, ProfileError};
use crate::tally::{self, TallyConfig, TiePolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// `13!` overflows the ranking-index arithmetic long before memory runs
/// out; the models are only meaningful for small candidate counts anyway.
pub const MAX_MODEL_CANDIDATES: usize = 12;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("culture models support 2..={MAX_MODEL_CANDIDATES} candidates, got {0}")]
    CandidatesOutOfRange(usize),
    #[error("at least one voter required")]
    NoVoters,
    #[error("model kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },
    #[error("construction needs at least 2 seats, got {0}")]
    SeatsTooSmall(usize),
    #[error("construction with {seats} seats needs at least {minimum} voters, got {given}")]
    VotersTooFew {
        seats: usize,
        given: u64,
        minimum: u64,
    },
    #[error("constructed election failed verification: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CultureKind {
    ImpartialCulture,
    ImpartialAnonymousCulture,
}

impl CultureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CultureKind::ImpartialCulture => "ic",
            CultureKind::ImpartialAnonymousCulture => "iac",
        }
    }
}

/// A fully specified random model: kind, dimensions, and seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CultureModel {
    pub kind: CultureKind,
    pub candidates: usize,
    pub voters: u64,
    pub seed: u64,
}

impl CultureModel {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.candidates < 2 || self.candidates > MAX_MODEL_CANDIDATES {
            return Err(ModelError::CandidatesOutOfRange(self.candidates));
        }
        if self.voters == 0 {
            return Err(ModelError::NoVoters);
        }
        Ok(())
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Ranking with lexicographic index `index` among the `n!` permutations
/// (factorial number system).
pub fn unrank_permutation(mut index: u64, n: usize) -> Vec<CandidateId> {
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut ranking = Vec::with_capacity(n);
    for position in 0..n {
        let block = factorial(n - 1 - position);
        let digit = (index / block) as usize;
        index %= block;
        ranking.push(CandidateId(remaining.remove(digit)));
    }
    ranking
}

fn profile_from_type_counts(
    n: usize,
    counts: &BTreeMap<u64, u64>,
) -> Result<PreferenceProfile, ProfileError> {
    let names = (1..=n).map(|i| format!("C{i}")).collect();
    let entries = counts
        .iter()
        .map(|(&index, &count)| {
            let ballot = crate::ballots::Ballot::new(unrank_permutation(index, n))
                .expect("a permutation is a valid ranking");
            (ballot, count)
        })
        .collect();
    PreferenceProfile::new(n, names, entries)
}

/// IC draw using a caller-supplied generator (the simulation harness
/// feeds per-replica streams through here).
pub fn sample_ic_with(n: usize, voters: u64, rng: &mut impl Rng) -> PreferenceProfile {
    let types = factorial(n);
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..voters {
        let index = rng.random_range(0..types);
        *counts.entry(index).or_insert(0) += 1;
    }
    profile_from_type_counts(n, &counts).expect("sampled profile is valid")
}

/// Samples a profile under the impartial culture model.
pub fn sample_ic(model: &CultureModel) -> Result<PreferenceProfile, ModelError> {
    model.validate()?;
    if model.kind != CultureKind::ImpartialCulture {
        return Err(ModelError::KindMismatch { expected: "ic" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    Ok(sample_ic_with(model.candidates, model.voters, &mut rng))
}

/// IAC draw using a caller-supplied generator.
///
/// The urn starts with one token per ranking type; each draw returns the
/// token and adds another of the same type. After `voters` draws the
/// drawn multiset is uniform over all compositions of `voters` into `n!`
/// parts.
pub fn sample_iac_with(n: usize, voters: u64, rng: &mut impl Rng) -> PreferenceProfile {
    let types = factorial(n);
    let mut drawn: Vec<u64> = Vec::with_capacity(voters as usize);
    for t in 0..voters {
        let token = rng.random_range(0..types + t);
        let ranking_type = if token < types {
            token
        } else {
            drawn[(token - types) as usize]
        };
        drawn.push(ranking_type);
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for ranking_type in drawn {
        *counts.entry(ranking_type).or_insert(0) += 1;
    }
    profile_from_type_counts(n, &counts).expect("sampled profile is valid")
}

/// Samples a profile under the impartial anonymous culture model.
pub fn sample_iac(model: &CultureModel) -> Result<PreferenceProfile, ModelError> {
    model.validate()?;
    if model.kind != CultureKind::ImpartialAnonymousCulture {
        return Err(ModelError::KindMismatch { expected: "iac" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    Ok(sample_iac_with(model.candidates, model.voters, &mut rng))
}

/// Integer counts realizing the disjoint-winner construction for a given
/// electorate size.
struct ConstructionCounts {
    /// First-preference votes for the front-runner, split evenly across
    /// its second-choice blocks.
    leader_splits: Vec<u64>,
    /// First-preference votes for candidates 2..=s+1, descending.
    bloc_firsts: Vec<u64>,
    quota: u64,
}

fn construction_counts(seats: usize, voters: u64) -> Option<ConstructionCounts> {
    let s = seats as u64;
    let quota = tally::droop_quota(voters, s);
    // Just under half the electorate backs the front-runner.
    let leader = (voters.checked_sub(4)?) / 2;
    let recipients = s - 1;
    if leader < quota || leader < recipients {
        return None;
    }
    // The rest splits into s blocs of near-equal, strictly descending
    // sizes: base + (s-1), base + (s-2), ..., base.
    let rest = voters - leader;
    let ramp = s * (s - 1) / 2;
    if rest <= ramp {
        return None;
    }
    let base = (rest - ramp) / s;
    if base == 0 {
        return None;
    }
    let leftover = rest - (base * s + ramp);
    debug_assert!(leftover < s);
    let bloc_firsts: Vec<u64> = (0..s)
        .map(|i| base + (s - 1 - i) + u64::from(i < leftover))
        .collect();
    // Every bloc must sit below quota so only the leader is elected on
    // first preferences.
    if bloc_firsts[0] >= quota {
        return None;
    }
    let split_base = leader / recipients;
    let split_rem = leader % recipients;
    let leader_splits: Vec<u64> = (0..recipients)
        .map(|i| split_base + u64::from(i < split_rem))
        .collect();
    // Each surplus recipient must cross quota when the leader's surplus
    // lands: bloc + split * (leader - quota) / leader >= quota.
    let surplus = leader - quota;
    let reaches_quota = |bloc: u64, split: u64| {
        (bloc as u128) * (leader as u128) + (split as u128) * (surplus as u128)
            >= (quota as u128) * (leader as u128)
    };
    // Recipients are candidates 2..=s-1 and s+1; candidate s is skipped.
    let mut recipient_blocs: Vec<u64> = bloc_firsts[..seats - 2].to_vec();
    recipient_blocs.push(bloc_firsts[seats - 1]);
    for (split, bloc) in leader_splits.iter().zip(&recipient_blocs) {
        if !reaches_quota(*bloc, *split) {
            return None;
        }
    }
    // The runoff path must funnel cleanly into candidate s: after the
    // weakest bloc folds in, the accumulating total has to clear every
    // remaining bloc so candidate s is never the minimum.
    let mut accumulated = bloc_firsts[seats - 2] + bloc_firsts[seats - 1];
    for &bloc in bloc_firsts[..seats - 2].iter().rev() {
        if accumulated <= bloc {
            return None;
        }
        accumulated += bloc;
    }
    Some(ConstructionCounts {
        leader_splits,
        bloc_firsts,
        quota,
    })
}

/// Smallest electorate the construction supports for `seats`.
pub fn min_feasible_voters(seats: usize) -> u64 {
    let mut voters = (seats as u64 + 1) * 2;
    loop {
        if construction_counts(seats, voters).is_some() {
            return voters;
        }
        voters += 1;
    }
}

/// Builds an election with `2 * seats` candidates whose STV and
/// sequential-RCV winner sets are provably disjoint, and verifies the
/// claim by running both tabulations.
///
/// Candidates `1..=seats+1` carry all first preferences; candidates
/// `seats+2..=2*seats` sit immediately below candidate `seats` on every
/// ballot, so each inherits the runoff-winner role as earlier seats are
/// removed. Remaining ranks are completed in ascending index order.
pub fn construct_disjoint(seats: usize, voters: u64) -> Result<Election, ModelError> {
    if seats < 2 {
        return Err(ModelError::SeatsTooSmall(seats));
    }
    let counts = construction_counts(seats, voters).ok_or_else(|| ModelError::VotersTooFew {
        seats,
        given: voters,
        minimum: min_feasible_voters(seats),
    })?;
    let n = 2 * seats;
    // Core ranking over candidates 0..=seats (zero-based), then the chain
    // seats+1.. is spliced in right after candidate `seats - 1`.
    let chain: Vec<usize> = (seats + 1..n).collect();
    let complete = |mut prefix: Vec<usize>| -> Vec<usize> {
        for rest in 0..=seats {
            if !prefix.contains(&rest) {
                prefix.push(rest);
            }
        }
        let anchor = prefix
            .iter()
            .position(|&c| c == seats - 1)
            .expect("core rankings rank every core candidate");
        let mut full = prefix[..=anchor].to_vec();
        full.extend(&chain);
        full.extend(&prefix[anchor + 1..]);
        full
    };
    let mut rankings: Vec<(u64, Vec<usize>)> = Vec::new();
    // Leader blocks: candidate 0 first, one block per surplus recipient.
    let recipients: Vec<usize> = (1..seats - 1).chain([seats]).collect();
    for (recipient, split) in recipients.iter().zip(&counts.leader_splits) {
        rankings.push((*split, complete(vec![0, *recipient])));
    }
    // Bloc blocks: candidates 1..=seats ranked first. All but candidate
    // seats - 1 hand their second preference to candidate seats - 1.
    for (i, bloc) in counts.bloc_firsts.iter().enumerate() {
        let candidate = i + 1;
        let prefix = if candidate == seats - 1 {
            vec![candidate]
        } else {
            vec![candidate, seats - 1]
        };
        rankings.push((*bloc, complete(prefix)));
    }
    let profile = PreferenceProfile::from_rankings(n, &rankings)?;
    let election =
        Election::new(profile, seats)?.with_title(format!("Disjoint construction, {seats} seats"));

    // Verify the disjointness claim and the absence of lots before
    // handing the election out.
    let config = TallyConfig::for_simulation(TiePolicy::backward_then_lot(0));
    let seq = tally::sequential_rcv_with(&election, &config)
        .map_err(|e| ModelError::VerificationFailed(e.to_string()))?;
    let stv = tally::stv_with(&election, &config);
    if seq.lot_used || stv.lot_used {
        return Err(ModelError::VerificationFailed("tie resolved by lot".into()));
    }
    let expected_stv: std::collections::BTreeSet<CandidateId> =
        (0..seats - 1).chain([seats]).map(CandidateId).collect();
    let expected_seq: std::collections::BTreeSet<CandidateId> = [seats - 1]
        .into_iter()
        .chain(seats + 1..n)
        .map(CandidateId)
        .collect();
    if stv.winner_set() != expected_stv || seq.winner_set() != expected_seq {
        return Err(ModelError::VerificationFailed(format!(
            "unexpected winner sets: stv {:?}, seqrcv {:?}",
            stv.winners, seq.winners
        )));
    }
    debug_assert_eq!(counts.quota, stv.quota.unwrap_or(0));
    Ok(election)
}

/// Derives the per-replica generator for replica `index`: one fixed seed,
/// one ChaCha stream per replica, so results do not depend on execution
/// order.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
