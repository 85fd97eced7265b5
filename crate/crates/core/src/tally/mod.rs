//! Tabulation methods: IRV, sequential RCV, and STV.
//!
//! All three run on exact rationals. Randomness enters only through the
//! seeded tie-break lot, and every lot draw is flagged in the outcome so
//! downstream statistics can exclude tied elections.
//!
//! Tie-breaking follows the counting practice used for Scottish STV
//! elections: a tie is first compared at the most recent earlier round
//! where the tied candidates' totals differed, and only an all-rounds tie
//! goes to the lot. One refinement keeps the lot meaningful: when every
//! tied candidate holds exactly zero votes, the lowest index is taken
//! without a draw, because transferring an empty pile cannot change any
//! later total and the zero-vote candidates are always cleared
//! consecutively: every possible draw leads to the same outcome.

mod irv;
mod pile;
mod stv;
mod ties;

use crate::ballots::{remove_candidates, CandidateId, Election, PreferenceProfile};
use crate::numeric;
use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// How ties between equal vote totals are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieMode {
    /// Compare totals at the most recent earlier round where the tied
    /// candidates differ; draw by lot only if tied at every round.
    BackwardThenLot,
    /// Go straight to the lot.
    LotOnly,
}

/// Seeded tie-break policy. Equal inputs and equal seeds give bit-for-bit
/// identical outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TiePolicy {
    pub mode: TieMode,
    pub seed: u64,
}

impl TiePolicy {
    pub fn backward_then_lot(seed: u64) -> Self {
        TiePolicy {
            mode: TieMode::BackwardThenLot,
            seed,
        }
    }

    pub fn lot_only(seed: u64) -> Self {
        TiePolicy {
            mode: TieMode::LotOnly,
            seed,
        }
    }
}

/// Tabulation options beyond the tie policy.
#[derive(Clone, Copy, Debug)]
pub struct TallyConfig {
    pub tie_policy: TiePolicy,
    /// Record full round-by-round tables. Simulation mode turns this off
    /// to avoid building audit structures in the hot loop.
    pub record_rounds: bool,
    /// Truncate each STV transfer value to 5 decimal places before
    /// applying it, emulating the Scottish statutory count. Default is
    /// exact arithmetic.
    pub scots_5dp: bool,
}

impl TallyConfig {
    pub fn new(tie_policy: TiePolicy) -> Self {
        TallyConfig {
            tie_policy,
            record_rounds: true,
            scots_5dp: false,
        }
    }

    pub fn for_simulation(tie_policy: TiePolicy) -> Self {
        TallyConfig {
            tie_policy,
            record_rounds: false,
            scots_5dp: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Irv,
    SequentialRcv,
    Stv,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Irv => "irv",
            Method::SequentialRcv => "seqrcv",
            Method::Stv => "stv",
        }
    }
}

/// Something that happened in a round.
#[derive(Clone, Debug, PartialEq)]
pub enum RoundEvent {
    Eliminated(CandidateId),
    /// `surplus` is present when the candidate crossed the quota and
    /// absent when elected by majority or as an unopposed remainder.
    Elected {
        candidate: CandidateId,
        surplus: Option<BigRational>,
    },
    /// Weight newly exhausted by the transfer that opened this round.
    ExhaustedDelta(BigRational),
}

/// One column of a votes-by-round table: the continuing candidates'
/// totals when the round opened, plus what was decided in it.
///
/// Per round, `totals + retained + exhausted` sums exactly to the total
/// ballot weight. The 5-decimal truncation mode is the one exception:
/// there the discarded fractions simply leave the count.
#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub totals: BTreeMap<CandidateId, BigRational>,
    /// Weight held by already-elected candidates at the snapshot: their
    /// full total until the surplus transfers, the quota afterwards.
    pub retained: BTreeMap<CandidateId, BigRational>,
    /// Cumulative exhausted weight at the snapshot.
    pub exhausted: BigRational,
    pub events: Vec<RoundEvent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundTable {
    pub rounds: Vec<Round>,
    /// Quota in force, absent for IRV tables.
    pub quota: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieContext {
    Elimination,
    SurplusOrder,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TieResolution {
    /// Separated by totals at an earlier round (1-based).
    Backward { round: usize },
    /// Every tied candidate held zero votes; lowest index taken, no lot.
    ZeroTotal,
    /// Seeded lot.
    Lot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieEvent {
    /// Which table the tie occurred in (the seat index for sequential RCV).
    pub table: usize,
    pub round: usize,
    pub context: TieContext,
    pub candidates: Vec<CandidateId>,
    pub selected: CandidateId,
    pub resolution: TieResolution,
}

/// Full result of one tabulation.
#[derive(Clone, Debug, PartialEq)]
pub struct TallyOutcome {
    pub method: Method,
    /// Winners in order of election.
    pub winners: Vec<CandidateId>,
    /// One table for IRV/STV, one per seat for sequential RCV. Empty when
    /// round recording is disabled.
    pub tables: Vec<RoundTable>,
    /// STV quota.
    pub quota: Option<u64>,
    pub tie_events: Vec<TieEvent>,
    /// True iff some tie was resolved by lot.
    pub lot_used: bool,
}

impl TallyOutcome {
    pub fn winner_set(&self) -> BTreeSet<CandidateId> {
        self.winners.iter().copied().collect()
    }

    pub fn winner_names(&self, profile: &PreferenceProfile) -> Vec<String> {
        self.winners
            .iter()
            .map(|c| profile.candidate_name(*c).to_string())
            .collect()
    }

    /// JSON form: winners by name, totals as 5-place decimal strings with
    /// exact `num`/`den` companions.
    pub fn to_json(&self, profile: &PreferenceProfile) -> Value {
        let mut doc = json!({
            "schema_version": 1,
            "method": self.method.as_str(),
            "winners": self.winner_names(profile),
            "quota": self.quota,
            "lot_used": self.lot_used,
            "tie_events": self.tie_events.iter().map(|t| tie_event_json(t, profile)).collect::<Vec<_>>(),
        });
        let tables_json: Vec<Value> = self
            .tables
            .iter()
            .map(|t| Value::Array(t.rounds.iter().map(|r| round_json(r, profile)).collect()))
            .collect();
        match self.method {
            Method::SequentialRcv => {
                let seats: Vec<Value> = tables_json
                    .into_iter()
                    .enumerate()
                    .map(|(i, rounds)| json!({ "seat": i + 1, "rounds": rounds }))
                    .collect();
                doc["seats"] = Value::Array(seats);
            }
            _ => {
                doc["rounds"] = tables_json
                    .into_iter()
                    .next()
                    .unwrap_or(Value::Array(vec![]));
            }
        }
        doc
    }
}

fn weight_json(value: &BigRational) -> (Value, Value) {
    let (num, den) = numeric::num_den_strings(value);
    (
        Value::String(numeric::decimal_string(value, 5)),
        json!({ "num": num, "den": den }),
    )
}

fn round_json(round: &Round, profile: &PreferenceProfile) -> Value {
    let mut totals = serde_json::Map::new();
    let mut exact = serde_json::Map::new();
    for (c, w) in &round.totals {
        let (display, num_den) = weight_json(w);
        totals.insert(profile.candidate_name(*c).to_string(), display);
        exact.insert(profile.candidate_name(*c).to_string(), num_den);
    }
    let mut retained = serde_json::Map::new();
    for (c, w) in &round.retained {
        let (display, _) = weight_json(w);
        retained.insert(profile.candidate_name(*c).to_string(), display);
    }
    let events: Vec<Value> = round
        .events
        .iter()
        .map(|e| match e {
            RoundEvent::Eliminated(c) => json!({
                "type": "eliminated",
                "candidate": profile.candidate_name(*c),
            }),
            RoundEvent::Elected { candidate, surplus } => {
                let mut v = json!({
                    "type": "elected",
                    "candidate": profile.candidate_name(*candidate),
                });
                if let Some(s) = surplus {
                    let (display, num_den) = weight_json(s);
                    v["surplus"] = display;
                    v["surplus_exact"] = num_den;
                }
                v
            }
            RoundEvent::ExhaustedDelta(amount) => {
                let (display, num_den) = weight_json(amount);
                json!({ "type": "exhausted", "amount": display, "amount_exact": num_den })
            }
        })
        .collect();
    json!({
        "totals": Value::Object(totals),
        "totals_exact": Value::Object(exact),
        "retained": Value::Object(retained),
        "exhausted": numeric::decimal_string(&round.exhausted, 5),
        "events": events,
    })
}

fn tie_event_json(event: &TieEvent, profile: &PreferenceProfile) -> Value {
    let resolution = match &event.resolution {
        TieResolution::Backward { round } => json!({ "kind": "backward", "round": round }),
        TieResolution::ZeroTotal => json!({ "kind": "zero_total" }),
        TieResolution::Lot => json!({ "kind": "lot" }),
    };
    json!({
        "table": event.table,
        "round": event.round,
        "context": match event.context {
            TieContext::Elimination => "elimination",
            TieContext::SurplusOrder => "surplus_order",
        },
        "candidates": event.candidates.iter().map(|c| profile.candidate_name(*c)).collect::<Vec<_>>(),
        "selected": profile.candidate_name(event.selected),
        "resolution": resolution,
    })
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TallyError {
    #[error("every ballot exhausted after filling {seats_filled} of {seats} seats")]
    BallotsExhausted { seats_filled: usize, seats: usize },
}

/// Droop quota: `floor(voters / (seats + 1)) + 1`.
pub fn droop_quota(voters: u64, seats: u64) -> u64 {
    debug_assert!(voters >= 1 && seats >= 1);
    voters / (seats + 1) + 1
}

/// Instant runoff voting over the profile's active candidates.
///
/// The winner is the first candidate to hold a strict majority of the
/// continuing (non-exhausted) ballot weight; the threshold is recomputed
/// every round as ballots exhaust.
pub fn irv(profile: &PreferenceProfile, policy: &TiePolicy) -> TallyOutcome {
    irv_with(profile, &TallyConfig::new(*policy))
}

pub fn irv_with(profile: &PreferenceProfile, config: &TallyConfig) -> TallyOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.tie_policy.seed);
    let run = irv::run(profile, config, &mut rng, 0);
    TallyOutcome {
        method: Method::Irv,
        winners: vec![run.winner],
        tables: run
            .rounds
            .map(|rounds| {
                vec![RoundTable {
                    rounds,
                    quota: None,
                }]
            })
            .unwrap_or_default(),
        quota: None,
        tie_events: run.ties,
        lot_used: run.lot_used,
    }
}

/// Sequential RCV: seat `k` goes to the IRV winner of the profile with
/// the first `k - 1` winners removed.
pub fn sequential_rcv(election: &Election, policy: &TiePolicy) -> Result<TallyOutcome, TallyError> {
    sequential_rcv_with(election, &TallyConfig::new(*policy))
}

pub fn sequential_rcv_with(
    election: &Election,
    config: &TallyConfig,
) -> Result<TallyOutcome, TallyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.tie_policy.seed);
    let seats = election.seats();
    let mut current = election.profile().clone();
    let mut winners: Vec<CandidateId> = Vec::with_capacity(seats);
    let mut tables = Vec::new();
    let mut tie_events = Vec::new();
    let mut lot_used = false;
    for seat in 0..seats {
        if seat > 0 {
            let removed: BTreeSet<CandidateId> = [winners[seat - 1]].into_iter().collect();
            current = remove_candidates(&current, &removed)
                .map_err(|_| TallyError::BallotsExhausted {
                    seats_filled: seat,
                    seats,
                })?
                .profile;
        }
        let run = irv::run(&current, config, &mut rng, seat);
        winners.push(run.winner);
        if let Some(rounds) = run.rounds {
            tables.push(RoundTable {
                rounds,
                quota: None,
            });
        }
        tie_events.extend(run.ties);
        lot_used |= run.lot_used;
    }
    Ok(TallyOutcome {
        method: Method::SequentialRcv,
        winners,
        tables,
        quota: None,
        tie_events,
        lot_used,
    })
}

/// Single transferable vote with weighted inclusive surplus transfers.
///
/// The quota is computed once from the initial valid-ballot count and
/// never recomputed. Surpluses transfer largest first; every ballot held
/// by an elected candidate is re-weighted by `surplus / total` and passes
/// to its next hopeful preference. Eliminations move whole current-weight
/// ballots. Counting stops as soon as all seats fill, or when the hopeful
/// count equals the remaining seats, in which case the remaining hopefuls
/// are elected without reaching quota.
pub fn stv(election: &Election, policy: &TiePolicy) -> TallyOutcome {
    stv_with(election, &TallyConfig::new(*policy))
}

pub fn stv_with(election: &Election, config: &TallyConfig) -> TallyOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.tie_policy.seed);
    let run = stv::run(election, config, &mut rng);
    TallyOutcome {
        method: Method::Stv,
        winners: run.winners,
        tables: run
            .rounds
            .map(|rounds| {
                vec![RoundTable {
                    rounds,
                    quota: Some(run.quota),
                }]
            })
            .unwrap_or_default(),
        quota: Some(run.quota),
        tie_events: run.ties,
        lot_used: run.lot_used,
    }
}
