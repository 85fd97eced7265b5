//! The STV engine: Droop quota, weighted inclusive surplus transfers,
//! whole-ballot elimination transfers.

use super::pile::Pile;
use super::ties::{self, Want};
use super::{droop_quota, Round, RoundEvent, TallyConfig, TieContext, TieEvent, TieResolution};
use crate::ballots::{CandidateId, Election};
use crate::numeric;
use num::{BigRational, Zero};
use rand_chacha::ChaCha8Rng;

pub(super) struct StvRun {
    pub winners: Vec<CandidateId>,
    pub rounds: Option<Vec<Round>>,
    pub ties: Vec<TieEvent>,
    pub lot_used: bool,
    pub quota: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Hopeful,
    Elected,
    Eliminated,
}

pub(super) fn run(election: &Election, config: &TallyConfig, rng: &mut ChaCha8Rng) -> StvRun {
    let profile = election.profile();
    let seats = election.seats();
    let n = profile.num_candidates();
    let quota_votes = droop_quota(profile.total_voters(), seats as u64);
    let quota = numeric::rational(quota_votes);

    let mut status = vec![Status::Eliminated; n];
    let mut hopeful = vec![false; n];
    for c in profile.active_candidates() {
        status[c.0] = Status::Hopeful;
        hopeful[c.0] = true;
    }
    let mut piles: Vec<Vec<Pile>> = (0..n).map(|_| Vec::new()).collect();
    // Credited weight per candidate: the running total for hopefuls, the
    // full total for elected candidates whose surplus is still pending,
    // the quota once it has been transferred, zero after elimination.
    let mut held: Vec<BigRational> = vec![BigRational::zero(); n];
    let mut exhausted = BigRational::zero();
    for (ballot, count) in profile.entries() {
        let first = ballot.ranking()[0].0;
        held[first] += ballot.weight() * numeric::rational(*count);
        piles[first].push(Pile {
            ranking: ballot.ranking(),
            pos: 0,
            weight: ballot.weight().clone(),
            count: *count,
        });
    }

    let record = config.record_rounds;
    let mut rounds: Vec<Round> = Vec::new();
    let mut history: Vec<Vec<BigRational>> = Vec::new();
    let mut ties: Vec<TieEvent> = Vec::new();
    let mut lot_used = false;
    let mut winners: Vec<CandidateId> = Vec::with_capacity(seats);
    let mut pending_surpluses: Vec<usize> = Vec::new();
    let mut pending_elimination: Option<usize> = None;

    loop {
        let round_no = history.len() + 1;
        let mut opening_events: Vec<RoundEvent> = Vec::new();

        // Apply one pending transfer before taking the round snapshot.
        if let Some(loser) = pending_elimination.take() {
            held[loser] = BigRational::zero();
            let pile = std::mem::take(&mut piles[loser]);
            let mut exhausted_delta = BigRational::zero();
            for mut block in pile {
                match block.advance(&hopeful) {
                    Some(next) => {
                        held[next] += block.amount();
                        piles[next].push(block);
                    }
                    None => exhausted_delta += block.amount(),
                }
            }
            if !exhausted_delta.is_zero() {
                opening_events.push(RoundEvent::ExhaustedDelta(exhausted_delta.clone()));
                exhausted += exhausted_delta;
            }
        } else if !pending_surpluses.is_empty() {
            // Largest surplus first; equal surpluses fall to the tie policy.
            let max_surplus = pending_surpluses
                .iter()
                .map(|&c| &held[c] - &quota)
                .max()
                .expect("pending surplus set is non-empty");
            let mut tied: Vec<usize> = pending_surpluses
                .iter()
                .copied()
                .filter(|&c| &held[c] - &quota == max_surplus)
                .collect();
            tied.sort_unstable();
            let (chosen, tie_event) = ties::resolve(
                &tied,
                &history,
                Want::Max,
                max_surplus.is_zero(),
                &config.tie_policy,
                rng,
                0,
                round_no,
                TieContext::SurplusOrder,
            );
            if let Some(event) = tie_event {
                lot_used |= event.resolution == TieResolution::Lot;
                ties.push(event);
            }
            pending_surpluses.retain(|&c| c != chosen);
            // Weighted inclusive transfer: every ballot the candidate
            // holds is re-weighted by surplus/total and moves on.
            let factor = &max_surplus / &held[chosen];
            let pile = std::mem::take(&mut piles[chosen]);
            let mut exhausted_delta = BigRational::zero();
            for mut block in pile {
                let mut weight = &block.weight * &factor;
                if config.scots_5dp {
                    weight = numeric::truncate_places(&weight, 5);
                }
                block.weight = weight;
                match block.advance(&hopeful) {
                    Some(next) => {
                        held[next] += block.amount();
                        piles[next].push(block);
                    }
                    None => exhausted_delta += block.amount(),
                }
            }
            held[chosen] = quota.clone();
            if !exhausted_delta.is_zero() {
                opening_events.push(RoundEvent::ExhaustedDelta(exhausted_delta.clone()));
                exhausted += exhausted_delta;
            }
        }

        // Snapshot.
        history.push(held.clone());
        if record {
            rounds.push(Round {
                totals: (0..n)
                    .filter(|&i| status[i] == Status::Hopeful)
                    .map(|i| (CandidateId(i), held[i].clone()))
                    .collect(),
                retained: (0..n)
                    .filter(|&i| status[i] == Status::Elected)
                    .map(|i| (CandidateId(i), held[i].clone()))
                    .collect(),
                exhausted: exhausted.clone(),
                events: opening_events,
            });
        }
        let push_event = |rounds: &mut Vec<Round>, event: RoundEvent| {
            if record {
                rounds
                    .last_mut()
                    .expect("round pushed above")
                    .events
                    .push(event);
            }
        };
        if !config.scots_5dp {
            debug_assert_eq!(
                (0..n).fold(BigRational::zero(), |acc, i| acc + &held[i]) + &exhausted,
                profile.total_weight(),
                "vote conservation violated"
            );
        }

        // Elect everyone at or above quota, highest total first.
        let mut crossers: Vec<usize> = (0..n)
            .filter(|&i| status[i] == Status::Hopeful && held[i] >= quota)
            .collect();
        crossers.sort_by(|&a, &b| held[b].cmp(&held[a]).then(a.cmp(&b)));
        for &c in &crossers {
            status[c] = Status::Elected;
            hopeful[c] = false;
            winners.push(CandidateId(c));
            pending_surpluses.push(c);
            push_event(
                &mut rounds,
                RoundEvent::Elected {
                    candidate: CandidateId(c),
                    surplus: Some(&held[c] - &quota),
                },
            );
        }
        // Once every seat is filled, remaining surpluses and eliminations
        // are moot and counting stops.
        if winners.len() == seats {
            break;
        }

        let hopefuls: Vec<usize> = (0..n).filter(|&i| status[i] == Status::Hopeful).collect();
        // When as many hopefuls remain as open seats, all are elected even
        // below quota.
        if hopefuls.len() == seats - winners.len() {
            let mut remaining = hopefuls.clone();
            remaining.sort_by(|&a, &b| held[b].cmp(&held[a]).then(a.cmp(&b)));
            for c in remaining {
                status[c] = Status::Elected;
                hopeful[c] = false;
                winners.push(CandidateId(c));
                push_event(
                    &mut rounds,
                    RoundEvent::Elected {
                        candidate: CandidateId(c),
                        surplus: None,
                    },
                );
            }
            break;
        }

        // No election possible and nothing pending: eliminate the lowest.
        if pending_surpluses.is_empty() {
            let min_value = hopefuls
                .iter()
                .map(|&i| &held[i])
                .min()
                .expect("hopefuls outnumber open seats")
                .clone();
            let tied: Vec<usize> = hopefuls
                .iter()
                .copied()
                .filter(|&i| held[i] == min_value)
                .collect();
            let prior = &history[..history.len() - 1];
            let (loser, tie_event) = ties::resolve(
                &tied,
                prior,
                Want::Min,
                min_value.is_zero(),
                &config.tie_policy,
                rng,
                0,
                round_no,
                TieContext::Elimination,
            );
            if let Some(event) = tie_event {
                lot_used |= event.resolution == TieResolution::Lot;
                ties.push(event);
            }
            status[loser] = Status::Eliminated;
            hopeful[loser] = false;
            pending_elimination = Some(loser);
            push_event(&mut rounds, RoundEvent::Eliminated(CandidateId(loser)));
        }
    }

    StvRun {
        winners,
        rounds: record.then_some(rounds),
        ties,
        lot_used,
        quota: quota_votes,
    }
}
