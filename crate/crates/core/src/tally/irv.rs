//! The instant-runoff engine, also the per-seat worker for sequential RCV.

use super::pile::Pile;
use super::ties::{self, Want};
use super::{Round, RoundEvent, TallyConfig, TieContext, TieEvent};
use crate::ballots::{CandidateId, PreferenceProfile};
use crate::numeric;
use num::{BigRational, Zero};
use rand_chacha::ChaCha8Rng;

pub(super) struct IrvRun {
    pub winner: CandidateId,
    pub rounds: Option<Vec<Round>>,
    pub ties: Vec<TieEvent>,
    pub lot_used: bool,
}

pub(super) fn run(
    profile: &PreferenceProfile,
    config: &TallyConfig,
    rng: &mut ChaCha8Rng,
    table: usize,
) -> IrvRun {
    let n = profile.num_candidates();
    let mut hopeful = vec![false; n];
    for c in profile.active_candidates() {
        hopeful[c.0] = true;
    }
    let mut piles: Vec<Vec<Pile>> = (0..n).map(|_| Vec::new()).collect();
    let mut totals: Vec<BigRational> = vec![BigRational::zero(); n];
    let mut exhausted = BigRational::zero();
    for (ballot, count) in profile.entries() {
        // Rankings never reference withdrawn candidates, so the first
        // preference always stands.
        let first = ballot.ranking()[0].0;
        debug_assert!(hopeful[first]);
        totals[first] += ballot.weight() * numeric::rational(*count);
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

    loop {
        let round_no = history.len() + 1;
        history.push(totals.clone());
        if record {
            rounds.push(Round {
                totals: (0..n)
                    .filter(|&i| hopeful[i])
                    .map(|i| (CandidateId(i), totals[i].clone()))
                    .collect(),
                retained: Default::default(),
                exhausted: exhausted.clone(),
                events: Vec::new(),
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

        let hopefuls: Vec<usize> = (0..n).filter(|&i| hopeful[i]).collect();
        // A sole continuing candidate takes the seat outright.
        if hopefuls.len() == 1 {
            let winner = CandidateId(hopefuls[0]);
            push_event(
                &mut rounds,
                RoundEvent::Elected {
                    candidate: winner,
                    surplus: None,
                },
            );
            return IrvRun {
                winner,
                rounds: record.then_some(rounds),
                ties,
                lot_used,
            };
        }

        // Strict majority of the continuing (non-exhausted) weight. The
        // threshold shrinks as ballots exhaust, so it is recomputed here
        // every round. With two candidates left this elects the leader.
        let active_weight = hopefuls
            .iter()
            .fold(BigRational::zero(), |acc, &i| acc + &totals[i]);
        let leader = hopefuls
            .iter()
            .copied()
            .max_by(|&a, &b| totals[a].cmp(&totals[b]))
            .expect("at least two hopefuls");
        if &totals[leader] + &totals[leader] > active_weight {
            let winner = CandidateId(leader);
            push_event(
                &mut rounds,
                RoundEvent::Elected {
                    candidate: winner,
                    surplus: None,
                },
            );
            return IrvRun {
                winner,
                rounds: record.then_some(rounds),
                ties,
                lot_used,
            };
        }

        // No majority: eliminate the candidate with the fewest votes.
        let min_value = hopefuls
            .iter()
            .map(|&i| &totals[i])
            .min()
            .expect("at least two hopefuls")
            .clone();
        let tied: Vec<usize> = hopefuls
            .iter()
            .copied()
            .filter(|&i| totals[i] == min_value)
            .collect();
        let prior = &history[..history.len() - 1];
        let (loser, tie_event) = ties::resolve(
            &tied,
            prior,
            Want::Min,
            min_value.is_zero(),
            &config.tie_policy,
            rng,
            table,
            round_no,
            TieContext::Elimination,
        );
        if let Some(event) = tie_event {
            lot_used |= event.resolution == super::TieResolution::Lot;
            ties.push(event);
        }
        hopeful[loser] = false;
        push_event(&mut rounds, RoundEvent::Eliminated(CandidateId(loser)));

        // Transfer the whole pile at current weights.
        totals[loser] = BigRational::zero();
        let pile = std::mem::take(&mut piles[loser]);
        let mut exhausted_delta = BigRational::zero();
        for mut block in pile {
            match block.advance(&hopeful) {
                Some(next) => {
                    totals[next] += block.amount();
                    piles[next].push(block);
                }
                None => exhausted_delta += block.amount(),
            }
        }
        if !exhausted_delta.is_zero() {
            push_event(
                &mut rounds,
                RoundEvent::ExhaustedDelta(exhausted_delta.clone()),
            );
            exhausted += exhausted_delta;
        }

        debug_assert_eq!(
            (0..n).fold(BigRational::zero(), |acc, i| acc + &totals[i]) + &exhausted,
            profile.total_weight(),
            "vote conservation violated"
        );
    }
}
