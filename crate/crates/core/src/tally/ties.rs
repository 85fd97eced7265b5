//! Tie resolution shared by the tabulation engines.

use super::{TieContext, TieEvent, TieMode, TiePolicy, TieResolution};
use crate::ballots::CandidateId;
use num::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) enum Want {
    Min,
    Max,
}

/// Picks one candidate out of a tied set.
///
/// `tied` must be sorted by index. `prior_rounds` holds the full totals
/// vector of every earlier round, oldest first; the current round must
/// not be included. `all_zero` says whether the quantity being compared
/// is zero for every tied candidate; such ties are resolved positionally
/// (lowest index) because any choice produces identical later totals.
#[allow(clippy::too_many_arguments)]
pub(super) fn resolve(
    tied: &[usize],
    prior_rounds: &[Vec<BigRational>],
    want: Want,
    all_zero: bool,
    policy: &TiePolicy,
    rng: &mut ChaCha8Rng,
    table: usize,
    round: usize,
    context: TieContext,
) -> (usize, Option<TieEvent>) {
    debug_assert!(!tied.is_empty());
    debug_assert!(tied.windows(2).all(|w| w[0] < w[1]));
    if tied.len() == 1 {
        return (tied[0], None);
    }
    let event = |selected: usize, resolution: TieResolution| TieEvent {
        table,
        round,
        context,
        candidates: tied.iter().map(|&c| CandidateId(c)).collect(),
        selected: CandidateId(selected),
        resolution,
    };
    if all_zero {
        return (tied[0], Some(event(tied[0], TieResolution::ZeroTotal)));
    }
    let mut remaining: Vec<usize> = tied.to_vec();
    if policy.mode == TieMode::BackwardThenLot {
        for (index, totals) in prior_rounds.iter().enumerate().rev() {
            let best = remaining
                .iter()
                .map(|&c| &totals[c])
                .reduce(|a, b| match want {
                    Want::Min => a.min(b),
                    Want::Max => a.max(b),
                })
                .expect("remaining is non-empty")
                .clone();
            remaining.retain(|&c| totals[c] == best);
            if remaining.len() == 1 {
                let selected = remaining[0];
                return (
                    selected,
                    Some(event(
                        selected,
                        TieResolution::Backward { round: index + 1 },
                    )),
                );
            }
        }
    }
    let selected = remaining[rng.random_range(0..remaining.len())];
    (selected, Some(event(selected, TieResolution::Lot)))
}
