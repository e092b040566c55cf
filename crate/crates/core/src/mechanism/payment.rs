//! Critical payments for primary and redundancy winners.
//!
//! A winner's payment is found by re-running the greedy selection without
//! it and, at every step, taking the most it could have bid while still
//! beating the step's pick, capped by its own marginal value at that step.

use crate::error::Result;
use crate::model::Campaign;
use crate::scalar::Real;

use super::select::{marginal_masked, TaskMask};
use super::{effective_reputations, redundancy_weights, PaymentTable, ReputationMode, WinnerStage};

/// Which candidates the payment re-run competes against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaymentPool {
    /// Everyone except the winner being priced (redundancy loop: everyone
    /// outside the primary set). Guarantees a sole winner is still priced
    /// against the losing candidates.
    #[default]
    FullCandidateSet,
    /// Only the other winners of the same stage. With a single winner the
    /// pool is empty and the payment collapses to zero.
    WinnersOnly,
}

/// Payments for primary and redundancy winners under the default
/// [`PaymentPool::FullCandidateSet`] pool. Non-winners are paid zero.
pub fn compute_payments<T: Real>(
    campaign: &Campaign<T>,
    primary: &WinnerStage,
    redundancy: &WinnerStage,
    mode: ReputationMode,
) -> Result<PaymentTable<T>> {
    compute_payments_with_pool(campaign, primary, redundancy, mode, PaymentPool::default())
}

/// Payments with an explicit candidate-pool policy.
pub fn compute_payments_with_pool<T: Real>(
    campaign: &Campaign<T>,
    primary: &WinnerStage,
    redundancy: &WinnerStage,
    mode: ReputationMode,
    pool: PaymentPool,
) -> Result<PaymentTable<T>> {
    let n = campaign.participants.len();
    let reputations = effective_reputations(campaign, mode);
    let mut table = PaymentTable::default();

    let primary_idx: Vec<usize> = primary.winners.iter().map(|w| (w.0 - 1) as usize).collect();
    for &wi in &primary_idx {
        let candidates: Vec<usize> = match pool {
            PaymentPool::FullCandidateSet => (0..n).filter(|&q| q != wi).collect(),
            PaymentPool::WinnersOnly => primary_idx.iter().copied().filter(|&q| q != wi).collect(),
        };
        let p = critical_payment(campaign, wi, &candidates, &reputations);
        table.set(campaign.participants[wi].id, p);
    }

    if !redundancy.winners.is_empty() {
        let weights = redundancy_weights(campaign, &reputations)?;
        let mut in_primary = vec![false; n];
        for &wi in &primary_idx {
            in_primary[wi] = true;
        }
        let redundancy_idx: Vec<usize> =
            redundancy.winners.iter().map(|w| (w.0 - 1) as usize).collect();
        for &wi in &redundancy_idx {
            let candidates: Vec<usize> = match pool {
                PaymentPool::FullCandidateSet => {
                    (0..n).filter(|&q| q != wi && !in_primary[q]).collect()
                }
                PaymentPool::WinnersOnly => {
                    redundancy_idx.iter().copied().filter(|&q| q != wi).collect()
                }
            };
            let p = critical_payment(campaign, wi, &candidates, &weights);
            table.set(campaign.participants[wi].id, p);
        }
    }

    Ok(table)
}

/// One payment re-run. `winner` and `candidates` are 0-based indexes; the
/// candidate pool must not contain the winner. With an empty pool the loop
/// body never runs and the payment stays at zero.
fn critical_payment<T: Real>(
    campaign: &Campaign<T>,
    winner: usize,
    candidates: &[usize],
    weights: &[T],
) -> T {
    let mut payment = T::zero();
    if candidates.is_empty() {
        return payment;
    }
    let mut covered = TaskMask::new(campaign.tasks.len());
    let mut used = vec![false; campaign.participants.len()];
    let mut remaining = candidates.len();

    loop {
        let mut best: Option<(usize, T, T, T)> = None;
        for &q in candidates {
            if used[q] {
                continue;
            }
            let mv = marginal_masked(campaign, q, &covered);
            let weighted_bid = campaign.participants[q].collective_bid / weights[q];
            let score = mv - weighted_bid;
            if best.is_none_or(|(_, s, _, _)| score > s) {
                best = Some((q, score, mv, weighted_bid));
            }
        }
        let (q, _, mv_q, weighted_bid_q) =
            best.expect("non-empty candidate pool yields a pick");

        let v_winner = marginal_masked(campaign, winner, &covered);
        let offer = (v_winner - (mv_q - weighted_bid_q)).min(v_winner);
        if offer > payment {
            payment = offer;
        }

        used[q] = true;
        remaining -= 1;
        for &t in &campaign.participants[q].interest_set {
            covered.insert((t.0 - 1) as usize);
        }
        // stop once the step's pick would itself have been rejected, or the
        // pool is exhausted (the pick's own step still counted above)
        if weighted_bid_q >= mv_q || remaining == 0 {
            break;
        }
    }
    payment
}
