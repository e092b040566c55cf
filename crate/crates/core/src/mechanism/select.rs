//! Greedy winner selection stages.
//!
//! Primary and redundancy selection run the same collective-bid loop with
//! different bid weights; the secondary stage scores candidates by their
//! descriptive bids over the still-uncovered part of their interest sets.
//! Argmax ties always break toward the lowest participant id, which makes
//! every stage deterministic and invariant to participant order.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::model::{Campaign, ParticipantId, TaskId};
use crate::scalar::Real;

use super::{
    effective_reputations, redundancy_weights, ReputationMode, SecondaryOutcome,
    SelectionOutcome, StageKind, TraceRecord, WinnerStage,
};

/// Dense covered-task set keyed by `task id - 1`.
pub(crate) struct TaskMask {
    bits: Vec<bool>,
    count: usize,
}

impl TaskMask {
    pub(crate) fn new(n_tasks: usize) -> Self {
        Self {
            bits: vec![false; n_tasks],
            count: 0,
        }
    }

    pub(crate) fn from_ids(n_tasks: usize, ids: &BTreeSet<TaskId>) -> Self {
        let mut mask = Self::new(n_tasks);
        for &t in ids {
            mask.insert((t.0 - 1) as usize);
        }
        mask
    }

    pub(crate) fn contains(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    pub(crate) fn insert(&mut self, idx: usize) {
        if !self.bits[idx] {
            self.bits[idx] = true;
            self.count += 1;
        }
    }

    pub(crate) fn covered(&self) -> usize {
        self.count
    }

    pub(crate) fn to_ids(&self) -> BTreeSet<TaskId> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| TaskId(i as u32 + 1))
            .collect()
    }
}

/// Marginal value of participant `pi` (0-based) over a covered mask: the
/// summed value of its uncovered interest tasks, in ascending task id.
pub(crate) fn marginal_masked<T: Real>(
    campaign: &Campaign<T>,
    pi: usize,
    covered: &TaskMask,
) -> T {
    let mut sum = T::zero();
    for &t in &campaign.participants[pi].interest_set {
        let ti = (t.0 - 1) as usize;
        if !covered.contains(ti) {
            sum = sum + campaign.tasks[ti].value;
        }
    }
    sum
}

/// The shared collective-bid greedy loop.
///
/// Repeatedly picks the candidate maximizing `marginal - bid/weight` and
/// admits it while the weighted bid stays strictly below the marginal
/// value. Admission extends `covered` by the winner's interest set.
/// Returns 0-based indexes in admission order.
fn greedy_collective<T: Real>(
    campaign: &Campaign<T>,
    weights: &[T],
    covered: &mut TaskMask,
    stage: StageKind,
    trace: &mut Vec<TraceRecord<T>>,
) -> Vec<usize> {
    let n = campaign.participants.len();
    let mut taken = vec![false; n];
    let mut admitted = Vec::new();

    loop {
        let mut best: Option<(usize, T, T, T)> = None;
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let mv = marginal_masked(campaign, i, covered);
            let weighted_bid = campaign.participants[i].collective_bid / weights[i];
            let score = mv - weighted_bid;
            // strict > keeps the lowest id on ties
            if best.is_none_or(|(_, s, _, _)| score > s) {
                best = Some((i, score, mv, weighted_bid));
            }
        }
        let Some((h, score, mv, weighted_bid)) = best else {
            break; // candidates exhausted
        };
        let admit = weighted_bid < mv;
        trace.push(TraceRecord {
            stage,
            participant: campaign.participants[h].id,
            score,
            marginal_value: mv,
            weighted_bid,
            budget_guard: None,
            admitted: admit,
        });
        if !admit {
            break;
        }
        taken[h] = true;
        admitted.push(h);
        for &t in &campaign.participants[h].interest_set {
            covered.insert((t.0 - 1) as usize);
        }
    }
    admitted
}

/// Primary winner selection: the reputation-weighted greedy loop starting
/// from an empty covered set.
pub fn select_primary_winners<T: Real>(
    campaign: &Campaign<T>,
    mode: ReputationMode,
) -> Result<SelectionOutcome<T>> {
    let weights = effective_reputations(campaign, mode);
    let mut covered = TaskMask::new(campaign.tasks.len());
    let mut trace = Vec::new();
    let admitted = greedy_collective(campaign, &weights, &mut covered, StageKind::Primary, &mut trace);
    Ok(SelectionOutcome {
        stage: WinnerStage {
            winners: admitted
                .into_iter()
                .map(|i| campaign.participants[i].id)
                .collect(),
            covered_tasks: covered.to_ids(),
        },
        trace,
    })
}

/// Redundancy winner selection: the same greedy loop with bids weighted by
/// the redundancy-reputation factor, continuing from the primary stage's
/// covered set. Any primary winner picked up by the loop is removed from
/// the result afterwards.
pub fn select_redundancy_winners<T: Real>(
    campaign: &Campaign<T>,
    primary: &WinnerStage,
    mode: ReputationMode,
) -> Result<SelectionOutcome<T>> {
    let reputations = effective_reputations(campaign, mode);
    let weights = redundancy_weights(campaign, &reputations)?;
    let mut covered = TaskMask::from_ids(campaign.tasks.len(), &primary.covered_tasks);
    let mut trace = Vec::new();
    let admitted = greedy_collective(
        campaign,
        &weights,
        &mut covered,
        StageKind::Redundancy,
        &mut trace,
    );
    let winners: Vec<ParticipantId> = admitted
        .into_iter()
        .map(|i| campaign.participants[i].id)
        .filter(|id| !primary.contains(*id))
        .collect();
    let newly_covered: BTreeSet<TaskId> = covered
        .to_ids()
        .difference(&primary.covered_tasks)
        .copied()
        .collect();
    Ok(SelectionOutcome {
        stage: WinnerStage {
            winners,
            covered_tasks: newly_covered,
        },
        trace,
    })
}

/// Secondary winner selection and payment.
///
/// Candidates are participants outside `excluded` holding at least one
/// uncovered task; each candidate's list is pruned to uncovered tasks, and
/// its descriptive bid is recomputed over the pruned list as the stage
/// proceeds. An admitted winner takes its whole pruned list, is paid its
/// descriptive sum, and the budget follows the recursion
/// `B <- B * r_h - b_h / r_h`. Admission requires
/// `b_h / r_h + r_h * B >= 0`; a candidate whose list empties drops out.
pub fn select_secondary_winners<T: Real>(
    campaign: &Campaign<T>,
    covered: &BTreeSet<TaskId>,
    excluded: &BTreeSet<ParticipantId>,
    budget: T,
    mode: ReputationMode,
) -> Result<SecondaryOutcome<T>> {
    let n_tasks = campaign.tasks.len();
    let mut budget = budget;
    let mut outcome = SecondaryOutcome::empty(budget);

    let mut covered_mask = TaskMask::from_ids(n_tasks, covered);
    if covered_mask.covered() == n_tasks {
        return Ok(outcome);
    }

    let reputations = effective_reputations(campaign, mode);
    // pruned[i]: the candidate's still-uncovered task indexes, None once out
    let mut pruned: Vec<Option<Vec<usize>>> = campaign
        .participants
        .iter()
        .map(|p| {
            if excluded.contains(&p.id) {
                return None;
            }
            let list: Vec<usize> = p
                .interest_set
                .iter()
                .map(|t| (t.0 - 1) as usize)
                .filter(|&ti| !covered_mask.contains(ti))
                .collect();
            (!list.is_empty()).then_some(list)
        })
        .collect();

    let mut assignments: BTreeMap<ParticipantId, Vec<TaskId>> = BTreeMap::new();

    loop {
        if covered_mask.covered() == n_tasks {
            break;
        }
        let mut best: Option<(usize, T, T, T)> = None;
        for (i, list) in pruned.iter().enumerate() {
            let Some(list) = list else { continue };
            let value: T = list.iter().map(|&ti| campaign.tasks[ti].value).sum();
            let bid: T = list
                .iter()
                .map(|&ti| campaign.participants[i].per_task_bids[&TaskId(ti as u32 + 1)])
                .sum();
            let score = value - bid / reputations[i];
            if best.is_none_or(|(_, s, _, _)| score > s) {
                best = Some((i, score, value, bid));
            }
        }
        let Some((h, score, value, bid)) = best else {
            break; // candidate pool exhausted
        };
        let weighted_bid = bid / reputations[h];
        let guard = weighted_bid + reputations[h] * budget;
        let admit = guard >= T::zero();
        outcome.trace.push(TraceRecord {
            stage: StageKind::Secondary,
            participant: campaign.participants[h].id,
            score,
            marginal_value: value,
            weighted_bid,
            budget_guard: Some(guard),
            admitted: admit,
        });
        if !admit {
            break;
        }

        let list = pruned[h].take().expect("selected candidate has a list");
        let task_ids: Vec<TaskId> = list.iter().map(|&ti| TaskId(ti as u32 + 1)).collect();
        for &ti in &list {
            covered_mask.insert(ti);
        }
        let id = campaign.participants[h].id;
        outcome.stage.winners.push(id);
        outcome.stage.covered_tasks.extend(task_ids.iter().copied());
        assignments.insert(id, task_ids);
        outcome.payments.set(id, bid);
        budget = budget * reputations[h] - weighted_bid;

        // drop the newly covered tasks from everyone still in the pool
        for entry in pruned.iter_mut() {
            if let Some(lst) = entry {
                lst.retain(|&ti| !covered_mask.contains(ti));
                if lst.is_empty() {
                    *entry = None;
                }
            }
        }
    }

    outcome.assignments = assignments;
    outcome.final_budget = budget;
    Ok(outcome)
}
