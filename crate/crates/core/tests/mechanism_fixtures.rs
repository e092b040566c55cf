//! Hand-traced auction fixtures exercising every stage of the pipeline.

use std::collections::BTreeSet;

use approx::assert_relative_eq;
use mcs_auctions::mechanism::{
    compute_payments, compute_payments_with_pool, marginal_value, redundancy_factor,
    run_mechanism, select_primary_winners, select_redundancy_winners, select_secondary_winners,
    MechanismKind, PaymentPool, ReputationMode, StageKind, WinnerStage,
};
use mcs_auctions::model::{Area, Campaign, Participant, ParticipantId, Point, TaskId, TaskSpec};

fn task(id: u32, x: f64, y: f64, value: f64) -> TaskSpec<f64> {
    TaskSpec {
        id: TaskId(id),
        location: Point::new(x, y),
        value,
    }
}

#[allow(clippy::too_many_arguments)]
fn participant(
    id: u32,
    x: f64,
    y: f64,
    radius: f64,
    reputation: f64,
    collective_bid: f64,
    bids: &[(u32, f64)],
) -> Participant<f64> {
    Participant {
        id: ParticipantId(id),
        location: Point::new(x, y),
        interest_radius: radius,
        reputation,
        interest_set: bids.iter().map(|&(t, _)| TaskId(t)).collect(),
        collective_bid,
        per_task_bids: bids.iter().map(|&(t, b)| (TaskId(t), b)).collect(),
    }
}

fn ids(raw: &[u32]) -> Vec<ParticipantId> {
    raw.iter().copied().map(ParticipantId).collect()
}

fn task_ids(raw: &[u32]) -> BTreeSet<TaskId> {
    raw.iter().copied().map(TaskId).collect()
}

/// Two bidders over three tasks; only the first is worth admitting.
///
/// A: tasks {1 (v=3), 2 (v=4)}, collective bid 2, reputation 0.8.
/// B: tasks {2, 3 (v=2)}, collective bid 5, reputation 0.6.
fn two_bidder_campaign() -> Campaign<f64> {
    Campaign::new(
        Area {
            width: 100.0,
            height: 100.0,
        },
        vec![
            task(1, 10.0, 0.0, 3.0),
            task(2, 0.0, 10.0, 4.0),
            task(3, 0.0, 30.0, 2.0),
        ],
        vec![
            participant(1, 0.0, 0.0, 15.0, 0.8, 2.0, &[(1, 3.0), (2, 4.0)]),
            participant(2, 0.0, 20.0, 15.0, 0.6, 5.0, &[(2, 4.0), (3, 1.5)]),
        ],
    )
    .unwrap()
}

/// Task 3 has a lone bidder (C) whose collective bid is too high for the
/// primary stage but clears once redundancy-weighted.
///
/// A: tasks {1 (v=5), 2 (v=5)}, bid 2, reputation 0.9 -> primary winner.
/// B: tasks {1, 2}, bid 3, reputation 0.75 -> loses to A.
/// C: task {3 (v=4)}, bid 6, reputation 0.8, descriptive bid 3.8.
fn lone_bidder_campaign() -> Campaign<f64> {
    Campaign::new(
        Area {
            width: 200.0,
            height: 200.0,
        },
        vec![
            task(1, 10.0, 0.0, 5.0),
            task(2, 0.0, 10.0, 5.0),
            task(3, 100.0, 0.0, 4.0),
        ],
        vec![
            participant(1, 0.0, 0.0, 15.0, 0.9, 2.0, &[(1, 5.0), (2, 5.0)]),
            participant(2, 0.0, 0.0, 15.0, 0.75, 3.0, &[(1, 5.0), (2, 5.0)]),
            participant(3, 100.0, 10.0, 15.0, 0.8, 6.0, &[(3, 3.8)]),
        ],
    )
    .unwrap()
}

#[test]
fn marginal_value_sums_uncovered_interest() {
    let c = two_bidder_campaign();
    let a = ParticipantId(1);
    let b = ParticipantId(2);
    assert_eq!(marginal_value(a, &BTreeSet::new(), &c).unwrap(), 7.0);
    assert_eq!(marginal_value(a, &task_ids(&[1, 2]), &c).unwrap(), 0.0);
    assert_eq!(marginal_value(b, &task_ids(&[2]), &c).unwrap(), 2.0);
    assert!(marginal_value(ParticipantId(9), &BTreeSet::new(), &c).is_err());
}

#[test]
fn primary_selection_admits_only_profitable_bidders() {
    let c = two_bidder_campaign();
    let out = select_primary_winners(&c, ReputationMode::Aware).unwrap();
    // A: score 7 - 2/0.8 = 4.5 admits; B's residual value 2 < 5/0.6 rejects.
    assert_eq!(out.stage.winners, ids(&[1]));
    assert_eq!(out.stage.covered_tasks, task_ids(&[1, 2]));

    assert_eq!(out.trace.len(), 2);
    assert!(out.trace[0].admitted);
    assert_eq!(out.trace[0].participant, ParticipantId(1));
    assert_relative_eq!(out.trace[0].score, 4.5);
    assert!(!out.trace[1].admitted);
    assert_eq!(out.trace[1].participant, ParticipantId(2));
    assert_relative_eq!(out.trace[1].marginal_value, 2.0);
}

#[test]
fn primary_selection_can_reject_everyone() {
    // lone bidder asking more than its tasks are worth
    let c = Campaign::new(
        Area {
            width: 50.0,
            height: 50.0,
        },
        vec![task(1, 0.0, 0.0, 2.0)],
        vec![participant(1, 0.0, 5.0, 10.0, 0.9, 9.0, &[(1, 2.0)])],
    )
    .unwrap();
    let out = select_primary_winners(&c, ReputationMode::Aware).unwrap();
    assert!(out.stage.winners.is_empty());
    assert!(out.stage.covered_tasks.is_empty());
}

#[test]
fn primary_selection_single_profitable_bidder() {
    let c = Campaign::new(
        Area {
            width: 50.0,
            height: 50.0,
        },
        vec![task(1, 0.0, 0.0, 2.0)],
        vec![participant(1, 0.0, 5.0, 10.0, 0.9, 1.0, &[(1, 2.0)])],
    )
    .unwrap();
    let out = select_primary_winners(&c, ReputationMode::Aware).unwrap();
    assert_eq!(out.stage.winners, ids(&[1]));
    assert_eq!(out.stage.covered_tasks, task_ids(&[1]));
}

#[test]
fn critical_payment_prices_against_the_field() {
    let c = two_bidder_campaign();
    let primary = select_primary_winners(&c, ReputationMode::Aware).unwrap();
    let payments =
        compute_payments(&c, &primary.stage, &WinnerStage::default(), ReputationMode::Aware)
            .unwrap();
    // p_A = min{ 7 - (6 - 5/0.6), 7 } = 7
    assert_relative_eq!(payments.amount(ParticipantId(1)), 7.0, max_relative = 1e-12);
    assert_eq!(payments.amount(ParticipantId(2)), 0.0);
}

#[test]
fn winners_only_pool_zeroes_a_sole_winner() {
    let c = two_bidder_campaign();
    let primary = select_primary_winners(&c, ReputationMode::Aware).unwrap();
    let payments = compute_payments_with_pool(
        &c,
        &primary.stage,
        &WinnerStage::default(),
        ReputationMode::Aware,
        PaymentPool::WinnersOnly,
    )
    .unwrap();
    assert_eq!(payments.amount(ParticipantId(1)), 0.0);
}

#[test]
fn payments_empty_without_winners() {
    let c = two_bidder_campaign();
    let payments = compute_payments(
        &c,
        &WinnerStage::default(),
        &WinnerStage::default(),
        ReputationMode::Aware,
    )
    .unwrap();
    assert!(payments.is_empty());
    assert_eq!(payments.total(), 0.0);
}

#[test]
fn sole_participant_pays_zero() {
    let c = Campaign::new(
        Area {
            width: 50.0,
            height: 50.0,
        },
        vec![task(1, 0.0, 0.0, 4.0)],
        vec![participant(1, 0.0, 5.0, 10.0, 0.8, 1.0, &[(1, 4.0)])],
    )
    .unwrap();
    let out = run_mechanism(&c, MechanismKind::TSCM_RA).unwrap();
    assert_eq!(out.primary.winners, ids(&[1]));
    // candidate pool without the winner is empty -> payment loop never runs
    assert_eq!(out.payments.amount(ParticipantId(1)), 0.0);
}

#[test]
fn redundancy_factor_favors_lone_bidders() {
    let c = lone_bidder_campaign();
    // bidder counts: tasks 1, 2 -> 2 bidders; task 3 -> 1 bidder
    assert_relative_eq!(redundancy_factor(ParticipantId(1), &c).unwrap(), 0.5);
    assert_relative_eq!(redundancy_factor(ParticipantId(2), &c).unwrap(), 0.5);
    assert_relative_eq!(redundancy_factor(ParticipantId(3), &c).unwrap(), 0.0);
}

#[test]
fn redundancy_stage_admits_the_boosted_lone_bidder() {
    let c = lone_bidder_campaign();
    let primary = select_primary_winners(&c, ReputationMode::Aware).unwrap();
    assert_eq!(primary.stage.winners, ids(&[1]));
    assert_eq!(primary.stage.covered_tasks, task_ids(&[1, 2]));

    // C's weighted bid halves: 6 / (0.8/0.5) = 3.75 < 4 admits.
    let redundancy =
        select_redundancy_winners(&c, &primary.stage, ReputationMode::Aware).unwrap();
    assert_eq!(redundancy.stage.winners, ids(&[3]));
    assert_eq!(redundancy.stage.covered_tasks, task_ids(&[3]));
    let admitted: Vec<_> = redundancy.trace.iter().filter(|r| r.admitted).collect();
    assert_eq!(admitted.len(), 1);
    assert_relative_eq!(admitted[0].weighted_bid, 3.75, max_relative = 1e-12);
    assert_relative_eq!(admitted[0].marginal_value, 4.0);
}

#[test]
fn redundancy_stage_empty_when_primary_covers_everything() {
    let c = two_bidder_campaign();
    let full = WinnerStage {
        winners: ids(&[1, 2]),
        covered_tasks: task_ids(&[1, 2, 3]),
    };
    let redundancy = select_redundancy_winners(&c, &full, ReputationMode::Aware).unwrap();
    assert!(redundancy.stage.winners.is_empty());
    assert!(redundancy.stage.covered_tasks.is_empty());
}

#[test]
fn secondary_stage_buys_an_uncovered_task() {
    // uncovered {3 (v=2)}; candidate 2 prunes to it with descriptive bid 1.5
    let c = Campaign::new(
        Area {
            width: 100.0,
            height: 100.0,
        },
        vec![
            task(1, 10.0, 0.0, 3.0),
            task(2, 0.0, 10.0, 4.0),
            task(3, 0.0, 30.0, 2.0),
        ],
        vec![
            participant(1, 0.0, 0.0, 15.0, 0.8, 2.0, &[(1, 3.0), (2, 4.0)]),
            participant(2, 0.0, 20.0, 15.0, 0.9, 4.0, &[(2, 4.0), (3, 1.5)]),
        ],
    )
    .unwrap();
    let covered = task_ids(&[1, 2]);
    let excluded: BTreeSet<ParticipantId> = [ParticipantId(1)].into();
    let out =
        select_secondary_winners(&c, &covered, &excluded, 3.0, ReputationMode::Aware).unwrap();

    assert_eq!(out.stage.winners, ids(&[2]));
    assert_eq!(out.assignments[&ParticipantId(2)], vec![TaskId(3)]);
    assert_relative_eq!(out.payments.amount(ParticipantId(2)), 1.5);
    // guard 1.5/0.9 + 0.9*3 = 4.3667 >= 0; budget 3*0.9 - 1.5/0.9
    assert_relative_eq!(out.final_budget, 2.7 - 1.5 / 0.9, max_relative = 1e-12);
    assert_eq!(out.trace.len(), 1);
    assert!(out.trace[0].admitted);
    assert_relative_eq!(
        out.trace[0].budget_guard.unwrap(),
        1.5 / 0.9 + 0.9 * 3.0,
        max_relative = 1e-12
    );
}

#[test]
fn secondary_stage_skips_when_everything_is_covered() {
    let c = two_bidder_campaign();
    let covered = task_ids(&[1, 2, 3]);
    let out = select_secondary_winners(
        &c,
        &covered,
        &BTreeSet::new(),
        5.0,
        ReputationMode::Aware,
    )
    .unwrap();
    assert!(out.stage.winners.is_empty());
    assert_eq!(out.final_budget, 5.0);
    assert!(out.trace.is_empty());
}

#[test]
fn secondary_pruning_drops_emptied_candidates() {
    // two candidates want the same single task; the loser drops out
    let c = Campaign::new(
        Area {
            width: 50.0,
            height: 50.0,
        },
        vec![task(1, 0.0, 0.0, 3.0)],
        vec![
            participant(1, 0.0, 5.0, 10.0, 0.9, 2.0, &[(1, 2.0)]),
            participant(2, 0.0, 4.0, 10.0, 0.9, 2.0, &[(1, 2.5)]),
        ],
    )
    .unwrap();
    let out = select_secondary_winners(
        &c,
        &BTreeSet::new(),
        &BTreeSet::new(),
        10.0,
        ReputationMode::Aware,
    )
    .unwrap();
    // participant 1 scores 3 - 2/0.9 over participant 2's 3 - 2.5/0.9
    assert_eq!(out.stage.winners, ids(&[1]));
    assert_eq!(out.assignments.len(), 1);
    assert_relative_eq!(out.payments.total(), 2.0);
}

#[test]
fn tscm_runs_without_redundancy_or_secondary() {
    let c = lone_bidder_campaign();
    let out = run_mechanism(&c, MechanismKind::TSCM_RA).unwrap();
    assert!(out.redundancy.is_empty());
    assert!(out.secondary.is_empty());
    assert!(out.secondary_assignments.is_empty());
    assert_eq!(out.primary.winners, ids(&[1]));
    assert_eq!(out.covered_tasks, task_ids(&[1, 2]));
    assert_relative_eq!(out.clearance_rate, 2.0 / 3.0);
    assert_relative_eq!(out.payments.total(), 4.0, max_relative = 1e-12);
    // budget = 14 - 4
    assert_relative_eq!(out.remaining_budget, 10.0, max_relative = 1e-12);
    assert!(out.stage_trace.iter().all(|r| r.stage == StageKind::Primary));
}

#[test]
fn rpb_covers_the_lone_task_collectively() {
    let c = lone_bidder_campaign();
    let rpb = run_mechanism(&c, MechanismKind::RPB_RA).unwrap();
    let two_sb = run_mechanism(&c, MechanismKind::TWO_SB_RA).unwrap();

    // RPB picks up task 3 in the redundancy stage at a zero critical payment
    assert_eq!(rpb.redundancy.winners, ids(&[3]));
    assert_eq!(rpb.redundancy.covered_tasks, task_ids(&[3]));
    assert!(rpb.secondary.is_empty());
    assert_relative_eq!(rpb.clearance_rate, 1.0);
    assert_relative_eq!(rpb.payments.total(), 4.0, max_relative = 1e-12);

    // 2SB reaches the same coverage only through the pricier secondary stage
    assert_eq!(two_sb.secondary.winners, ids(&[3]));
    assert_relative_eq!(two_sb.clearance_rate, 1.0);
    assert_relative_eq!(two_sb.payments.total(), 7.8, max_relative = 1e-12);
    assert_relative_eq!(
        two_sb.remaining_budget,
        10.0 * 0.8 - 3.8 / 0.8,
        max_relative = 1e-12
    );

    // the coverage difference at the collective stages is exactly task 3
    let collective_rpb: BTreeSet<TaskId> = rpb
        .primary
        .covered_tasks
        .union(&rpb.redundancy.covered_tasks)
        .copied()
        .collect();
    let diff: BTreeSet<TaskId> = collective_rpb
        .difference(&two_sb.primary.covered_tasks)
        .copied()
        .collect();
    assert_eq!(diff, task_ids(&[3]));
}

#[test]
fn rpb_degenerates_to_tscm_under_full_primary_coverage() {
    let c = Campaign::new(
        Area {
            width: 50.0,
            height: 50.0,
        },
        vec![task(1, 10.0, 0.0, 3.0), task(2, 0.0, 10.0, 4.0)],
        vec![participant(1, 0.0, 0.0, 15.0, 0.8, 2.0, &[(1, 3.0), (2, 4.0)])],
    )
    .unwrap();
    let rpb = run_mechanism(&c, MechanismKind::RPB_RA).unwrap();
    let tscm = run_mechanism(&c, MechanismKind::TSCM_RA).unwrap();
    assert!(rpb.redundancy.is_empty());
    assert!(rpb.secondary.is_empty());
    assert_eq!(rpb.clearance_rate, tscm.clearance_rate);
    assert_eq!(rpb.covered_tasks, tscm.covered_tasks);
}

#[test]
fn unaware_mode_ignores_reputations() {
    let c = two_bidder_campaign();
    let out = run_mechanism(
        &c,
        MechanismKind::new(
            mcs_auctions::mechanism::MechanismFamily::Tscm,
            ReputationMode::Unaware,
        ),
    )
    .unwrap();
    assert_eq!(out.primary.winners, ids(&[1]));
    // p_A = min{ 7 - (6 - 5), 7 } = 6 with unit weights
    assert_relative_eq!(out.payments.amount(ParticipantId(1)), 6.0, max_relative = 1e-12);
}
