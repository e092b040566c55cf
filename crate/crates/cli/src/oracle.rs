//! Straight-line reference implementation of the four auction stages.
//!
//! This module re-implements the selection and payment procedures directly
//! over plain vectors, sharing no code with `mcs_auctions::mechanism`, and
//! is used to cross-check winner sets and payments exactly (bit for bit)
//! on small campaigns. Keep it dumb: no masks, no shared greedy helper, no
//! early-out tricks beyond what the procedures themselves state.

// The loops below spell out every guard and accumulation of the reference
// procedures literally, so the usual tidier idioms are off the table.
#![allow(clippy::assign_op_pattern)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use mcs_auctions::generate::{generate_campaign, GeneratorParams};
use mcs_auctions::mechanism::{run_mechanism, MechanismFamily, MechanismKind, ReputationMode};
use mcs_auctions::model::Campaign;
use mcs_auctions::seed::splitmix64;

/// Winner sets, payments and budget as computed by the reference procedures.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceOutcome {
    /// Primary winner ids in admission order.
    pub primary: Vec<u32>,
    /// Redundancy winner ids in admission order.
    pub redundancy: Vec<u32>,
    /// Secondary winner ids in admission order.
    pub secondary: Vec<u32>,
    /// Secondary winner id -> assigned task ids.
    pub assignments: BTreeMap<u32, Vec<u32>>,
    /// Winner id -> payment, winners of any stage only.
    pub payments: BTreeMap<u32, f64>,
    /// Covered task ids, ascending.
    pub covered: Vec<u32>,
    pub final_budget: f64,
    pub clearance_rate: f64,
}

struct Flat {
    n: usize,
    m: usize,
    values: Vec<f64>,          // task value by 0-based index
    interest: Vec<Vec<usize>>, // per participant, ascending task indexes
    collective: Vec<f64>,
    descriptive: Vec<Vec<(usize, f64)>>, // ascending (task index, bid)
    reputation: Vec<f64>,                // effective for the mode
}

fn flatten(campaign: &Campaign<f64>, mode: ReputationMode) -> Flat {
    Flat {
        n: campaign.participants.len(),
        m: campaign.tasks.len(),
        values: campaign.tasks.iter().map(|t| t.value).collect(),
        interest: campaign
            .participants
            .iter()
            .map(|p| p.interest_set.iter().map(|t| (t.0 - 1) as usize).collect())
            .collect(),
        collective: campaign.participants.iter().map(|p| p.collective_bid).collect(),
        descriptive: campaign
            .participants
            .iter()
            .map(|p| {
                p.per_task_bids
                    .iter()
                    .map(|(t, &b)| ((t.0 - 1) as usize, b))
                    .collect()
            })
            .collect(),
        reputation: campaign
            .participants
            .iter()
            .map(|p| match mode {
                ReputationMode::Aware => p.reputation,
                ReputationMode::Unaware => 1.0,
            })
            .collect(),
    }
}

fn value_over_uncovered(flat: &Flat, i: usize, covered: &[bool]) -> f64 {
    let mut sum = 0.0;
    for &t in &flat.interest[i] {
        if !covered[t] {
            sum = sum + flat.values[t];
        }
    }
    sum
}

/// Stage one: greedy primary selection with reputation-weighted bids.
fn primary_winners(flat: &Flat, covered: &mut [bool]) -> Vec<usize> {
    let mut s: Vec<usize> = Vec::new();
    loop {
        let mut h: Option<usize> = None;
        let mut h_score = 0.0;
        for i in 0..flat.n {
            if s.contains(&i) {
                continue;
            }
            let score = value_over_uncovered(flat, i, covered) - flat.collective[i] / flat.reputation[i];
            if h.is_none() || score > h_score {
                h = Some(i);
                h_score = score;
            }
        }
        let Some(h) = h else { break };
        if !(flat.collective[h] / flat.reputation[h] < value_over_uncovered(flat, h, covered)) {
            break;
        }
        s.push(h);
        for &t in &flat.interest[h] {
            covered[t] = true;
        }
    }
    s
}

/// The redundancy-reputation weights: reputation over the affine-mapped
/// redundancy factor, recounting bidders from scratch.
fn redundancy_reputation(flat: &Flat) -> Vec<f64> {
    let mut counts = vec![0u32; flat.m];
    for i in 0..flat.n {
        for &t in &flat.interest[i] {
            counts[t] += 1;
        }
    }
    (0..flat.n)
        .map(|i| {
            let mut max_recip = 0.0;
            for &t in &flat.interest[i] {
                let recip = 1.0 / counts[t] as f64;
                if recip > max_recip {
                    max_recip = recip;
                }
            }
            let d = 1.0 - max_recip;
            let mapped = 0.5 + 0.5 * d;
            flat.reputation[i] / mapped
        })
        .collect()
}

/// Stage two: the same loop with redundancy-reputation weights, continuing
/// over the already-covered tasks; primary winners are eligible during the
/// loop and removed from the result at the end.
fn redundancy_winners(flat: &Flat, primary: &[usize], covered: &mut [bool]) -> Vec<usize> {
    let u = redundancy_reputation(flat);
    let mut sr: Vec<usize> = Vec::new();
    loop {
        let mut h: Option<usize> = None;
        let mut h_score = 0.0;
        for i in 0..flat.n {
            if sr.contains(&i) {
                continue;
            }
            let score = value_over_uncovered(flat, i, covered) - flat.collective[i] / u[i];
            if h.is_none() || score > h_score {
                h = Some(i);
                h_score = score;
            }
        }
        let Some(h) = h else { break };
        if !(flat.collective[h] / u[h] < value_over_uncovered(flat, h, covered)) {
            break;
        }
        sr.push(h);
        for &t in &flat.interest[h] {
            covered[t] = true;
        }
    }
    sr.retain(|i| !primary.contains(i));
    sr
}

/// One winner's payment: replay the greedy run over the given candidate
/// pool and keep the best capped step offer.
fn winner_payment(flat: &Flat, i: usize, pool: &[usize], weights: &[f64]) -> f64 {
    let mut p = 0.0;
    if pool.is_empty() {
        return p;
    }
    let mut theta: Vec<usize> = Vec::new();
    let mut theta_tasks = vec![false; flat.m];
    loop {
        let mut q: Option<usize> = None;
        let mut q_score = 0.0;
        for &cand in pool {
            if theta.contains(&cand) {
                continue;
            }
            let score =
                value_over_uncovered(flat, cand, &theta_tasks) - flat.collective[cand] / weights[cand];
            if q.is_none() || score > q_score {
                q = Some(cand);
                q_score = score;
            }
        }
        let q = q.expect("pool not exhausted inside the loop");
        let v_q = value_over_uncovered(flat, q, &theta_tasks);
        let wbid_q = flat.collective[q] / weights[q];
        let v_i = value_over_uncovered(flat, i, &theta_tasks);
        let offer = (v_i - (v_q - wbid_q)).min(v_i);
        if offer > p {
            p = offer;
        }
        theta.push(q);
        for &t in &flat.interest[q] {
            theta_tasks[t] = true;
        }
        if wbid_q >= v_q || theta.len() == pool.len() {
            break;
        }
    }
    p
}

/// Stage three: payments for primary winners against everyone else, then for
/// redundancy winners against everyone outside the primary set.
fn winners_payments(
    flat: &Flat,
    primary: &[usize],
    redundancy: &[usize],
) -> BTreeMap<usize, f64> {
    let mut payments = BTreeMap::new();
    for &i in primary {
        let pool: Vec<usize> = (0..flat.n).filter(|&q| q != i).collect();
        payments.insert(i, winner_payment(flat, i, &pool, &flat.reputation));
    }
    if !redundancy.is_empty() {
        let u = redundancy_reputation(flat);
        for &i in redundancy {
            let pool: Vec<usize> = (0..flat.n)
                .filter(|&q| q != i && !primary.contains(&q))
                .collect();
            payments.insert(i, winner_payment(flat, i, &pool, &u));
        }
    }
    payments
}

/// Stage four: secondary selection and payment over pruned descriptive bids.
#[allow(clippy::type_complexity)]
fn secondary_winners(
    flat: &Flat,
    excluded: &[usize],
    covered: &mut [bool],
    mut budget: f64,
) -> (Vec<usize>, BTreeMap<usize, Vec<usize>>, BTreeMap<usize, f64>, f64) {
    let mut winners: Vec<usize> = Vec::new();
    let mut assignments: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut payments: BTreeMap<usize, f64> = BTreeMap::new();
    if covered.iter().all(|&c| c) {
        return (winners, assignments, payments, budget);
    }
    let mut lists: Vec<Option<Vec<usize>>> = (0..flat.n)
        .map(|i| {
            if excluded.contains(&i) {
                return None;
            }
            let list: Vec<usize> = flat.interest[i]
                .iter()
                .copied()
                .filter(|&t| !covered[t])
                .collect();
            if list.is_empty() {
                None
            } else {
                Some(list)
            }
        })
        .collect();

    loop {
        if covered.iter().all(|&c| c) {
            break;
        }
        let mut h: Option<usize> = None;
        let mut h_score = 0.0;
        let mut h_bid = 0.0;
        for i in 0..flat.n {
            let Some(list) = &lists[i] else { continue };
            let mut value = 0.0;
            for &t in list {
                value = value + flat.values[t];
            }
            let mut bid = 0.0;
            for &t in list {
                let b = flat.descriptive[i]
                    .iter()
                    .find(|&&(bt, _)| bt == t)
                    .expect("descriptive bid exists for every interest task")
                    .1;
                bid = bid + b;
            }
            let score = value - bid / flat.reputation[i];
            if h.is_none() || score > h_score {
                h = Some(i);
                h_score = score;
                h_bid = bid;
            }
        }
        let Some(h) = h else { break };
        let wbid = h_bid / flat.reputation[h];
        if !(wbid + flat.reputation[h] * budget >= 0.0) {
            break;
        }
        let list = lists[h].take().expect("winner has a pruned list");
        for &t in &list {
            covered[t] = true;
        }
        winners.push(h);
        assignments.insert(h, list);
        payments.insert(h, h_bid);
        budget = budget * flat.reputation[h] - wbid;
        for entry in lists.iter_mut() {
            if let Some(l) = entry {
                l.retain(|&t| !covered[t]);
                if l.is_empty() {
                    *entry = None;
                }
            }
        }
    }
    (winners, assignments, payments, budget)
}

/// Runs the reference procedures composed per the mechanism family.
pub fn reference_outcome(campaign: &Campaign<f64>, kind: MechanismKind) -> ReferenceOutcome {
    let flat = flatten(campaign, kind.mode);
    let mut covered = vec![false; flat.m];

    let primary = primary_winners(&flat, &mut covered);
    let redundancy = if kind.family == MechanismFamily::RedundancyPenalizing {
        redundancy_winners(&flat, &primary, &mut covered)
    } else {
        Vec::new()
    };

    let mut payments = winners_payments(&flat, &primary, &redundancy);

    let mut total_value = 0.0;
    for &v in &flat.values {
        total_value = total_value + v;
    }
    let mut paid = 0.0;
    for &p in payments.values() {
        paid = paid + p;
    }
    let budget = total_value - paid;

    let (secondary, assignments, secondary_payments, final_budget) =
        if kind.family == MechanismFamily::Tscm {
            (Vec::new(), BTreeMap::new(), BTreeMap::new(), budget)
        } else {
            let excluded: Vec<usize> = primary.iter().chain(redundancy.iter()).copied().collect();
            secondary_winners(&flat, &excluded, &mut covered, budget)
        };
    for (&i, &p) in &secondary_payments {
        *payments.entry(i).or_insert(0.0) += p;
    }

    let covered_count = covered.iter().filter(|&&c| c).count();
    ReferenceOutcome {
        primary: primary.iter().map(|&i| i as u32 + 1).collect(),
        redundancy: redundancy.iter().map(|&i| i as u32 + 1).collect(),
        secondary: secondary.iter().map(|&i| i as u32 + 1).collect(),
        assignments: assignments
            .into_iter()
            .map(|(i, ts)| (i as u32 + 1, ts.into_iter().map(|t| t as u32 + 1).collect()))
            .collect(),
        payments: payments.into_iter().map(|(i, p)| (i as u32 + 1, p)).collect(),
        covered: covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(t, _)| t as u32 + 1)
            .collect(),
        final_budget,
        clearance_rate: covered_count as f64 / flat.m as f64,
    }
}

/// Mechanism kinds the equivalence suite exercises.
pub const SUITE_KINDS: [MechanismKind; 4] = [
    MechanismKind::new(MechanismFamily::Tscm, ReputationMode::Aware),
    MechanismKind::new(MechanismFamily::TwoStageBidding, ReputationMode::Aware),
    MechanismKind::new(MechanismFamily::RedundancyPenalizing, ReputationMode::Aware),
    MechanismKind::new(MechanismFamily::RedundancyPenalizing, ReputationMode::Unaware),
];

/// Compares the mechanism pipeline against the reference on one campaign.
/// Winner sets and payments must match exactly.
pub fn check_campaign(campaign: &Campaign<f64>, kind: MechanismKind) -> Result<(), String> {
    let actual = run_mechanism(campaign, kind).map_err(|e| e.to_string())?;
    let expected = reference_outcome(campaign, kind);

    let actual_primary: Vec<u32> = actual.primary.winners.iter().map(|p| p.0).collect();
    if actual_primary != expected.primary {
        return Err(format!(
            "primary winners differ: {actual_primary:?} vs reference {:?}",
            expected.primary
        ));
    }
    let actual_redundancy: Vec<u32> = actual.redundancy.winners.iter().map(|p| p.0).collect();
    if actual_redundancy != expected.redundancy {
        return Err(format!(
            "redundancy winners differ: {actual_redundancy:?} vs reference {:?}",
            expected.redundancy
        ));
    }
    let actual_secondary: Vec<u32> = actual.secondary.winners.iter().map(|p| p.0).collect();
    if actual_secondary != expected.secondary {
        return Err(format!(
            "secondary winners differ: {actual_secondary:?} vs reference {:?}",
            expected.secondary
        ));
    }
    let actual_assignments: BTreeMap<u32, Vec<u32>> = actual
        .secondary_assignments
        .iter()
        .map(|(p, ts)| (p.0, ts.iter().map(|t| t.0).collect()))
        .collect();
    if actual_assignments != expected.assignments {
        return Err(format!(
            "secondary assignments differ: {actual_assignments:?} vs reference {:?}",
            expected.assignments
        ));
    }
    let actual_payments: BTreeMap<u32, f64> =
        actual.payments.iter().map(|(p, amount)| (p.0, amount)).collect();
    if actual_payments != expected.payments {
        return Err(format!(
            "payments differ: {actual_payments:?} vs reference {:?}",
            expected.payments
        ));
    }
    let actual_covered: Vec<u32> = actual.covered_tasks.iter().map(|t| t.0).collect();
    if actual_covered != expected.covered {
        return Err(format!(
            "covered tasks differ: {actual_covered:?} vs reference {:?}",
            expected.covered
        ));
    }
    if actual.remaining_budget != expected.final_budget {
        return Err(format!(
            "final budget differs: {} vs reference {}",
            actual.remaining_budget, expected.final_budget
        ));
    }
    if actual.clearance_rate != expected.clearance_rate {
        return Err(format!(
            "clearance rate differs: {} vs reference {}",
            actual.clearance_rate, expected.clearance_rate
        ));
    }
    Ok(())
}

/// Outcome of an equivalence run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub campaigns: u32,
    pub comparisons: u32,
}

/// Generates `campaigns` random small campaigns (at most 6 participants and
/// 6 tasks) and checks every suite mechanism on each. Returns the first
/// mismatch as an error string naming the campaign.
pub fn run_equivalence_suite(campaigns: u32, master_seed: u64) -> Result<SuiteReport, String> {
    let mut comparisons = 0;
    for case in 0..campaigns {
        let mut s = splitmix64(master_seed ^ case as u64);
        let mut next = || {
            s = splitmix64(s);
            s
        };
        let params = GeneratorParams::<f64> {
            area_width: 60.0 + (next() % 141) as f64,
            area_height: 60.0 + (next() % 141) as f64,
            n_participants: 1 + (next() % 6) as u32,
            n_tasks: 1 + (next() % 6) as u32,
            interest_radius: 20.0 + (next() % 41) as f64,
            seed: next(),
            ..Default::default()
        };
        let campaign = generate_campaign(&params)
            .map_err(|e| format!("campaign {case}: generation failed: {e}"))?;
        for kind in SUITE_KINDS {
            check_campaign(&campaign, kind)
                .map_err(|e| format!("campaign {case} ({kind}): {e}"))?;
            comparisons += 1;
        }
    }
    Ok(SuiteReport {
        campaigns,
        comparisons,
    })
}
