//! The auction pipeline: greedy winner selection, redundancy-weighted
//! selection, critical payments, and budget-bounded secondary assignment.
//!
//! Three mechanism families are composed from the same four stages:
//!
//! * `TSCM`: primary selection + payments.
//! * `2SB`: primary selection + payments + secondary assignment.
//! * `RPB`: primary selection + redundancy selection + payments (both
//!   loops) + secondary assignment.
//!
//! Each family runs reputation-aware (`RA`) or reputation-unaware (`RU`,
//! every reputation treated as 1).

mod payment;
mod select;

pub use payment::{compute_payments, compute_payments_with_pool, PaymentPool};
pub use select::{select_primary_winners, select_redundancy_winners, select_secondary_winners};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Campaign, ParticipantId, TaskId};
use crate::scalar::Real;

/// Whether bids are divided by the bidder's reputation or taken as-is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReputationMode {
    /// Reputation-aware: scores use `b / r_i`.
    #[serde(rename = "RA")]
    Aware,
    /// Reputation-unaware: every `r_i` is treated as 1.
    #[serde(rename = "RU")]
    Unaware,
}

impl fmt::Display for ReputationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReputationMode::Aware => "RA",
            ReputationMode::Unaware => "RU",
        })
    }
}

/// Which stages the auction runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MechanismFamily {
    /// Primary winners and their payments only.
    Tscm,
    /// Primary winners, payments, then descriptive-bid secondary winners.
    TwoStageBidding,
    /// Full pipeline with the redundancy-penalizing stage.
    RedundancyPenalizing,
}

impl fmt::Display for MechanismFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MechanismFamily::Tscm => "TSCM",
            MechanismFamily::TwoStageBidding => "2SB",
            MechanismFamily::RedundancyPenalizing => "RPB",
        })
    }
}

/// A mechanism family plus its reputation mode, e.g. `RPB-RA`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MechanismKind {
    pub family: MechanismFamily,
    pub mode: ReputationMode,
}

impl MechanismKind {
    pub const TSCM_RA: Self = Self::new(MechanismFamily::Tscm, ReputationMode::Aware);
    pub const TWO_SB_RA: Self = Self::new(MechanismFamily::TwoStageBidding, ReputationMode::Aware);
    pub const RPB_RA: Self = Self::new(MechanismFamily::RedundancyPenalizing, ReputationMode::Aware);

    pub const fn new(family: MechanismFamily, mode: ReputationMode) -> Self {
        Self { family, mode }
    }

    pub fn has_redundancy_stage(&self) -> bool {
        self.family == MechanismFamily::RedundancyPenalizing
    }

    pub fn has_secondary_stage(&self) -> bool {
        self.family != MechanismFamily::Tscm
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.family, self.mode)
    }
}

impl FromStr for MechanismKind {
    type Err = Error;

    /// Parses `TSCM-RA`, `2sb-ru`, `RPB` (bare family defaults to RA), ...
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let (family_str, mode_str) = match upper.split_once('-') {
            Some((f, m)) => (f.to_string(), m.to_string()),
            None => (upper.clone(), "RA".to_string()),
        };
        let family = match family_str.as_str() {
            "TSCM" => MechanismFamily::Tscm,
            "2SB" => MechanismFamily::TwoStageBidding,
            "RPB" => MechanismFamily::RedundancyPenalizing,
            _ => {
                return Err(Error::InvalidParams {
                    field: "mechanism",
                    reason: format!("unknown mechanism family in `{s}`"),
                })
            }
        };
        let mode = match mode_str.as_str() {
            "RA" => ReputationMode::Aware,
            "RU" => ReputationMode::Unaware,
            _ => {
                return Err(Error::InvalidParams {
                    field: "mechanism",
                    reason: format!("unknown reputation mode in `{s}` (use RA or RU)"),
                })
            }
        };
        Ok(Self { family, mode })
    }
}

impl Serialize for MechanismKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MechanismKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which selection loop produced a trace record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    Primary,
    Redundancy,
    Secondary,
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageKind::Primary => "primary",
            StageKind::Redundancy => "redundancy",
            StageKind::Secondary => "secondary",
        })
    }
}

/// One greedy selection decision: the argmax pick of a round and whether
/// its admission guard held.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord<T> {
    pub stage: StageKind,
    pub participant: ParticipantId,
    /// Objective at selection time: marginal value minus weighted bid.
    pub score: T,
    /// Marginal value of the pick over the tasks covered so far.
    pub marginal_value: T,
    /// Bid divided by the stage weight (reputation, redundancy-reputation,
    /// or reputation over the pruned descriptive sum).
    pub weighted_bid: T,
    /// Secondary stage only: the budget feasibility quantity compared to 0.
    pub budget_guard: Option<T>,
    pub admitted: bool,
}

/// Winners of one selection stage, in admission order, plus the tasks the
/// stage added to the covered set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinnerStage {
    pub winners: Vec<ParticipantId>,
    pub covered_tasks: BTreeSet<TaskId>,
}

impl WinnerStage {
    pub fn contains(&self, id: ParticipantId) -> bool {
        self.winners.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.winners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.winners.is_empty()
    }
}

/// A selection stage result together with its decision trace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectionOutcome<T> {
    pub stage: WinnerStage,
    pub trace: Vec<TraceRecord<T>>,
}

/// Payments keyed by participant; anyone absent is paid zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaymentTable<T> {
    payments: BTreeMap<ParticipantId, T>,
}

impl<T> Default for PaymentTable<T> {
    fn default() -> Self {
        Self {
            payments: BTreeMap::new(),
        }
    }
}

impl<T: Real> PaymentTable<T> {
    pub fn amount(&self, id: ParticipantId) -> T {
        self.payments.get(&id).copied().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.payments.values().copied().sum()
    }

    pub fn set(&mut self, id: ParticipantId, amount: T) {
        self.payments.insert(id, amount);
    }

    /// Folds another table in, adding amounts for shared ids.
    pub fn merge(&mut self, other: &PaymentTable<T>) {
        for (&id, &amount) in &other.payments {
            let entry = self.payments.entry(id).or_insert_with(T::zero);
            *entry = *entry + amount;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParticipantId, T)> + '_ {
        self.payments.iter().map(|(&id, &p)| (id, p))
    }

    pub fn is_empty(&self) -> bool {
        self.payments.is_empty()
    }
}

/// Secondary stage result: winners with their assigned task lists, the
/// descriptive payments issued, and the budget left after the recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryOutcome<T> {
    pub stage: WinnerStage,
    pub assignments: BTreeMap<ParticipantId, Vec<TaskId>>,
    pub payments: PaymentTable<T>,
    pub final_budget: T,
    pub trace: Vec<TraceRecord<T>>,
}

impl<T: Real> SecondaryOutcome<T> {
    pub fn empty(budget: T) -> Self {
        Self {
            stage: WinnerStage::default(),
            assignments: BTreeMap::new(),
            payments: PaymentTable::default(),
            final_budget: budget,
            trace: Vec::new(),
        }
    }
}

/// The full result of running one mechanism on one campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome<T> {
    pub mechanism: MechanismKind,
    pub primary: WinnerStage,
    pub redundancy: WinnerStage,
    pub secondary: WinnerStage,
    /// Secondary winners' task lists; pairwise disjoint by construction.
    pub secondary_assignments: BTreeMap<ParticipantId, Vec<TaskId>>,
    pub payments: PaymentTable<T>,
    /// Union of the three stages' covered tasks.
    pub covered_tasks: BTreeSet<TaskId>,
    /// `|covered_tasks| / n_tasks`.
    pub clearance_rate: T,
    /// Budget left after all stages (total value minus payments, then the
    /// secondary stage's budget recursion).
    pub remaining_budget: T,
    /// Total value of all campaign tasks.
    pub total_value: T,
    pub stage_trace: Vec<TraceRecord<T>>,
}

/// Marginal value of a participant: the summed value of its interest-set
/// tasks not yet covered. Serves all three stages; reputation and
/// redundancy enter only through bid weighting.
pub fn marginal_value<T: Real>(
    id: ParticipantId,
    covered: &BTreeSet<TaskId>,
    campaign: &Campaign<T>,
) -> Result<T> {
    let p = campaign.participant(id)?;
    let mut sum = T::zero();
    for &t in &p.interest_set {
        if !covered.contains(&t) {
            sum = sum + campaign.task(t)?.value;
        }
    }
    Ok(sum)
}

/// Redundancy factor `d = 1 - max over the interest set of 1/|bidders|`.
/// Zero when the participant holds a task nobody else bids on.
pub fn redundancy_factor<T: Real>(id: ParticipantId, campaign: &Campaign<T>) -> Result<T> {
    let p = campaign.participant(id)?;
    if p.interest_set.is_empty() {
        return Err(Error::EmptyInterestSet(id));
    }
    let mut max_recip = T::zero();
    for &t in &p.interest_set {
        let count = campaign
            .bidder_counts
            .get(&t)
            .copied()
            .ok_or(Error::UnknownTask(t))?;
        if count == 0 {
            return Err(Error::InvalidCampaign(format!(
                "task {t} has an interested participant but a zero bidder count"
            )));
        }
        let recip = T::one() / T::from_count(count as usize);
        if recip > max_recip {
            max_recip = recip;
        }
    }
    Ok(T::one() - max_recip)
}

/// Affine map of the raw redundancy factor from `[0, 1)` onto `[0.5, 1]`,
/// keeping it in the same band as reputations and away from zero.
pub fn map_redundancy<T: Real>(d: T) -> Result<T> {
    if !(d >= T::zero() && d < T::one()) {
        return Err(Error::OutOfDomain {
            what: "redundancy factor",
            value: d.to_f64_lossy(),
        });
    }
    let half = T::from_f64_lossy(0.5);
    Ok(half + half * d)
}

/// Redundancy-reputation factor `u = r / d_mapped`: boosts holders of
/// unpopular tasks.
pub fn redundancy_reputation_factor<T: Real>(reputation: T, d_mapped: T) -> T {
    reputation / d_mapped
}

/// Budget identity: total task value minus the payments issued so far.
pub fn remaining_budget<T: Real>(total_value: T, payments: &PaymentTable<T>) -> T {
    total_value - payments.total()
}

/// Effective per-participant reputations for a mode, indexed by `id - 1`.
pub(crate) fn effective_reputations<T: Real>(
    campaign: &Campaign<T>,
    mode: ReputationMode,
) -> Vec<T> {
    campaign
        .participants
        .iter()
        .map(|p| match mode {
            ReputationMode::Aware => p.reputation,
            ReputationMode::Unaware => T::one(),
        })
        .collect()
}

/// Redundancy-reputation weights for every participant, indexed by `id - 1`.
pub(crate) fn redundancy_weights<T: Real>(
    campaign: &Campaign<T>,
    reputations: &[T],
) -> Result<Vec<T>> {
    campaign
        .participants
        .iter()
        .zip(reputations)
        .map(|(p, &r)| {
            let d = redundancy_factor(p.id, campaign)?;
            let mapped = map_redundancy(d)?;
            Ok(redundancy_reputation_factor(r, mapped))
        })
        .collect()
}

/// Runs the configured stages on a campaign and assembles the outcome.
pub fn run_mechanism<T: Real>(
    campaign: &Campaign<T>,
    kind: MechanismKind,
) -> Result<AuctionOutcome<T>> {
    let total_value = campaign.total_value();

    let primary = select_primary_winners(campaign, kind.mode)?;
    let redundancy = if kind.has_redundancy_stage() {
        select_redundancy_winners(campaign, &primary.stage, kind.mode)?
    } else {
        SelectionOutcome::default()
    };

    let mut payments = compute_payments(campaign, &primary.stage, &redundancy.stage, kind.mode)?;
    let budget = remaining_budget(total_value, &payments);

    let mut covered: BTreeSet<TaskId> = primary.stage.covered_tasks.clone();
    covered.extend(redundancy.stage.covered_tasks.iter().copied());

    let secondary = if kind.has_secondary_stage() {
        let excluded: BTreeSet<ParticipantId> = primary
            .stage
            .winners
            .iter()
            .chain(redundancy.stage.winners.iter())
            .copied()
            .collect();
        select_secondary_winners(campaign, &covered, &excluded, budget, kind.mode)?
    } else {
        SecondaryOutcome::empty(budget)
    };
    payments.merge(&secondary.payments);
    covered.extend(secondary.stage.covered_tasks.iter().copied());

    let clearance_rate =
        T::from_count(covered.len()) / T::from_count(campaign.n_tasks() as usize);

    let mut stage_trace = primary.trace;
    stage_trace.extend(redundancy.trace);
    stage_trace.extend(secondary.trace.iter().copied());

    Ok(AuctionOutcome {
        mechanism: kind,
        primary: primary.stage,
        redundancy: redundancy.stage,
        secondary: secondary.stage,
        secondary_assignments: secondary.assignments,
        payments,
        covered_tasks: covered,
        clearance_rate,
        remaining_budget: secondary.final_budget,
        total_value,
        stage_trace,
    })
}
