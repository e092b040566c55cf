//! Domain types for a sensing campaign: tasks, bidders and their bids.
//!
//! Task and participant ids are dense 1-based indexes; [`Campaign::new`]
//! validates density so the mechanism stages can index by `id - 1`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Identifier of a sensing task, dense in `1..=n_tasks`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct TaskId(pub u32);

/// Identifier of a participant (bidder), dense in `1..=n_participants`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ParticipantId(pub u32);

impl std::fmt::Display for TaskId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for ParticipantId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A position in meters within the campaign area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance_squared(&self, other: &Point<T>) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Campaign area rectangle, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area<T> {
    pub width: T,
    pub height: T,
}

/// One sensing task: where it is and what completing it is worth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec<T> {
    pub id: TaskId,
    pub location: Point<T>,
    pub value: T,
}

/// One bidder: location, trust score and the bids it submits.
///
/// `interest_set` is kept sorted by task id; `per_task_bids` has exactly
/// the interest set as its domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant<T> {
    pub id: ParticipantId,
    pub location: Point<T>,
    pub interest_radius: T,
    pub reputation: T,
    pub interest_set: Vec<TaskId>,
    pub collective_bid: T,
    pub per_task_bids: BTreeMap<TaskId, T>,
}

impl<T: Real> Participant<T> {
    /// Sum of the per-task (descriptive) bids over the interest set.
    pub fn sum_descriptive_bids(&self) -> T {
        self.per_task_bids.values().copied().sum()
    }
}

/// One auction instance: the area, its tasks, its bidders, and how many
/// bidders each task attracted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign<T> {
    pub area: Area<T>,
    pub tasks: Vec<TaskSpec<T>>,
    pub participants: Vec<Participant<T>>,
    /// Task id -> number of participants whose interest set contains it.
    /// Holds an entry for every task, including zero-bidder tasks.
    pub bidder_counts: BTreeMap<TaskId, u32>,
}

impl<T: Real> Campaign<T> {
    /// Builds a campaign from parts, sorting tasks and participants by id,
    /// validating the structural invariants and computing `bidder_counts`.
    pub fn new(
        area: Area<T>,
        mut tasks: Vec<TaskSpec<T>>,
        mut participants: Vec<Participant<T>>,
    ) -> Result<Self> {
        tasks.sort_by_key(|t| t.id);
        participants.sort_by_key(|p| p.id);
        let counts = bidder_counts(&participants, tasks.len() as u32)?;
        let campaign = Self {
            area,
            tasks,
            participants,
            bidder_counts: counts,
        };
        campaign.validate()?;
        Ok(campaign)
    }

    /// Checks every structural invariant. Useful after deserializing.
    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::InvalidCampaign("campaign has no tasks".into()));
        }
        if !(self.area.width > T::zero() && self.area.height > T::zero()) {
            return Err(Error::InvalidCampaign("area dimensions must be positive".into()));
        }
        for (k, task) in self.tasks.iter().enumerate() {
            if task.id.0 as usize != k + 1 {
                return Err(Error::InvalidCampaign(format!(
                    "task ids must be dense and sorted: position {} holds id {}",
                    k, task.id
                )));
            }
            if !(task.value > T::zero() && task.value.is_finite()) {
                return Err(Error::InvalidCampaign(format!(
                    "task {} has non-positive value",
                    task.id
                )));
            }
        }
        let n_tasks = self.tasks.len() as u32;
        for (k, p) in self.participants.iter().enumerate() {
            if p.id.0 as usize != k + 1 {
                return Err(Error::InvalidCampaign(format!(
                    "participant ids must be dense and sorted: position {} holds id {}",
                    k, p.id
                )));
            }
            if p.interest_set.is_empty() {
                return Err(Error::EmptyInterestSet(p.id));
            }
            if !(p.reputation > T::zero() && p.reputation <= T::one()) {
                return Err(Error::InvalidCampaign(format!(
                    "participant {} reputation {} outside (0, 1]",
                    p.id, p.reputation
                )));
            }
            if !(p.collective_bid > T::zero() && p.collective_bid.is_finite()) {
                return Err(Error::InvalidCampaign(format!(
                    "participant {} collective bid must be positive",
                    p.id
                )));
            }
            let mut prev: Option<TaskId> = None;
            for &t in &p.interest_set {
                if t.0 == 0 || t.0 > n_tasks {
                    return Err(Error::UnknownTask(t));
                }
                if prev.is_some_and(|q| q >= t) {
                    return Err(Error::InvalidCampaign(format!(
                        "participant {} interest set not strictly ascending",
                        p.id
                    )));
                }
                prev = Some(t);
                let task = &self.tasks[(t.0 - 1) as usize];
                let r2 = p.interest_radius * p.interest_radius;
                if p.location.distance_squared(&task.location) > r2 {
                    return Err(Error::InvalidCampaign(format!(
                        "participant {} lists task {} outside its interest radius",
                        p.id, t
                    )));
                }
            }
            if p.per_task_bids.len() != p.interest_set.len()
                || !p.interest_set.iter().all(|t| p.per_task_bids.contains_key(t))
            {
                return Err(Error::InvalidCampaign(format!(
                    "participant {} per-task bids must cover exactly its interest set",
                    p.id
                )));
            }
            if p.per_task_bids.values().any(|b| !(*b > T::zero() && b.is_finite())) {
                return Err(Error::InvalidCampaign(format!(
                    "participant {} has a non-positive per-task bid",
                    p.id
                )));
            }
        }
        let recomputed = bidder_counts(&self.participants, n_tasks)?;
        if recomputed != self.bidder_counts {
            return Err(Error::InvalidCampaign(
                "stored bidder_counts disagree with participants".into(),
            ));
        }
        Ok(())
    }

    pub fn n_tasks(&self) -> u32 {
        self.tasks.len() as u32
    }

    pub fn n_participants(&self) -> u32 {
        self.participants.len() as u32
    }

    /// Total value of all campaign tasks.
    pub fn total_value(&self) -> T {
        self.tasks.iter().map(|t| t.value).sum()
    }

    pub fn task(&self, id: TaskId) -> Result<&TaskSpec<T>> {
        let idx = id.0.checked_sub(1).ok_or(Error::UnknownTask(id))? as usize;
        self.tasks.get(idx).ok_or(Error::UnknownTask(id))
    }

    pub fn participant(&self, id: ParticipantId) -> Result<&Participant<T>> {
        let idx = id.0.checked_sub(1).ok_or(Error::UnknownParticipant(id))? as usize;
        self.participants.get(idx).ok_or(Error::UnknownParticipant(id))
    }

    /// Ids of tasks with at least one bidder.
    pub fn reachable_tasks(&self) -> BTreeSet<TaskId> {
        self.bidder_counts
            .iter()
            .filter(|(_, &c)| c >= 1)
            .map(|(&t, _)| t)
            .collect()
    }
}

/// Ids of all tasks within `radius` (inclusive) of `location`, sorted by id.
pub fn interest_set<T: Real>(location: Point<T>, radius: T, tasks: &[TaskSpec<T>]) -> Vec<TaskId> {
    let r2 = radius * radius;
    let mut ids: Vec<TaskId> = tasks
        .iter()
        .filter(|t| location.distance_squared(&t.location) <= r2)
        .map(|t| t.id)
        .collect();
    ids.sort_unstable();
    ids
}

/// Number of bidders per task over the given participants. Every task id in
/// `1..=n_tasks` gets an entry, zero-bidder tasks included.
pub fn bidder_counts<T: Real>(
    participants: &[Participant<T>],
    n_tasks: u32,
) -> Result<BTreeMap<TaskId, u32>> {
    let mut counts: BTreeMap<TaskId, u32> =
        (1..=n_tasks).map(|j| (TaskId(j), 0)).collect();
    for p in participants {
        for &t in &p.interest_set {
            match counts.get_mut(&t) {
                Some(c) => *c += 1,
                None => return Err(Error::UnknownTask(t)),
            }
        }
    }
    Ok(counts)
}
