//! Seeded random campaign generation.
//!
//! Placement is i.i.d. uniform over the area for tasks and participants.
//! Every entity draws from its own SplitMix64-derived sub-stream (tasks
//! first, then participants), so changing the participant count never moves
//! the tasks. All sampling happens in f64 and is cast to the scalar type
//! once, making generation a pure function of the parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{interest_set, Area, Campaign, Participant, ParticipantId, Point, TaskId, TaskSpec};
use crate::scalar::Real;
use crate::seed::{entity_seed, STREAM_PARTICIPANTS, STREAM_TASKS};

/// Redraws of a participant location before generation gives up.
pub const PLACEMENT_RETRY_CAP: u32 = 1000;

/// Per-task bids are drawn from `[max(BID_FLOOR, v - alpha), v + alpha]`;
/// the floor keeps low-value tasks from attracting non-positive bids.
pub const BID_FLOOR: f64 = 0.1;

/// Everything the campaign generator needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams<T> {
    pub area_width: T,
    pub area_height: T,
    pub n_participants: u32,
    pub n_tasks: u32,
    pub interest_radius: T,
    pub task_value_range: [T; 2],
    pub collective_bid_range: [T; 2],
    /// Half-width of the per-task bid interval around the task value.
    pub alpha: T,
    pub reputation_range: [T; 2],
    pub seed: u64,
}

impl<T: Real> Default for GeneratorParams<T> {
    fn default() -> Self {
        let s = T::from_f64_lossy;
        Self {
            area_width: s(1000.0),
            area_height: s(1000.0),
            n_participants: 100,
            n_tasks: 200,
            interest_radius: s(30.0),
            task_value_range: [s(1.0), s(5.0)],
            collective_bid_range: [s(1.0), s(10.0)],
            alpha: s(2.0),
            reputation_range: [s(0.6), s(0.9)],
            seed: 0,
        }
    }
}

impl<T: Real> GeneratorParams<T> {
    pub fn validate(&self) -> Result<()> {
        fn positive_finite<T: Real>(field: &'static str, v: T) -> Result<()> {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams {
                    field,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        }
        fn range_ok<T: Real>(field: &'static str, r: [T; 2]) -> Result<()> {
            if r[0] > T::zero() && r[0] <= r[1] && r[1].is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams {
                    field,
                    reason: format!("must satisfy 0 < min <= max, got [{}, {}]", r[0], r[1]),
                })
            }
        }
        positive_finite("area_width", self.area_width)?;
        positive_finite("area_height", self.area_height)?;
        positive_finite("interest_radius", self.interest_radius)?;
        if self.alpha < T::zero() || !self.alpha.is_finite() {
            return Err(Error::InvalidParams {
                field: "alpha",
                reason: format!("must be non-negative and finite, got {}", self.alpha),
            });
        }
        if self.n_participants == 0 {
            return Err(Error::InvalidParams {
                field: "n_participants",
                reason: "must be at least 1".into(),
            });
        }
        if self.n_tasks == 0 {
            return Err(Error::InvalidParams {
                field: "n_tasks",
                reason: "must be at least 1".into(),
            });
        }
        range_ok("task_value_range", self.task_value_range)?;
        range_ok("collective_bid_range", self.collective_bid_range)?;
        range_ok("reputation_range", self.reputation_range)?;
        if self.reputation_range[1] > T::one() {
            return Err(Error::InvalidParams {
                field: "reputation_range",
                reason: "reputation must stay within (0, 1]".into(),
            });
        }
        Ok(())
    }

    /// Copy with a different seed; scenario runs derive one per cell.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Copy with a different population size.
    pub fn with_counts(&self, n_participants: u32, n_tasks: u32) -> Self {
        Self {
            n_participants,
            n_tasks,
            ..self.clone()
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..=hi)
}

/// Generates one campaign from the seeded stream.
///
/// Draw order per participant: location (redrawn until at least one task is
/// in range, up to [`PLACEMENT_RETRY_CAP`]), reputation, collective bid,
/// then per-task bids in ascending task id.
pub fn generate_campaign<T: Real>(params: &GeneratorParams<T>) -> Result<Campaign<T>> {
    params.validate()?;
    let width = params.area_width.to_f64_lossy();
    let height = params.area_height.to_f64_lossy();

    let mut tasks = Vec::with_capacity(params.n_tasks as usize);
    for j in 0..params.n_tasks {
        let mut rng = ChaCha8Rng::seed_from_u64(entity_seed(params.seed, STREAM_TASKS, j as u64));
        let x = uniform(&mut rng, 0.0, width);
        let y = uniform(&mut rng, 0.0, height);
        let [vlo, vhi] = params.task_value_range;
        let value = uniform(&mut rng, vlo.to_f64_lossy(), vhi.to_f64_lossy());
        tasks.push(TaskSpec {
            id: TaskId(j + 1),
            location: Point::new(T::from_f64_lossy(x), T::from_f64_lossy(y)),
            value: T::from_f64_lossy(value),
        });
    }

    let alpha = params.alpha.to_f64_lossy();
    let mut participants = Vec::with_capacity(params.n_participants as usize);
    for i in 0..params.n_participants {
        let mut rng =
            ChaCha8Rng::seed_from_u64(entity_seed(params.seed, STREAM_PARTICIPANTS, i as u64));
        let mut placed = None;
        for _ in 0..PLACEMENT_RETRY_CAP {
            let x = uniform(&mut rng, 0.0, width);
            let y = uniform(&mut rng, 0.0, height);
            let location = Point::new(T::from_f64_lossy(x), T::from_f64_lossy(y));
            let in_range = interest_set(location, params.interest_radius, &tasks);
            if !in_range.is_empty() {
                placed = Some((location, in_range));
                break;
            }
        }
        let (location, in_range) = placed.ok_or(Error::GenerationFailed {
            participant: i + 1,
            retries: PLACEMENT_RETRY_CAP,
        })?;

        let [rlo, rhi] = params.reputation_range;
        let reputation = uniform(&mut rng, rlo.to_f64_lossy(), rhi.to_f64_lossy());
        let [blo, bhi] = params.collective_bid_range;
        let collective_bid = uniform(&mut rng, blo.to_f64_lossy(), bhi.to_f64_lossy());
        let per_task_bids = in_range
            .iter()
            .map(|&t| {
                let v = tasks[(t.0 - 1) as usize].value.to_f64_lossy();
                let bid = uniform(&mut rng, (v - alpha).max(BID_FLOOR), v + alpha);
                (t, T::from_f64_lossy(bid))
            })
            .collect();

        participants.push(Participant {
            id: ParticipantId(i + 1),
            location,
            interest_radius: params.interest_radius,
            reputation: T::from_f64_lossy(reputation),
            interest_set: in_range,
            collective_bid: T::from_f64_lossy(collective_bid),
            per_task_bids,
        });
    }

    Campaign::new(
        Area {
            width: params.area_width,
            height: params.area_height,
        },
        tasks,
        participants,
    )
}
