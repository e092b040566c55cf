//! Seeded Monte Carlo scenario runner.
//!
//! A scenario sweeps one axis (auction count, task count, or participant
//! count), generates one campaign per (sweep value, repetition) cell from a
//! seed derived off the master seed, and runs every configured mechanism on
//! that same campaign so mechanisms are compared pairwise. Cells may be
//! evaluated in parallel; the returned row set is always identical to a
//! sequential run (rows are sorted by mechanism, sweep value, repetition).

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate_campaign, GeneratorParams};
use crate::mechanism::{run_mechanism, AuctionOutcome, MechanismKind};
use crate::scalar::Real;
use crate::seed::run_seed;

/// The quantity a scenario varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Number of independently generated campaigns at fixed (N, M); the
    /// sweep value is the number of auctions and doubles as the repetition
    /// count of the sweep point.
    Auctions,
    /// Number of tasks, participants fixed.
    Tasks,
    /// Number of participants, tasks fixed.
    Participants,
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepAxis::Auctions => "auctions",
            SweepAxis::Tasks => "tasks",
            SweepAxis::Participants => "participants",
        })
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auctions" => Ok(SweepAxis::Auctions),
            "tasks" => Ok(SweepAxis::Tasks),
            "participants" => Ok(SweepAxis::Participants),
            _ => Err(Error::InvalidParams {
                field: "sweep_axis",
                reason: format!("unknown axis `{s}` (auctions | tasks | participants)"),
            }),
        }
    }
}

/// One experiment: which mechanisms to run, what to sweep, and how often.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig<T> {
    pub mechanisms: Vec<MechanismKind>,
    pub sweep_axis: SweepAxis,
    /// Strictly increasing sweep points.
    pub sweep_values: Vec<u32>,
    /// Participant count used when the axis does not vary it.
    pub fixed_n_participants: u32,
    /// Task count used when the axis does not vary it.
    pub fixed_n_tasks: u32,
    /// Campaigns per sweep point. Ignored on the auctions axis, where the
    /// sweep value itself is the number of campaigns.
    pub repetitions: u32,
    pub master_seed: u64,
    /// Geometry and distribution template; its population counts and seed
    /// are overridden per cell.
    pub generator: GeneratorParams<T>,
}

impl<T: Real> ScenarioConfig<T> {
    /// The stock experiment for an axis: tasks sweep 40..=240 at N=100,
    /// participants sweep 100..=500 at M=200, auctions sweep 10..=100 at
    /// (N=100, M=200); 30 repetitions; all three reputation-aware
    /// mechanisms on the default generator geometry.
    pub fn defaults_for(axis: SweepAxis) -> Self {
        let sweep_values = match axis {
            SweepAxis::Auctions => (1..=10).map(|k| k * 10).collect(),
            SweepAxis::Tasks => (1..=6).map(|k| k * 40).collect(),
            SweepAxis::Participants => (1..=5).map(|k| k * 100).collect(),
        };
        Self {
            mechanisms: vec![
                MechanismKind::TSCM_RA,
                MechanismKind::TWO_SB_RA,
                MechanismKind::RPB_RA,
            ],
            sweep_axis: axis,
            sweep_values,
            fixed_n_participants: 100,
            fixed_n_tasks: 200,
            repetitions: 30,
            master_seed: 42,
            generator: GeneratorParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mechanisms.is_empty() {
            return Err(Error::InvalidParams {
                field: "mechanisms",
                reason: "at least one mechanism is required".into(),
            });
        }
        if self.sweep_values.is_empty() {
            return Err(Error::InvalidParams {
                field: "sweep_values",
                reason: "at least one sweep point is required".into(),
            });
        }
        if !self.sweep_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParams {
                field: "sweep_values",
                reason: "sweep values must be strictly increasing".into(),
            });
        }
        if self.sweep_values[0] == 0 {
            return Err(Error::InvalidParams {
                field: "sweep_values",
                reason: "sweep values must be positive".into(),
            });
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidParams {
                field: "repetitions",
                reason: "must be at least 1".into(),
            });
        }
        if self.fixed_n_participants == 0 {
            return Err(Error::InvalidParams {
                field: "fixed_n_participants",
                reason: "must be at least 1".into(),
            });
        }
        if self.fixed_n_tasks == 0 {
            return Err(Error::InvalidParams {
                field: "fixed_n_tasks",
                reason: "must be at least 1".into(),
            });
        }
        self.generator.validate()
    }
}

/// One mechanism run on one generated campaign.
///
/// Equality ignores `runtime_ms`, which is informational: two runs of the
/// same scenario produce equal row sets even though timings differ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow<T> {
    pub mechanism: MechanismKind,
    pub axis: SweepAxis,
    pub value: u32,
    pub rep: u32,
    pub seed: u64,
    pub clearance_rate: T,
    pub n_primary: u32,
    pub n_redundancy: u32,
    pub n_secondary: u32,
    /// Total payments across all stages.
    pub payments: T,
    /// Budget left after the final stage.
    pub budget: T,
    pub runtime_ms: f64,
}

impl<T: PartialEq> PartialEq for ResultRow<T> {
    fn eq(&self, other: &Self) -> bool {
        self.mechanism == other.mechanism
            && self.axis == other.axis
            && self.value == other.value
            && self.rep == other.rep
            && self.seed == other.seed
            && self.clearance_rate == other.clearance_rate
            && self.n_primary == other.n_primary
            && self.n_redundancy == other.n_redundancy
            && self.n_secondary == other.n_secondary
            && self.payments == other.payments
            && self.budget == other.budget
    }
}

/// Per-(mechanism, sweep value) aggregate across repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow<T> {
    pub mechanism: MechanismKind,
    pub axis: SweepAxis,
    pub value: u32,
    pub cr_mean: T,
    /// Unbiased (n-1) standard deviation; zero for a single row.
    pub cr_std: T,
    pub payments_mean: T,
    pub budget_mean: T,
}

/// Fraction of campaign tasks covered by the outcome.
pub fn clearance_rate<T: Real>(outcome: &AuctionOutcome<T>, n_tasks: u32) -> Result<T> {
    if n_tasks == 0 {
        return Err(Error::InvalidParams {
            field: "n_tasks",
            reason: "clearance rate is undefined for zero tasks".into(),
        });
    }
    Ok(T::from_count(outcome.covered_tasks.len()) / T::from_count(n_tasks as usize))
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    value: u32,
    rep: u32,
    seed: u64,
    n_participants: u32,
    n_tasks: u32,
}

fn plan_cells<T: Real>(config: &ScenarioConfig<T>) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &value in &config.sweep_values {
        let (n, m, reps) = match config.sweep_axis {
            SweepAxis::Auctions => (config.fixed_n_participants, config.fixed_n_tasks, value),
            SweepAxis::Tasks => (config.fixed_n_participants, value, config.repetitions),
            SweepAxis::Participants => (value, config.fixed_n_tasks, config.repetitions),
        };
        for rep in 0..reps {
            cells.push(Cell {
                value,
                rep,
                seed: run_seed(config.master_seed, value as u64, rep as u64),
                n_participants: n,
                n_tasks: m,
            });
        }
    }
    cells
}

fn run_cell<T: Real>(config: &ScenarioConfig<T>, cell: &Cell) -> Result<Vec<ResultRow<T>>> {
    let params = config
        .generator
        .with_counts(cell.n_participants, cell.n_tasks)
        .with_seed(cell.seed);
    let campaign = generate_campaign(&params).map_err(|e| Error::ScenarioCell {
        sweep_value: cell.value,
        repetition: cell.rep,
        message: e.to_string(),
    })?;
    let mut rows = Vec::with_capacity(config.mechanisms.len());
    for &mechanism in &config.mechanisms {
        let start = Instant::now();
        let outcome = run_mechanism(&campaign, mechanism).map_err(|e| Error::ScenarioCell {
            sweep_value: cell.value,
            repetition: cell.rep,
            message: e.to_string(),
        })?;
        let runtime_ms = start.elapsed().as_secs_f64() * 1000.0;
        rows.push(ResultRow {
            mechanism,
            axis: config.sweep_axis,
            value: cell.value,
            rep: cell.rep,
            seed: cell.seed,
            clearance_rate: outcome.clearance_rate,
            n_primary: outcome.primary.len() as u32,
            n_redundancy: outcome.redundancy.len() as u32,
            n_secondary: outcome.secondary.len() as u32,
            payments: outcome.payments.total(),
            budget: outcome.remaining_budget,
            runtime_ms,
        });
    }
    Ok(rows)
}

fn sort_rows<T>(rows: &mut [ResultRow<T>]) {
    rows.sort_by_key(|r| (r.mechanism, r.value, r.rep));
}

/// Runs the scenario sequentially.
pub fn run_scenario<T: Real>(config: &ScenarioConfig<T>) -> Result<Vec<ResultRow<T>>> {
    run_scenario_with_jobs(config, 1)
}

/// Runs the scenario on `jobs` worker threads (0 = one per core). The row
/// set is independent of the thread count.
pub fn run_scenario_with_jobs<T: Real>(
    config: &ScenarioConfig<T>,
    jobs: usize,
) -> Result<Vec<ResultRow<T>>> {
    config.validate()?;
    let cells = plan_cells(config);
    let nested: Result<Vec<Vec<ResultRow<T>>>> = if jobs == 1 {
        cells.iter().map(|c| run_cell(config, c)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParams {
                field: "jobs",
                reason: e.to_string(),
            })?;
        pool.install(|| cells.par_iter().map(|c| run_cell(config, c)).collect())
    };
    let mut rows: Vec<ResultRow<T>> = nested?.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(rows)
}

/// Groups rows by (mechanism, sweep value) and reduces each group to its
/// clearance-rate mean and standard deviation plus payment/budget means.
/// Output order follows the group key; input order does not matter.
pub fn aggregate<T: Real>(rows: &[ResultRow<T>]) -> Result<Vec<AggregateRow<T>>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("rows"));
    }
    let mut groups: BTreeMap<(MechanismKind, u32), Vec<&ResultRow<T>>> = BTreeMap::new();
    for row in rows {
        groups.entry((row.mechanism, row.value)).or_default().push(row);
    }
    let axis = rows[0].axis;
    Ok(groups
        .into_iter()
        .map(|((mechanism, value), members)| {
            let n = T::from_count(members.len());
            let cr_mean = members.iter().map(|r| r.clearance_rate).sum::<T>() / n;
            let cr_std = if members.len() < 2 {
                T::zero()
            } else {
                let ss = members
                    .iter()
                    .map(|r| {
                        let d = r.clearance_rate - cr_mean;
                        d * d
                    })
                    .sum::<T>();
                (ss / T::from_count(members.len() - 1)).sqrt()
            };
            AggregateRow {
                mechanism,
                axis,
                value,
                cr_mean,
                cr_std,
                payments_mean: members.iter().map(|r| r.payments).sum::<T>() / n,
                budget_mean: members.iter().map(|r| r.budget).sum::<T>() / n,
            }
        })
        .collect())
}
