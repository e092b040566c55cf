//! Auction-based task allocation for mobile crowdsensing campaigns.
//!
//! A campaign scatters sensing tasks and bidders over an area; each bidder
//! submits one collective bid for the tasks inside its interest radius plus
//! a per-task (descriptive) bid list. Three reverse-auction mechanisms
//! allocate tasks to winners under a budget tied to the total task value:
//!
//! * `TSCM` — reputation-weighted greedy selection with critical payments.
//! * `2SB` — adds a secondary stage that buys still-uncovered tasks at
//!   descriptive bids while the remaining budget allows.
//! * `RPB` — additionally runs a redundancy-penalizing stage between the
//!   two: bids are re-weighted so holders of tasks with few bidders win
//!   earlier, keeping unpopular tasks from burning the secondary budget.
//!
//! The crate is generic over the scalar type (`f32` or `f64`, the
//! [`scalar::Real`] trait); the `*64`/`*32` aliases below pick a precision.
//! Campaign generation and scenario execution are fully seeded: a master
//! seed determines every placement, bid and outcome, bit for bit.
//!
//! ```
//! use mcs_auctions::generate::{generate_campaign, GeneratorParams};
//! use mcs_auctions::mechanism::{run_mechanism, MechanismKind};
//!
//! let params = GeneratorParams::<f64> { n_participants: 20, n_tasks: 30, seed: 7, ..Default::default() };
//! let campaign = generate_campaign(&params).unwrap();
//! let outcome = run_mechanism(&campaign, MechanismKind::RPB_RA).unwrap();
//! assert!(outcome.clearance_rate >= 0.0 && outcome.clearance_rate <= 1.0);
//! ```

pub mod error;
pub mod generate;
pub mod mechanism;
pub mod model;
pub mod scalar;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations (the default for the CLI and tests).
pub type Campaign64 = model::Campaign<f64>;
pub type GeneratorParams64 = generate::GeneratorParams<f64>;
pub type AuctionOutcome64 = mechanism::AuctionOutcome<f64>;
pub type ScenarioConfig64 = sim::ScenarioConfig<f64>;
pub type ResultRow64 = sim::ResultRow<f64>;
pub type AggregateRow64 = sim::AggregateRow<f64>;

/// Single-precision instantiations.
pub type Campaign32 = model::Campaign<f32>;
pub type GeneratorParams32 = generate::GeneratorParams<f32>;
pub type AuctionOutcome32 = mechanism::AuctionOutcome<f32>;
