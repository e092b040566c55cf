//! Config ingestion, result emission and the reference-equivalence suite
//! behind the `mcs-auctions` binary.

pub mod config;
pub mod oracle;
pub mod output;
