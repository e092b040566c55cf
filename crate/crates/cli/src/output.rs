//! CSV and JSON result emission.
//!
//! CSV renders floating-point values with 6 significant digits and a fixed
//! header; JSON keeps full precision so re-parsing yields the identical
//! row set. Rows arrive already sorted by mechanism, sweep value and
//! repetition, and emission is deterministic byte for byte.

use std::io::Write;
use std::path::Path;

use anyhow::Context;

use mcs_auctions::{AggregateRow64, ResultRow64};

use crate::config::{OutputFormat, OutputOptions};

pub const ROW_HEADER: [&str; 12] = [
    "mechanism",
    "axis",
    "value",
    "rep",
    "seed",
    "clearance_rate",
    "n_primary",
    "n_redundancy",
    "n_secondary",
    "payments",
    "budget",
    "runtime_ms",
];

pub const AGGREGATE_HEADER: [&str; 7] = [
    "mechanism",
    "axis",
    "value",
    "cr_mean",
    "cr_std",
    "payments_mean",
    "budget_mean",
];

/// Renders with `sig` significant digits, plain decimal notation.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn sig6(x: f64) -> String {
    format_sig(x, 6)
}

pub fn rows_to_csv(rows: &[ResultRow64]) -> anyhow::Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(ROW_HEADER)?;
    for r in rows {
        writer.write_record([
            r.mechanism.to_string(),
            r.axis.to_string(),
            r.value.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            sig6(r.clearance_rate),
            r.n_primary.to_string(),
            r.n_redundancy.to_string(),
            r.n_secondary.to_string(),
            sig6(r.payments),
            sig6(r.budget),
            sig6(r.runtime_ms),
        ])?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

pub fn aggregates_to_csv(rows: &[AggregateRow64]) -> anyhow::Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(AGGREGATE_HEADER)?;
    for r in rows {
        writer.write_record([
            r.mechanism.to_string(),
            r.axis.to_string(),
            r.value.to_string(),
            sig6(r.cr_mean),
            sig6(r.cr_std),
            sig6(r.payments_mean),
            sig6(r.budget_mean),
        ])?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

pub fn rows_to_json(rows: &[ResultRow64]) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn aggregates_to_json(rows: &[AggregateRow64]) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

/// Renders rows (aggregating first when asked) and writes them to the
/// configured destination, stdout when none is set. Returns the number of
/// records written.
pub fn emit_results(rows: &[ResultRow64], options: &OutputOptions) -> anyhow::Result<usize> {
    let records = if options.aggregate {
        mcs_auctions::sim::aggregate(rows)?.len()
    } else {
        rows.len()
    };
    let rendered = render_results(rows, options)?;
    match &options.path {
        Some(path) => write_artifact(path, &rendered)
            .with_context(|| format!("writing results to {}", path.display()))?,
        None => {
            std::io::stdout().write_all(rendered.as_bytes())?;
        }
    }
    Ok(records)
}

/// The exact bytes `emit_results` would write.
pub fn render_results(rows: &[ResultRow64], options: &OutputOptions) -> anyhow::Result<String> {
    if options.aggregate {
        let aggregates = mcs_auctions::sim::aggregate(rows)?;
        match options.format {
            OutputFormat::Csv => aggregates_to_csv(&aggregates),
            OutputFormat::Json => aggregates_to_json(&aggregates),
        }
    } else {
        match options.format {
            OutputFormat::Csv => rows_to_csv(rows),
            OutputFormat::Json => rows_to_json(rows),
        }
    }
}

fn write_artifact(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}
