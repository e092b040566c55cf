//! Scenario runner CLI for the crowdsensing auction simulator.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use mcs_auctions::generate::{generate_campaign, GeneratorParams};
use mcs_auctions::mechanism::{run_mechanism, MechanismKind};
use mcs_auctions::sim::run_scenario_with_jobs;

use mcs_auctions_cli::config::{load_config, parse_mechanism_list, OutputFormat};
use mcs_auctions_cli::oracle;
use mcs_auctions_cli::output::emit_results;

#[derive(Parser)]
#[command(
    name = "mcs-auctions",
    version,
    about = "Auction-based task allocation simulator for mobile crowdsensing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a TOML or JSON config file
    Run(RunArgs),
    /// Run one small campaign and print the full stage trace
    Demo(DemoArgs),
    /// Cross-check the pipeline against the straight-line reference on
    /// random small campaigns
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the scenario config
    #[arg(value_name = "CONFIG")]
    config_path: Option<PathBuf>,
    /// Path to the scenario config (alternative to the positional argument)
    #[arg(long = "config", value_name = "PATH")]
    config_flag: Option<PathBuf>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Write results here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format (overrides the config)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Emit per-(mechanism, sweep value) aggregates instead of raw rows
    #[arg(long)]
    aggregate: bool,
    /// Comma-separated mechanisms to run, e.g. RPB-RA,2SB-RA,TSCM-RA
    #[arg(long, value_name = "LIST")]
    mechanisms: Option<Vec<String>>,
    /// Worker threads for the sweep (0 = one per core)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct DemoArgs {
    /// Campaign seed
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Mechanism to run
    #[arg(long, default_value = "RPB-RA")]
    mechanism: String,
    /// Participants in the demo campaign
    #[arg(long, default_value_t = 8)]
    participants: u32,
    /// Tasks in the demo campaign
    #[arg(long, default_value_t = 12)]
    tasks: u32,
    /// Print the outcome as JSON instead of the readable report
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Number of random campaigns to check
    #[arg(long, default_value_t = 200)]
    campaigns: u32,
    /// Master seed for the campaign population
    #[arg(long, default_value_t = 0xACCE55)]
    seed: u64,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Demo(args) => demo(args),
        Command::Oracle(args) => oracle_check(args),
    }
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let path = match (&args.config_path, &args.config_flag) {
        (Some(p), None) | (None, Some(p)) => p.clone(),
        (Some(_), Some(_)) => bail!("pass the config either positionally or via --config, not both"),
        (None, None) => bail!("missing config file (pass a path or --config <PATH>)"),
    };
    let (mut config, mut options) = load_config(&path)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(mechanisms) = &args.mechanisms {
        config.mechanisms = parse_mechanism_list(mechanisms)?;
        config.validate()?;
    }
    if let Some(out) = args.out {
        options.path = Some(out);
    }
    if let Some(format) = args.format {
        options.format = format;
    }
    options.aggregate = options.aggregate || args.aggregate;

    let rows = run_scenario_with_jobs(&config, args.jobs)?;
    let records = emit_results(&rows, &options)?;
    if let Some(path) = &options.path {
        let kind = if options.aggregate { "aggregate rows" } else { "rows" };
        eprintln!(
            "wrote {records} {kind} ({} runs) to {}",
            rows.len(),
            path.display()
        );
    }
    Ok(())
}

fn demo(args: DemoArgs) -> anyhow::Result<()> {
    let kind: MechanismKind = args.mechanism.parse()?;
    let params = GeneratorParams::<f64> {
        area_width: 150.0,
        area_height: 150.0,
        n_participants: args.participants,
        n_tasks: args.tasks,
        interest_radius: 45.0,
        seed: args.seed,
        ..Default::default()
    };
    let campaign = generate_campaign(&params).context("generating the demo campaign")?;
    let outcome = run_mechanism(&campaign, kind)?;

    if args.json {
        println!("{}", serde_json::to_string_pretty(&outcome)?);
        return Ok(());
    }

    println!(
        "campaign: {} participants, {} tasks, area {:.0}x{:.0} m, radius {:.0} m, seed {}",
        campaign.n_participants(),
        campaign.n_tasks(),
        campaign.area.width,
        campaign.area.height,
        params.interest_radius,
        args.seed
    );
    println!(
        "mechanism {kind}: clearance rate {:.4} ({} of {} tasks)",
        outcome.clearance_rate,
        outcome.covered_tasks.len(),
        campaign.n_tasks()
    );
    println!(
        "winners: {} primary, {} redundancy, {} secondary | payments {:.4} | budget left {:.4} of {:.4}",
        outcome.primary.len(),
        outcome.redundancy.len(),
        outcome.secondary.len(),
        outcome.payments.total(),
        outcome.remaining_budget,
        outcome.total_value
    );
    println!("stage trace:");
    for record in &outcome.stage_trace {
        let verdict = if record.admitted { "admitted" } else { "rejected" };
        let guard = match record.budget_guard {
            Some(g) => format!(", budget guard {g:.4}"),
            None => String::new(),
        };
        println!(
            "  [{}] participant {}: score {:.4}, marginal value {:.4}, weighted bid {:.4}{} -> {}",
            record.stage, record.participant, record.score, record.marginal_value,
            record.weighted_bid, guard, verdict
        );
    }
    for (winner, tasks) in &outcome.secondary_assignments {
        let list: Vec<String> = tasks.iter().map(|t| t.to_string()).collect();
        println!(
            "  secondary assignment: participant {} -> tasks [{}], paid {:.4}",
            winner,
            list.join(", "),
            outcome.payments.amount(*winner)
        );
    }
    Ok(())
}

fn oracle_check(args: OracleArgs) -> anyhow::Result<()> {
    match oracle::run_equivalence_suite(args.campaigns, args.seed) {
        Ok(report) => {
            println!(
                "oracle equivalence: {} campaigns, {} mechanism comparisons, all exact",
                report.campaigns, report.comparisons
            );
            Ok(())
        }
        Err(mismatch) => bail!("oracle mismatch: {mismatch}"),
    }
}
