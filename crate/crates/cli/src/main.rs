//! `gpupark`: GPU idle-power modeling and keep-warm policy analysis.
//!
//! Exit codes: 0 success, 1 domain/runtime error, 2 usage error.

mod commands;
mod manifest;
mod reference;
mod resolve;
mod units;

use clap::{Parser, Subcommand};

use commands::{
    analyze_cmd, breakeven_cmd, impact_cmd, reproduce_cmd, simulate_cmd, telemetry_cmd,
    traffic_cmd,
};

#[derive(Parser)]
#[command(
    name = "gpupark",
    version,
    about = "GPU idle-power modeling, cold-start breakeven analysis, and eviction-policy simulation",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the cold-start energy breakeven time and critical rate.
    Breakeven(breakeven_cmd::BreakevenArgs),
    /// Generate a synthetic arrival trace.
    GenTraffic(traffic_cmd::GenTrafficArgs),
    /// Simulate one GPU under an eviction policy.
    Simulate(simulate_cmd::SimulateArgs),
    /// Run several policies on the identical trace and compare.
    Compare(simulate_cmd::CompareArgs),
    /// Generate synthetic telemetry from a phase schedule.
    GenTelemetry(telemetry_cmd::GenTelemetryArgs),
    /// Analyze a telemetry CSV (retention, two-state, dose-response, TOST).
    Analyze(analyze_cmd::AnalyzeArgs),
    /// Fleet-scale annual parking energy and CO₂ estimate.
    Impact(impact_cmd::ImpactArgs),
    /// Regenerate a bundled reference table and compare against it.
    Reproduce(reproduce_cmd::ReproduceArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Breakeven(args) => breakeven_cmd::run(args),
        Command::GenTraffic(args) => traffic_cmd::run(args),
        Command::Simulate(args) => simulate_cmd::run(args),
        Command::Compare(args) => simulate_cmd::run_compare(args),
        Command::GenTelemetry(args) => telemetry_cmd::run(args),
        Command::Analyze(args) => analyze_cmd::run(args),
        Command::Impact(args) => impact_cmd::run(args),
        Command::Reproduce(args) => reproduce_cmd::run(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
