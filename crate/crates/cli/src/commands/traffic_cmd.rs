use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use gpupark_core::traffic::{save_trace, TrafficSpec, TrafficVariant};
use serde_json::json;

use crate::manifest::{RunManifest, SCHEMA_VERSION};
use crate::units::{parse_duration_s, parse_rate_per_hr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pattern {
    Steady,
    Bursty,
    Diurnal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Phase {
    Trough,
    Peak,
}

/// Generate a synthetic arrival trace.
#[derive(Debug, Args)]
pub struct GenTrafficArgs {
    #[arg(long, value_enum)]
    pattern: Pattern,
    /// Window length (24h, 90m, 300s).
    #[arg(long, default_value = "24h")]
    duration: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Steady arrival rate.
    #[arg(long, default_value = "5/hr")]
    rate: String,
    /// Bursty low-phase rate.
    #[arg(long, default_value = "2/hr")]
    low_rate: String,
    /// Bursty high-phase rate.
    #[arg(long, default_value = "60/hr")]
    high_rate: String,
    /// Bursty alternation period.
    #[arg(long, default_value = "2h")]
    period: String,
    /// Fraction of each period spent at the low rate.
    #[arg(long, default_value_t = 0.7)]
    low_duty: f64,
    /// Diurnal peak rate.
    #[arg(long, default_value = "30/hr")]
    peak_rate: String,
    /// Diurnal cycle length.
    #[arg(long, default_value = "24h")]
    cycle: String,
    /// Diurnal trough rate (0 gives the full raised cosine from zero).
    #[arg(long, default_value = "0/hr")]
    floor_rate: String,
    /// Whether the sinusoid starts at the trough or the peak.
    #[arg(long, value_enum, default_value_t = Phase::Trough)]
    diurnal_phase: Phase,
    /// Trace file to write.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: &GenTrafficArgs) -> Result<()> {
    let duration_s = parse_duration_s(&args.duration)?;
    let variant = match args.pattern {
        Pattern::Steady => TrafficVariant::Steady { rate_per_hr: parse_rate_per_hr(&args.rate)? },
        Pattern::Bursty => TrafficVariant::Bursty {
            low_per_hr: parse_rate_per_hr(&args.low_rate)?,
            high_per_hr: parse_rate_per_hr(&args.high_rate)?,
            period_s: parse_duration_s(&args.period)?,
            low_duty: args.low_duty,
        },
        Pattern::Diurnal => TrafficVariant::Diurnal {
            peak_per_hr: parse_rate_per_hr(&args.peak_rate)?,
            cycle_s: parse_duration_s(&args.cycle)?,
            floor_per_hr: parse_rate_per_hr(&args.floor_rate)?,
            trough_first: args.diurnal_phase == Phase::Trough,
        },
    };
    let spec = TrafficSpec { variant, duration_s };
    let trace = spec.generate(args.seed)?;
    save_trace(&trace, &args.out)?;
    println!(
        "wrote {} arrivals over {duration_s} s ({}) to {}",
        trace.len(),
        trace.spec_label,
        args.out.display()
    );
    let resolved = json!({
        "schema_version": SCHEMA_VERSION,
        "spec": spec,
        "seed": args.seed,
        "arrivals": trace.len(),
    });
    RunManifest::new("gen-traffic", resolved, &[&args.out]).write_next_to(&args.out)?;
    Ok(())
}
