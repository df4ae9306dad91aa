use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gpupark_core::breakeven::{breakeven, format_breakeven_time};
use gpupark_core::power::parking_tax;
use serde_json::json;

use crate::manifest::{RunManifest, SCHEMA_VERSION};
use crate::resolve::{resolve_load, resolve_profile};

/// Compute the cold-start energy breakeven time and critical arrival rate.
#[derive(Debug, Args)]
pub struct BreakevenArgs {
    /// GPU profile (built-in name or JSON file); sets the parking power.
    #[arg(long, default_value = "h100")]
    profile: String,
    /// Parking power in watts, overriding the profile's context overhead.
    #[arg(long)]
    park_power: Option<f64>,
    /// Mean loading power in watts (with --load-time).
    #[arg(long)]
    load_power: Option<f64>,
    /// Loading duration in seconds (with --load-power).
    #[arg(long)]
    load_time: Option<f64>,
    /// Load profile (built-in name or JSON file) when no explicit
    /// power/time pair is given.
    #[arg(long)]
    load_profile: Option<String>,
    /// Print the result as JSON on stdout too.
    #[arg(long)]
    json: bool,
    /// Write the result JSON to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: &BreakevenArgs) -> Result<()> {
    let park_w = match args.park_power {
        Some(p) => p,
        None => parking_tax(&resolve_profile(&args.profile)?),
    };
    let load = resolve_load(args.load_profile.as_deref(), args.load_power, args.load_time)?;
    let result = breakeven(park_w, &load)?;

    let per_hr = result.lambda_star_per_s * 3600.0;
    println!(
        "T* = {:.1} s ({}), λ* = {:.1}/hr",
        result.t_star_s,
        format_breakeven_time(result.t_star_s),
        per_hr
    );

    let payload = json!({
        "schema_version": SCHEMA_VERSION,
        "park_w": result.park_w,
        "load_profile": load.label,
        "load_energy_j": result.load_energy_j,
        "t_star_s": result.t_star_s,
        "t_star_printed": format_breakeven_time(result.t_star_s),
        "lambda_star_per_s": result.lambda_star_per_s,
        "lambda_star_per_hr": per_hr,
    });
    if args.json {
        println!("{}", serde_json::to_string_pretty(&payload)?);
    }
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&payload)?)?;
        RunManifest::new("breakeven", payload, &[out]).write_next_to(out)?;
    }
    Ok(())
}
