use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gpupark_core::telemetry::{gen_telemetry, write_telemetry_csv, TelemetrySchedule};
use serde_json::json;

use crate::manifest::{RunManifest, SCHEMA_VERSION};
use crate::resolve::resolve_profile;

/// Generate synthetic telemetry from a phase schedule.
#[derive(Debug, Args)]
pub struct GenTelemetryArgs {
    /// GPU profile (built-in name or JSON file).
    #[arg(long, default_value = "h100")]
    profile: String,
    /// Schedule JSON: {"gpu_id": "...", "phases": [{"vram_gb", "ctx", "duration_s"}, ...]}
    #[arg(long)]
    schedule: PathBuf,
    /// Within-phase Gaussian noise std in watts.
    #[arg(long, default_value_t = 0.17)]
    noise: f64,
    /// Linear power drift in watts per hour (thermal-trend analog).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    drift: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Telemetry CSV to write.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: &GenTelemetryArgs) -> Result<()> {
    let profile = resolve_profile(&args.profile)?;
    let schedule = TelemetrySchedule::from_json_file(&args.schedule)?;
    let samples = gen_telemetry(&profile, &schedule, args.noise, args.drift, args.seed)?;
    write_telemetry_csv(&samples, &args.out)?;
    println!(
        "wrote {} samples ({} phases, gpu {}) to {}",
        samples.len(),
        schedule.phases.len(),
        schedule.gpu_id,
        args.out.display()
    );
    let resolved = json!({
        "schema_version": SCHEMA_VERSION,
        "profile": profile.name,
        "schedule": args.schedule.display().to_string(),
        "noise_std_w": args.noise,
        "drift_w_per_hr": args.drift,
        "seed": args.seed,
        "samples": samples.len(),
    });
    RunManifest::new("gen-telemetry", resolved, &[&args.out]).write_next_to(&args.out)?;
    Ok(())
}
