use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gpupark_core::stats::{
    dose_response, tost, two_state_stats, EquivalenceResult, RegressionResult, TwoStateResult,
};
use gpupark_core::telemetry::{classify_state, ingest, segment_phases, GpuState, TelemetrySample};
use serde::Serialize;

use crate::manifest::{RunManifest, SCHEMA_VERSION};

/// Analyze a telemetry CSV: retention, two-state statistics, and per-GPU
/// dose-response regression with TOST equivalence.
#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Telemetry CSV to read.
    #[arg(long)]
    input: PathBuf,
    /// Keep samples with utilization at or below this percentage.
    #[arg(long, default_value_t = 0.0)]
    util_max: f64,
    /// SM-clock threshold separating bare idle from context-active.
    #[arg(long, default_value_t = 700.0)]
    clock_threshold: f64,
    /// TOST equivalence bound in W/GB.
    #[arg(long, default_value_t = 0.1)]
    tost_bound: f64,
    /// Report JSON to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Retention {
    total_rows: usize,
    retained: usize,
    fraction: f64,
}

#[derive(Debug, Serialize)]
struct GpuReport {
    gpu_id: String,
    n_bare: usize,
    n_ctx: usize,
    n_phases: usize,
    regression: Option<RegressionResult>,
    equivalence: Option<EquivalenceResult>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: u32,
    input: String,
    util_max_pct: f64,
    clock_threshold_mhz: f64,
    tost_bound_w_per_gb: f64,
    retention: Retention,
    two_state: Option<TwoStateResult>,
    per_gpu: Vec<GpuReport>,
}

pub fn run(args: &AnalyzeArgs) -> Result<()> {
    let ingested = ingest(&args.input, args.util_max)?;
    if ingested.retained == 0 {
        eprintln!(
            "warning: no samples at util <= {}% (of {} rows)",
            args.util_max, ingested.total_rows
        );
    }

    let mut bare = Vec::new();
    let mut ctx = Vec::new();
    let mut by_gpu: BTreeMap<String, Vec<TelemetrySample>> = BTreeMap::new();
    for s in &ingested.samples {
        match classify_state(s, args.clock_threshold) {
            GpuState::BareIdle => bare.push(s.power_w),
            GpuState::CudaActive => ctx.push(s.power_w),
        }
        by_gpu.entry(s.gpu_id.clone()).or_default().push(s.clone());
    }

    let two_state = if bare.len() >= 2 && ctx.len() >= 2 {
        Some(two_state_stats(&bare, &ctx)?)
    } else {
        eprintln!(
            "warning: two-state comparison skipped (bare {} / ctx {} samples)",
            bare.len(),
            ctx.len()
        );
        None
    };

    let mut per_gpu = Vec::new();
    for (gpu_id, mut samples) in by_gpu {
        samples.sort_by(|a, b| a.timestamp_s.partial_cmp(&b.timestamp_s).unwrap());
        let n_bare = samples
            .iter()
            .filter(|s| classify_state(s, args.clock_threshold) == GpuState::BareIdle)
            .count();
        let n_ctx = samples.len() - n_bare;
        let phases = segment_phases(&samples, args.clock_threshold)?;
        let distinct = {
            let mut vs: Vec<f64> = phases.iter().map(|p| p.vram_gb).collect();
            vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vs.dedup_by(|a, b| (*a - *b).abs() <= 1e-6);
            vs.len()
        };
        let (regression, equivalence) = if phases.len() >= 3 && distinct >= 2 {
            let reg = dose_response(&phases)?;
            let eq = tost(&reg, args.tost_bound)?;
            (Some(reg), Some(eq))
        } else {
            eprintln!(
                "note: gpu {gpu_id}: {} phases at {} distinct VRAM levels, regression skipped",
                phases.len(),
                distinct
            );
            (None, None)
        };
        per_gpu.push(GpuReport {
            gpu_id,
            n_bare,
            n_ctx,
            n_phases: phases.len(),
            regression,
            equivalence,
        });
    }

    let report = Report {
        schema_version: SCHEMA_VERSION,
        input: args.input.display().to_string(),
        util_max_pct: args.util_max,
        clock_threshold_mhz: args.clock_threshold,
        tost_bound_w_per_gb: args.tost_bound,
        retention: Retention {
            total_rows: ingested.total_rows,
            retained: ingested.retained,
            fraction: ingested.retention_fraction(),
        },
        two_state,
        per_gpu,
    };

    println!(
        "retention: {}/{} rows ({:.1}%)",
        report.retention.retained,
        report.retention.total_rows,
        100.0 * report.retention.fraction
    );
    if let Some(ts) = &report.two_state {
        println!(
            "two-state: bare {:.1} W, ctx {:.1} W, delta {:.1} W, d {:.2}, welch p {:.2e}",
            ts.mean_bare_w, ts.mean_ctx_w, ts.delta_w, ts.cohens_d, ts.welch_p
        );
    }
    for g in &report.per_gpu {
        match (&g.regression, &g.equivalence) {
            (Some(reg), Some(eq)) => println!(
                "{}: {} phases, slope {:+.4} W/GB (95% CI [{:+.4}, {:+.4}], p {:.3}), TOST p {:.2e} -> {}",
                g.gpu_id,
                g.n_phases,
                reg.slope_w_per_gb,
                reg.ci95_lo,
                reg.ci95_hi,
                reg.p_two_sided,
                eq.p_tost,
                if eq.equivalent { "equivalent" } else { "NOT equivalent" }
            ),
            _ => println!("{}: {} phases, regression skipped", g.gpu_id, g.n_phases),
        }
    }

    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
        let resolved = serde_json::to_value(&report)?;
        RunManifest::new("analyze", resolved, &[out]).write_next_to(out)?;
    }
    Ok(())
}
