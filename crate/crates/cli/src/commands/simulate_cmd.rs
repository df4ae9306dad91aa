use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use gpupark_core::power::{GpuProfile, LoadProfile};
use gpupark_core::sim::{
    compare_policies, simulate_with_timeline, Policy, Segment, SimConfig, SimResult,
};
use gpupark_core::traffic::ArrivalTrace;
use serde_json::json;

use crate::manifest::{RunManifest, SCHEMA_VERSION};
use crate::resolve::{parse_policy, resolve_load, resolve_profile, resolve_traffic, TrafficSource};
use crate::units::parse_duration_s;

/// Simulate one GPU serving one model under an eviction policy.
#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// GPU profile (built-in name or JSON file).
    #[arg(long, default_value = "h100")]
    profile: String,
    /// always-on | ttl:<s> | breakeven | rate:<window_s> | hysteresis:<lo>,<hi>
    #[arg(long, default_value = "breakeven")]
    policy: String,
    /// Traffic: a trace file, or steady:<rate> | bursty:<lo>,<hi>,<period>,<duty>
    /// | diurnal:<peak>,<cycle>[,<floor>[,trough|peak]]
    #[arg(long)]
    traffic: String,
    /// Simulation window; defaults to 24h, or to the trace's own window
    /// when --traffic is a file.
    #[arg(long)]
    duration: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cold-start load profile (built-in name or JSON file).
    #[arg(long)]
    loader: Option<String>,
    /// Constant loading power in watts (with --load-time).
    #[arg(long)]
    load_power: Option<f64>,
    /// Constant loading duration in seconds (with --load-power).
    #[arg(long)]
    load_time: Option<f64>,
    /// Count the pre-window load that produced the warm start.
    #[arg(long)]
    count_initial_load: bool,
    /// Write the result JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the (t_start, t_end, state, power_w) timeline CSV here.
    #[arg(long)]
    emit_timeline: Option<PathBuf>,
}

pub struct ResolvedRun {
    pub profile: GpuProfile,
    pub load: LoadProfile,
    pub trace: ArrivalTrace,
    pub duration_s: f64,
}

pub fn resolve_run(
    profile: &str,
    loader: Option<&str>,
    load_power: Option<f64>,
    load_time: Option<f64>,
    traffic: &str,
    duration: Option<&str>,
    seed: u64,
) -> Result<ResolvedRun> {
    let profile = resolve_profile(profile)?;
    let load = resolve_load(loader, load_power, load_time)?;
    let requested_duration = duration.map(parse_duration_s).transpose()?;
    let (trace, duration_s) = match resolve_traffic(traffic, requested_duration.unwrap_or(86_400.0))? {
        TrafficSource::File(trace) => {
            let d = requested_duration.unwrap_or(trace.duration_s);
            (trace, d)
        }
        TrafficSource::Spec(spec) => {
            let trace = spec.generate(seed)?;
            let d = trace.duration_s;
            (trace, d)
        }
    };
    Ok(ResolvedRun { profile, load, trace, duration_s })
}

fn write_timeline(path: &PathBuf, timeline: &[Segment]) -> Result<()> {
    let mut text = String::from("t_start_s,t_end_s,state,power_w\n");
    for seg in timeline {
        writeln!(
            text,
            "{:.6},{:.6},{},{}",
            seg.t_start_s,
            seg.t_end_s,
            seg.state.as_str(),
            seg.power_w
        )?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn print_result(label: &str, r: &SimResult) {
    let savings = r
        .savings_vs_always_on_pct
        .map(|s| format!("{s:.1}%"))
        .unwrap_or_else(|| "-".to_string());
    println!(
        "{label:<24} energy {:>9.1} Wh  savings {savings:>6}  cold starts {:>4}  avg latency {:>6.2} s  (warm {:.0} s / evicted {:.0} s / loading {:.0} s)",
        r.energy_wh,
        r.cold_starts,
        r.avg_added_latency_s,
        r.time_warm_s,
        r.time_evicted_s,
        r.time_loading_s
    );
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let policy = parse_policy(&args.policy)?;
    let run = resolve_run(
        &args.profile,
        args.loader.as_deref(),
        args.load_power,
        args.load_time,
        &args.traffic,
        args.duration.as_deref(),
        args.seed,
    )?;
    let cfg = SimConfig {
        profile: &run.profile,
        load: &run.load,
        policy: policy.clone(),
        trace: &run.trace,
        duration_s: run.duration_s,
        count_initial_load: args.count_initial_load,
    };
    let (result, timeline) = simulate_with_timeline(&cfg)?;
    print_result(&policy.label(), &result);

    if let Some(path) = &args.emit_timeline {
        write_timeline(path, &timeline)?;
        println!("timeline: {} segments -> {}", timeline.len(), path.display());
    }

    let resolved = json!({
        "schema_version": SCHEMA_VERSION,
        "profile": run.profile.name,
        "policy": policy.label(),
        "loader": run.load.label,
        "traffic": args.traffic,
        "duration_s": run.duration_s,
        "seed": args.seed,
        "count_initial_load": args.count_initial_load,
        "total_arrivals": run.trace.len(),
        "result": result,
    });
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&resolved)?)?;
        let mut outputs: Vec<&std::path::Path> = vec![out];
        if let Some(t) = &args.emit_timeline {
            outputs.push(t);
        }
        RunManifest::new("simulate", resolved, &outputs).write_next_to(out)?;
    }
    Ok(())
}

/// Run several policies on the identical trace and compare.
#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value = "h100")]
    profile: String,
    /// Comma-separated policy list; must include always-on.
    #[arg(long, default_value = "always-on,ttl:300,breakeven")]
    policies: String,
    #[arg(long)]
    traffic: String,
    #[arg(long)]
    duration: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    loader: Option<String>,
    #[arg(long)]
    load_power: Option<f64>,
    #[arg(long)]
    load_time: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_compare(args: &CompareArgs) -> Result<()> {
    let policies: Vec<Policy> = args
        .policies
        .split(',')
        .map(parse_policy)
        .collect::<Result<_>>()?;
    if policies.is_empty() {
        bail!("--policies must name at least one policy");
    }
    let run = resolve_run(
        &args.profile,
        args.loader.as_deref(),
        args.load_power,
        args.load_time,
        &args.traffic,
        args.duration.as_deref(),
        args.seed,
    )?;
    let results = compare_policies(&run.profile, &run.load, &run.trace, &policies)?;
    println!(
        "{} on {} ({} arrivals over {} s):",
        run.profile.name,
        run.trace.spec_label,
        run.trace.len(),
        run.duration_s
    );
    for (policy, result) in policies.iter().zip(&results) {
        print_result(&policy.label(), result);
    }
    if let Some(out) = &args.out {
        let rows: Vec<serde_json::Value> = policies
            .iter()
            .zip(&results)
            .map(|(p, r)| json!({"policy": p.label(), "result": r}))
            .collect();
        let resolved = json!({
            "schema_version": SCHEMA_VERSION,
            "profile": run.profile.name,
            "loader": run.load.label,
            "traffic": args.traffic,
            "duration_s": run.duration_s,
            "seed": args.seed,
            "rows": rows,
        });
        std::fs::write(out, serde_json::to_string_pretty(&resolved)?)?;
        RunManifest::new("compare", resolved, &[out]).write_next_to(out)?;
    }
    Ok(())
}
