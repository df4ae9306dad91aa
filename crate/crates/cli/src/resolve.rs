//! Resolution of `--profile`, loader and `--traffic` flag values:
//! built-in names first, then file paths, then inline spec strings.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gpupark_core::power::{builtin_load_profile, builtin_profile, GpuProfile, LoadProfile};
use gpupark_core::sim::Policy;
use gpupark_core::traffic::{load_trace, ArrivalTrace, TrafficSpec, TrafficVariant};

use crate::units::{parse_duration_s, parse_rate_per_hr};

/// `--profile <name|path>`: built-ins (`h100`, `a100`, `l40s`) first,
/// then a JSON profile file.
pub fn resolve_profile(value: &str) -> Result<GpuProfile> {
    if let Some(p) = builtin_profile(value) {
        return Ok(p);
    }
    if Path::new(value).exists() {
        return GpuProfile::from_json_file(value)
            .with_context(|| format!("loading profile file `{value}`"));
    }
    bail!("unknown profile `{value}` (built-ins: h100, a100, l40s; or pass a JSON file)")
}

/// Loader resolution: an explicit constant (`--load-power`/`--load-time`)
/// wins, otherwise `--loader <name|path>` with built-ins first.
pub fn resolve_load(
    loader: Option<&str>,
    load_power_w: Option<f64>,
    load_time_s: Option<f64>,
) -> Result<LoadProfile> {
    match (load_power_w, load_time_s) {
        (Some(p), Some(t)) => {
            let profile = LoadProfile::constant(format!("constant-{p}w-{t}s"), p, t);
            profile.validate()?;
            return Ok(profile);
        }
        (Some(_), None) | (None, Some(_)) => {
            bail!("--load-power and --load-time must be given together")
        }
        (None, None) => {}
    }
    let value = loader.unwrap_or("pytorch70b");
    if let Some(l) = builtin_load_profile(value) {
        return Ok(l);
    }
    if Path::new(value).exists() {
        return LoadProfile::from_json_file(value)
            .with_context(|| format!("loading load-profile file `{value}`"));
    }
    bail!(
        "unknown load profile `{value}` (built-ins: qwen7b, pytorch70b, serverless70b, runai8b, qwen7b-staged; or pass a JSON file)"
    )
}

/// `--policy` spec strings: `always-on`, `ttl:<seconds>`, `breakeven`,
/// `rate:<window_seconds>`, `hysteresis:<low>,<high>`.
pub fn parse_policy(text: &str) -> Result<Policy> {
    let text = text.trim();
    let policy = if text.eq_ignore_ascii_case("always-on") {
        Policy::AlwaysOn
    } else if text.eq_ignore_ascii_case("breakeven") {
        Policy::Breakeven
    } else if let Some(v) = text.strip_prefix("ttl:") {
        Policy::FixedTtl { ttl_s: parse_duration_s(v)? }
    } else if let Some(v) = text.strip_prefix("rate:") {
        Policy::RateThreshold { window_s: parse_duration_s(v)? }
    } else if let Some(v) = text.strip_prefix("hysteresis:") {
        let (lo, hi) = v
            .split_once(',')
            .ok_or_else(|| anyhow!("hysteresis wants `hysteresis:<low>,<high>`"))?;
        Policy::Hysteresis {
            ttl_low_s: parse_duration_s(lo)?,
            ttl_high_s: parse_duration_s(hi)?,
        }
    } else {
        bail!(
            "unknown policy `{text}` (expected always-on | ttl:<s> | breakeven | rate:<window_s> | hysteresis:<lo>,<hi>)"
        )
    };
    policy.validate()?;
    Ok(policy)
}

/// What `--traffic` resolved to.
pub enum TrafficSource {
    File(ArrivalTrace),
    Spec(TrafficSpec),
}

/// `--traffic <spec|trace-file>`: an existing path loads as a trace file;
/// otherwise the value is an inline spec:
/// `steady:<rate>` | `bursty:<low>,<high>,<period>,<duty>` |
/// `diurnal:<peak>,<cycle>[,<floor>[,trough|peak]]`.
pub fn resolve_traffic(value: &str, duration_s: f64) -> Result<TrafficSource> {
    if Path::new(value).exists() {
        let trace = load_trace(value).with_context(|| format!("loading trace `{value}`"))?;
        return Ok(TrafficSource::File(trace));
    }
    let (kind, rest) = value
        .split_once(':')
        .ok_or_else(|| anyhow!("traffic `{value}` is neither a file nor a pattern spec"))?;
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    let variant = match kind.trim().to_ascii_lowercase().as_str() {
        "steady" => {
            if parts.len() != 1 {
                bail!("steady wants `steady:<rate>`");
            }
            TrafficVariant::Steady { rate_per_hr: parse_rate_per_hr(parts[0])? }
        }
        "bursty" => {
            if parts.len() != 4 {
                bail!("bursty wants `bursty:<low>,<high>,<period>,<duty>`");
            }
            TrafficVariant::Bursty {
                low_per_hr: parse_rate_per_hr(parts[0])?,
                high_per_hr: parse_rate_per_hr(parts[1])?,
                period_s: parse_duration_s(parts[2])?,
                low_duty: parts[3].parse().context("bad duty fraction")?,
            }
        }
        "diurnal" => {
            if parts.len() < 2 || parts.len() > 4 {
                bail!("diurnal wants `diurnal:<peak>,<cycle>[,<floor>[,trough|peak]]`");
            }
            let floor_per_hr = if parts.len() >= 3 { parse_rate_per_hr(parts[2])? } else { 0.0 };
            let trough_first = if parts.len() == 4 {
                match parts[3] {
                    "trough" => true,
                    "peak" => false,
                    other => bail!("diurnal phase must be `trough` or `peak`, got `{other}`"),
                }
            } else {
                true
            };
            TrafficVariant::Diurnal {
                peak_per_hr: parse_rate_per_hr(parts[0])?,
                cycle_s: parse_duration_s(parts[1])?,
                floor_per_hr,
                trough_first,
            }
        }
        other => bail!("unknown traffic pattern `{other}`"),
    };
    let spec = TrafficSpec { variant, duration_s };
    spec.validate()?;
    Ok(TrafficSource::Spec(spec))
}
