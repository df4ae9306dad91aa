//! Flag-value parsing for durations and rates.
//!
//! Durations accept `24h`, `90m`, `300s` or bare seconds; rates accept
//! `13.3/hr`, `0.0037/s` or bare requests/hour.

use anyhow::{bail, Context, Result};

/// Parses a duration into seconds.
pub fn parse_duration_s(text: &str) -> Result<f64> {
    let text = text.trim();
    let (num, mult) = if let Some(v) = text.strip_suffix('h') {
        (v, 3600.0)
    } else if let Some(v) = text.strip_suffix('m') {
        (v, 60.0)
    } else if let Some(v) = text.strip_suffix('s') {
        (v, 1.0)
    } else {
        (text, 1.0)
    };
    let value: f64 = num
        .trim()
        .parse()
        .with_context(|| format!("bad duration `{text}` (expected e.g. 24h, 90m, 300s)"))?;
    if !(value * mult).is_finite() || value * mult < 0.0 {
        bail!("duration `{text}` must be a non-negative finite time");
    }
    Ok(value * mult)
}

/// Parses a rate into requests/hour.
pub fn parse_rate_per_hr(text: &str) -> Result<f64> {
    let text = text.trim();
    let (num, mult) = if let Some(v) = text.strip_suffix("/hr") {
        (v, 1.0)
    } else if let Some(v) = text.strip_suffix("/h") {
        (v, 1.0)
    } else if let Some(v) = text.strip_suffix("/s") {
        (v, 3600.0)
    } else {
        (text, 1.0)
    };
    let value: f64 = num
        .trim()
        .parse()
        .with_context(|| format!("bad rate `{text}` (expected e.g. 5/hr or 0.0037/s)"))?;
    if !value.is_finite() || value < 0.0 {
        bail!("rate `{text}` must be non-negative");
    }
    Ok(value * mult)
}
