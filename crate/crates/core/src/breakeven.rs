//! Cold-start energy breakeven and the critical arrival rate.
//!
//! Keeping a model warm costs the parking tax continuously; evicting and
//! reloading costs the load energy once. The two strategies break even
//! after `T* = load_energy / parking_tax` seconds of idle time, and for
//! memoryless arrivals the keep-warm decision reduces to comparing the
//! arrival rate against `λ* = 1/T*`.
//!
//! Staged load profiles are reduced to their total energy, which is exact;
//! the published breakeven figures use the constant-power approximation
//! and coincide with the total-energy form for single-stage profiles.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::power::{load_energy, LoadProfile};
use crate::real::Real;

/// Breakeven summary for one (parking power, load profile) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakevenResult<R: Real = f64> {
    /// Idle time beyond which evicting wins, in seconds.
    pub t_star_s: R,
    /// Critical arrival rate, the exact reciprocal of `t_star_s`.
    pub lambda_star_per_s: R,
    pub park_w: R,
    pub load_energy_j: R,
}

/// `T* = load_energy / park_w` in seconds.
pub fn breakeven_time<R: Real>(park_w: R, load: &LoadProfile<R>) -> Result<R> {
    if !(park_w > R::zero()) {
        return Err(Error::domain(format!(
            "parking power must be positive, got {park_w}"
        )));
    }
    Ok(load_energy(load)? / park_w)
}

/// `λ* = 1/T*` in requests per second.
pub fn critical_rate<R: Real>(park_w: R, load: &LoadProfile<R>) -> Result<R> {
    Ok(breakeven_time(park_w, load)?.recip())
}

/// Keep warm iff the arrival rate strictly exceeds the critical rate.
pub fn keep_warm_decision<R: Real>(
    arrival_rate_per_s: R,
    park_w: R,
    load: &LoadProfile<R>,
) -> Result<bool> {
    if arrival_rate_per_s < R::zero() {
        return Err(Error::domain(format!(
            "arrival rate must be non-negative, got {arrival_rate_per_s}"
        )));
    }
    Ok(arrival_rate_per_s > critical_rate(park_w, load)?)
}

/// Computes the full breakeven summary.
pub fn breakeven<R: Real>(park_w: R, load: &LoadProfile<R>) -> Result<BreakevenResult<R>> {
    let t_star_s = breakeven_time(park_w, load)?;
    Ok(BreakevenResult {
        t_star_s,
        lambda_star_per_s: t_star_s.recip(),
        park_w,
        load_energy_j: load_energy(load)?,
    })
}

/// Formats a breakeven time the way the reference grid prints it:
/// minutes to one decimal at or above a minute, whole seconds below.
pub fn format_breakeven_time(t_star_s: f64) -> String {
    if t_star_s >= 60.0 {
        format!("{:.1} min", t_star_s / 60.0)
    } else {
        format!("{:.0} s", t_star_s)
    }
}
