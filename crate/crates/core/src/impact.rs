//! Fleet-scale annual parking energy and CO₂ estimation.
//!
//! `E_park = N · (1 − ρ) · P̄_park · T_year`, reported in GWh/year, with a
//! three-column low/base/high sensitivity grid and a CO₂ conversion. The
//! default grid intensity of 0.39 kg CO₂/kWh is back-derived from the
//! published base-case figures and is flag-overridable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{cast, Real};

/// Default grid carbon intensity in kg CO₂ per kWh (back-derived, see
/// module docs).
pub const DEFAULT_GRID_INTENSITY_KG_PER_KWH: f64 = 0.39;

/// Hours in a non-leap year.
pub const HOURS_PER_YEAR: f64 = 8760.0;

fn default_hours<R: Real>() -> R {
    cast(HOURS_PER_YEAR)
}

fn default_intensity<R: Real>() -> R {
    cast(DEFAULT_GRID_INTENSITY_KG_PER_KWH)
}

/// One fleet scenario: size, average utilization, fleet-weighted parking
/// power and grid intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetScenario<R: Real = f64> {
    pub n_gpus: R,
    /// Average utilization ρ in `[0, 1]`; the idle fraction is `1 − ρ`.
    pub utilization: R,
    pub park_w: R,
    #[serde(default = "default_hours")]
    pub hours_per_year: R,
    #[serde(default = "default_intensity")]
    pub grid_intensity_kg_per_kwh: R,
}

impl<R: Real> FleetScenario<R> {
    pub fn new(n_gpus: R, utilization: R, park_w: R) -> Self {
        FleetScenario {
            n_gpus,
            utilization,
            park_w,
            hours_per_year: default_hours(),
            grid_intensity_kg_per_kwh: default_intensity(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_gpus < R::zero() {
            return Err(Error::domain("n_gpus must be non-negative"));
        }
        if self.utilization < R::zero() || self.utilization > R::one() {
            return Err(Error::domain("utilization must lie in [0, 1]"));
        }
        if !(self.park_w > R::zero()) {
            return Err(Error::domain("park_w must be positive"));
        }
        if !(self.hours_per_year > R::zero()) {
            return Err(Error::domain("hours_per_year must be positive"));
        }
        if self.grid_intensity_kg_per_kwh < R::zero() {
            return Err(Error::domain("grid intensity must be non-negative"));
        }
        Ok(())
    }

    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self>
    where
        R: serde::de::DeserializeOwned,
    {
        let text = std::fs::read_to_string(path)?;
        let s: Self = serde_json::from_str(&text)?;
        s.validate()?;
        Ok(s)
    }
}

/// Annual parking energy in GWh/year.
pub fn annual_parking_energy_gwh<R: Real>(s: &FleetScenario<R>) -> Result<R> {
    s.validate()?;
    let idle = R::one() - s.utilization;
    let wh = s.n_gpus * idle * s.park_w * s.hours_per_year;
    Ok(wh / cast(1e9))
}

/// Annual CO₂ in kilotonnes from an energy figure in GWh and an intensity
/// in kg/kWh: `GWh · 10⁶ kWh/GWh · kg/kWh / 10⁶ kg/kT`.
pub fn co2_kilotonnes<R: Real>(energy_gwh: R, intensity_kg_per_kwh: R) -> Result<R> {
    if energy_gwh < R::zero() {
        return Err(Error::domain("energy must be non-negative"));
    }
    if intensity_kg_per_kwh < R::zero() {
        return Err(Error::domain("intensity must be non-negative"));
    }
    let kwh = energy_gwh * cast(1e6);
    let kg = kwh * intensity_kg_per_kwh;
    Ok(kg / cast(1e6))
}

/// Low/base/high sensitivity table: the three scenarios plus the
/// resulting annual energy and CO₂ rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityTable<R: Real = f64> {
    pub scenarios: [FleetScenario<R>; 3],
    pub e_park_gwh: [R; 3],
    pub co2_kt: [R; 3],
}

/// Builds the sensitivity grid. The scenarios must be ordered in the
/// energy-increasing direction componentwise: fleet size and parking power
/// non-decreasing, utilization non-increasing (the low-energy corner uses
/// the high utilization).
pub fn sensitivity_grid<R: Real>(
    low: &FleetScenario<R>,
    base: &FleetScenario<R>,
    high: &FleetScenario<R>,
) -> Result<SensitivityTable<R>> {
    if !(low.n_gpus <= base.n_gpus && base.n_gpus <= high.n_gpus) {
        return Err(Error::domain(
            "sensitivity ordering violated for n_gpus (want low <= base <= high)",
        ));
    }
    if !(low.utilization >= base.utilization && base.utilization >= high.utilization) {
        return Err(Error::domain(
            "sensitivity ordering violated for utilization (want low >= base >= high)",
        ));
    }
    if !(low.park_w <= base.park_w && base.park_w <= high.park_w) {
        return Err(Error::domain(
            "sensitivity ordering violated for park_w (want low <= base <= high)",
        ));
    }
    let e = [
        annual_parking_energy_gwh(low)?,
        annual_parking_energy_gwh(base)?,
        annual_parking_energy_gwh(high)?,
    ];
    let co2 = [
        co2_kilotonnes(e[0], low.grid_intensity_kg_per_kwh)?,
        co2_kilotonnes(e[1], base.grid_intensity_kg_per_kwh)?,
        co2_kilotonnes(e[2], high.grid_intensity_kg_per_kwh)?,
    ];
    Ok(SensitivityTable {
        scenarios: [low.clone(), base.clone(), high.clone()],
        e_park_gwh: e,
        co2_kt: co2,
    })
}

/// The published reference corners: low (2.0M, ρ=0.80, 26.3 W),
/// base (3.76M, ρ=0.65, 40 W), high (6.0M, ρ=0.50, 66.4 W).
pub fn reference_corners<R: Real>() -> [FleetScenario<R>; 3] {
    [
        FleetScenario::new(cast(2.0e6), cast(0.80), cast(26.3)),
        FleetScenario::new(cast(3.76e6), cast(0.65), cast(40.0)),
        FleetScenario::new(cast(6.0e6), cast(0.50), cast(66.4)),
    ]
}
