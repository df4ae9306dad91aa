//! Piecewise-constant GPU idle-power model and cold-start load profiles.
//!
//! Idle power is modeled as a base level plus a discrete step that appears
//! as soon as a CUDA context exists (the context locks the SM clocks at
//! boost), plus a per-GB slope for allocated VRAM. The slope is carried
//! explicitly so the model stays falsifiable even though the fitted values
//! for the built-in profiles are indistinguishable from zero in practice.
//! Power is exactly piecewise constant within a state; there is no thermal
//! drift term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{cast, Real};

/// GPU memory technology of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MemoryTech {
    #[serde(rename = "HBM3")]
    Hbm3,
    #[serde(rename = "HBM2e")]
    Hbm2e,
    #[serde(rename = "GDDR6")]
    Gddr6,
}

/// Per-architecture idle-power parameters.
///
/// `p_base_w` is bare idle (no CUDA context), `p_ctx_w` is idle with a
/// context and zero VRAM allocated, `beta_w_per_gb` is the marginal VRAM
/// slope. Profiles are plain data and can be loaded from a JSON file with
/// exactly these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpuProfile<R: Real = f64> {
    pub name: String,
    pub memory_tech: MemoryTech,
    pub tdp_w: R,
    pub p_base_w: R,
    pub p_ctx_w: R,
    pub beta_w_per_gb: R,
    pub sm_clock_idle_mhz: R,
    pub sm_clock_ctx_mhz: R,
    pub max_vram_gb: R,
}

impl<R: Real> GpuProfile<R> {
    /// Checks the structural invariants: `0 < p_base < p_ctx < tdp`,
    /// context clock above idle clock, positive VRAM capacity.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::domain(format!(
                "invalid profile `{}`: {reason}",
                self.name
            )))
        };
        if !(self.p_base_w > R::zero()) {
            return fail("p_base_w must be positive");
        }
        if !(self.p_ctx_w > self.p_base_w) {
            return fail("p_ctx_w must exceed p_base_w");
        }
        if !(self.p_ctx_w < self.tdp_w) {
            return fail("p_ctx_w must be below tdp_w");
        }
        if !(self.sm_clock_ctx_mhz > self.sm_clock_idle_mhz) {
            return fail("sm_clock_ctx_mhz must exceed sm_clock_idle_mhz");
        }
        if !(self.max_vram_gb > R::zero()) {
            return fail("max_vram_gb must be positive");
        }
        Ok(())
    }

    /// Idle power premium paid solely for holding a CUDA context.
    pub fn parking_tax_w(&self) -> R {
        parking_tax(self)
    }

    /// Reads a profile from a JSON file.
    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self>
    where
        R: serde::de::DeserializeOwned,
    {
        let text = std::fs::read_to_string(path)?;
        let profile: Self = serde_json::from_str(&text)?;
        profile.validate()?;
        Ok(profile)
    }
}

/// Evaluates the idle-power model.
///
/// Returns `p_base + (p_ctx - p_base)·[ctx] + beta·vram·[ctx]`. The VRAM
/// slope applies only when a context exists, because allocation requires
/// one; asking for `vram_gb > 0` with `ctx = false` is a domain error, as
/// is VRAM outside `[0, max_vram_gb]`.
pub fn idle_power<R: Real>(profile: &GpuProfile<R>, ctx: bool, vram_gb: R) -> Result<R> {
    if vram_gb < R::zero() || vram_gb > profile.max_vram_gb {
        return Err(Error::domain(format!(
            "vram_gb {vram_gb} outside [0, {}] for profile `{}`",
            profile.max_vram_gb, profile.name
        )));
    }
    if !ctx && vram_gb > R::zero() {
        return Err(Error::domain(
            "VRAM cannot be allocated without a CUDA context".to_string(),
        ));
    }
    if ctx {
        Ok(profile.p_ctx_w + profile.beta_w_per_gb * vram_gb)
    } else {
        Ok(profile.p_base_w)
    }
}

/// The context power step: `p_ctx_w - p_base_w`.
pub fn parking_tax<R: Real>(profile: &GpuProfile<R>) -> R {
    profile.p_ctx_w - profile.p_base_w
}

/// One constant-power stage of a cold-start load profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadStage<R: Real = f64> {
    pub duration_s: R,
    pub power_w: R,
}

/// Cold-start power-versus-time description: an ordered list of
/// constant-power stages. A constant profile is a single-stage list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile<R: Real = f64> {
    pub label: String,
    pub stages: Vec<LoadStage<R>>,
}

impl<R: Real> LoadProfile<R> {
    /// Single-stage constant-power profile.
    pub fn constant(label: impl Into<String>, power_w: R, duration_s: R) -> Self {
        LoadProfile {
            label: label.into(),
            stages: vec![LoadStage { duration_s, power_w }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::domain(format!(
                "load profile `{}` has no stages",
                self.label
            )));
        }
        for (i, s) in self.stages.iter().enumerate() {
            if !(s.duration_s > R::zero()) || !(s.power_w > R::zero()) {
                return Err(Error::domain(format!(
                    "load profile `{}` stage {i}: duration and power must be positive",
                    self.label
                )));
            }
        }
        Ok(())
    }

    /// Total loading time, the sum of stage durations.
    pub fn total_duration_s(&self) -> R {
        self.stages
            .iter()
            .fold(R::zero(), |acc, s| acc + s.duration_s)
    }

    /// Total loading energy in joules, the sum of stage `duration × power`.
    pub fn total_energy_j(&self) -> R {
        self.stages
            .iter()
            .fold(R::zero(), |acc, s| acc + s.duration_s * s.power_w)
    }

    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self>
    where
        R: serde::de::DeserializeOwned,
    {
        let text = std::fs::read_to_string(path)?;
        let profile: Self = serde_json::from_str(&text)?;
        profile.validate()?;
        Ok(profile)
    }
}

/// Cold-start energy in joules. Errors on an empty stage list.
pub fn load_energy<R: Real>(profile: &LoadProfile<R>) -> Result<R> {
    profile.validate()?;
    Ok(profile.total_energy_j())
}

/// The three built-in GPU profiles.
pub fn builtin_profiles<R: Real>() -> Vec<GpuProfile<R>> {
    vec![
        GpuProfile {
            name: "h100".to_string(),
            memory_tech: MemoryTech::Hbm3,
            tdp_w: cast(700.0),
            p_base_w: cast(71.8),
            p_ctx_w: cast(121.7),
            beta_w_per_gb: cast(-0.002),
            sm_clock_idle_mhz: cast(345.0),
            sm_clock_ctx_mhz: cast(1980.0),
            max_vram_gb: cast(80.0),
        },
        GpuProfile {
            name: "a100".to_string(),
            memory_tech: MemoryTech::Hbm2e,
            tdp_w: cast(300.0),
            p_base_w: cast(53.7),
            p_ctx_w: cast(80.0),
            beta_w_per_gb: cast(-0.001),
            sm_clock_idle_mhz: cast(210.0),
            sm_clock_ctx_mhz: cast(1410.0),
            max_vram_gb: cast(80.0),
        },
        GpuProfile {
            name: "l40s".to_string(),
            memory_tech: MemoryTech::Gddr6,
            tdp_w: cast(350.0),
            p_base_w: cast(35.6),
            p_ctx_w: cast(102.1),
            beta_w_per_gb: cast(-0.002),
            sm_clock_idle_mhz: cast(210.0),
            sm_clock_ctx_mhz: cast(2520.0),
            max_vram_gb: cast(48.0),
        },
    ]
}

/// Looks up a built-in GPU profile by case-insensitive name.
pub fn builtin_profile<R: Real>(name: &str) -> Option<GpuProfile<R>> {
    let lower = name.to_ascii_lowercase();
    builtin_profiles().into_iter().find(|p| p.name == lower)
}

/// Built-in cold-start load profiles: four constant profiles plus the
/// measured staged profile for a small model (CPU-side deserialization,
/// a short transfer burst, then settling at context-idle power).
pub fn builtin_load_profiles<R: Real>() -> Vec<LoadProfile<R>> {
    vec![
        LoadProfile::constant("qwen7b", cast(124.0), cast(30.0)),
        LoadProfile::constant("pytorch70b", cast(300.0), cast(45.0)),
        LoadProfile::constant("serverless70b", cast(300.0), cast(8.0)),
        LoadProfile::constant("runai8b", cast(200.0), cast(5.0)),
        LoadProfile {
            label: "qwen7b-staged".to_string(),
            stages: vec![
                LoadStage { duration_s: cast(22.0), power_w: cast(70.8) },
                LoadStage { duration_s: cast(3.0), power_w: cast(124.1) },
                LoadStage { duration_s: cast(4.7), power_w: cast(121.0) },
            ],
        },
    ]
}

/// Looks up a built-in load profile by case-insensitive label.
pub fn builtin_load_profile<R: Real>(label: &str) -> Option<LoadProfile<R>> {
    let lower = label.to_ascii_lowercase();
    builtin_load_profiles()
        .into_iter()
        .find(|p| p.label == lower)
}
