//! GPU idle-power modeling and keep-warm policy analysis.
//!
//! The crate bundles five pieces around one observation about datacenter
//! GPUs: holding a CUDA context locks the clocks at boost and costs a
//! fixed power premium, while the VRAM occupancy itself is free at idle.
//!
//! - [`power`]: the piecewise-constant idle-power model, per-architecture
//!   profiles and cold-start load profiles.
//! - [`breakeven`]: the eviction breakeven time `T*` and the critical
//!   arrival rate `λ* = 1/T*`.
//! - [`traffic`]: seeded synthetic arrival processes (steady, bursty,
//!   diurnal) and the trace file format.
//! - [`sim`]: a discrete-event simulator of one GPU under an eviction
//!   policy with exact piecewise energy integration.
//! - [`telemetry`] and [`stats`]: the measurement side — CSV ingest,
//!   state classification, dose-response regression, TOST equivalence,
//!   effective sample size.
//! - [`impact`]: fleet-scale annual energy and CO₂ estimation.
//!
//! Model and statistics types are generic over the scalar via [`Real`]
//! and default to `f64`, which is what the simulator, the file formats
//! and the CLI use throughout.

pub mod breakeven;
pub mod error;
pub mod impact;
pub mod numeric;
pub mod power;
pub mod real;
pub mod sim;
pub mod stats;
pub mod telemetry;
pub mod traffic;

pub use breakeven::{breakeven, breakeven_time, critical_rate, keep_warm_decision, BreakevenResult};
pub use error::{Error, Result};
pub use impact::{annual_parking_energy_gwh, co2_kilotonnes, sensitivity_grid, FleetScenario};
pub use power::{
    builtin_load_profile, builtin_load_profiles, builtin_profile, builtin_profiles, idle_power,
    load_energy, parking_tax, GpuProfile, LoadProfile, LoadStage, MemoryTech,
};
pub use real::Real;
pub use sim::{
    compare_policies, simulate, simulate_with_timeline, sweep_breakeven, Policy, Segment,
    SegmentState, SimConfig, SimResult,
};
pub use stats::{
    dose_response, effective_n, estimate_tau, tost, two_state_stats, EffSampleSize,
    EquivalenceResult, PhaseRecord, RegressionResult, TwoStateResult,
};
pub use telemetry::{
    classify_state, dose_schedule, gen_telemetry, ingest, segment_phases, write_telemetry_csv,
    GpuState, IngestResult, SchedulePhase, TelemetrySample, TelemetrySchedule,
};
pub use traffic::{
    gen_bursty, gen_diurnal, gen_diurnal_with_floor, gen_steady, load_trace,
    reference_traffic_specs, save_trace, ArrivalTrace, TrafficSpec, TrafficVariant,
};

/// Concrete `f64` aliases for the generic model types.
pub type GpuProfileF64 = power::GpuProfile<f64>;
/// Concrete `f64` alias, see [`GpuProfileF64`].
pub type LoadProfileF64 = power::LoadProfile<f64>;
/// Concrete `f64` alias for fleet scenarios.
pub type FleetScenarioF64 = impact::FleetScenario<f64>;
