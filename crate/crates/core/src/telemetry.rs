//! DCGM-style telemetry samples: CSV ingest with utilization filtering,
//! idle-state classification, phase segmentation, and a seeded synthetic
//! generator used as the oracle for the statistics pipeline.
//!
//! CSV schema (fixed): `timestamp_s,gpu_id,power_w,sm_clock_mhz,vram_used_gb,util_pct`.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power::{idle_power, GpuProfile};
use crate::stats::PhaseRecord;

/// CSV header for telemetry files.
pub const TELEMETRY_HEADER: &str = "timestamp_s,gpu_id,power_w,sm_clock_mhz,vram_used_gb,util_pct";

/// Sampling cadence of the exporter, in seconds.
pub const SAMPLE_CADENCE_S: f64 = 30.0;

/// Default SM-clock threshold separating bare idle from context-active,
/// midpoint-safe between the highest observed bare-idle clock (345 MHz)
/// and the lowest context clock (1410 MHz).
pub const DEFAULT_CLOCK_THRESHOLD_MHZ: f64 = 700.0;

/// One telemetry sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySample {
    pub timestamp_s: f64,
    pub gpu_id: String,
    pub power_w: f64,
    pub sm_clock_mhz: f64,
    pub vram_used_gb: f64,
    pub util_pct: f64,
}

/// Idle-state classification of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GpuState {
    BareIdle,
    CudaActive,
}

/// `CudaActive` iff the SM clock is at or above the threshold. Total: any
/// sample classifies one way or the other.
pub fn classify_state(sample: &TelemetrySample, clock_threshold_mhz: f64) -> GpuState {
    if sample.sm_clock_mhz >= clock_threshold_mhz {
        GpuState::CudaActive
    } else {
        GpuState::BareIdle
    }
}

/// Ingest outcome: retained samples plus retention accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestResult {
    #[serde(skip)]
    pub samples: Vec<TelemetrySample>,
    pub total_rows: usize,
    pub retained: usize,
}

impl IngestResult {
    pub fn retention_fraction(&self) -> f64 {
        if self.total_rows == 0 {
            0.0
        } else {
            self.retained as f64 / self.total_rows as f64
        }
    }
}

/// Reads a telemetry CSV and keeps rows with `util_pct <= util_filter_pct`.
///
/// Malformed rows fail the whole ingest with their 1-based file line
/// numbers (the header is line 1). An empty result is not an error.
pub fn ingest(path: impl AsRef<Path>, util_filter_pct: f64) -> Result<IngestResult> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    parse_telemetry(file, util_filter_pct)
}

fn parse_telemetry(reader: impl BufRead, util_filter_pct: f64) -> Result<IngestResult> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(Error::Parse { line: 1, msg: "empty telemetry file".to_string() })
        }
    };
    if header.trim() != TELEMETRY_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header `{TELEMETRY_HEADER}`, got `{}`", header.trim()),
        });
    }
    let mut samples = Vec::new();
    let mut total_rows = 0usize;
    let mut bad_rows = Vec::new();
    let mut first_detail = String::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        total_rows += 1;
        match parse_row(text) {
            Ok(sample) => {
                if sample.util_pct <= util_filter_pct {
                    samples.push(sample);
                }
            }
            Err(detail) => {
                if bad_rows.is_empty() {
                    first_detail = detail;
                }
                bad_rows.push(line_no);
            }
        }
    }
    if !bad_rows.is_empty() {
        return Err(Error::MalformedRows { rows: bad_rows, detail: first_detail });
    }
    let retained = samples.len();
    Ok(IngestResult { samples, total_rows, retained })
}

fn parse_row(text: &str) -> std::result::Result<TelemetrySample, String> {
    let fields: Vec<&str> = text.split(',').collect();
    if fields.len() != 6 {
        return Err(format!("expected 6 fields, got {}", fields.len()));
    }
    let num = |i: usize, name: &str| -> std::result::Result<f64, String> {
        fields[i]
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad {name} `{}`: {e}", fields[i].trim()))
    };
    Ok(TelemetrySample {
        timestamp_s: num(0, "timestamp_s")?,
        gpu_id: fields[1].trim().to_string(),
        power_w: num(2, "power_w")?,
        sm_clock_mhz: num(3, "sm_clock_mhz")?,
        vram_used_gb: num(4, "vram_used_gb")?,
        util_pct: num(5, "util_pct")?,
    })
}

/// Writes samples in the fixed CSV schema.
pub fn write_telemetry_csv(samples: &[TelemetrySample], path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "{TELEMETRY_HEADER}")?;
    for s in samples {
        writeln!(
            file,
            "{:.3},{},{:.6},{},{:.6},{}",
            s.timestamp_s, s.gpu_id, s.power_w, s.sm_clock_mhz, s.vram_used_gb, s.util_pct
        )?;
    }
    Ok(())
}

/// One treatment phase of a generator schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulePhase {
    pub vram_gb: f64,
    pub ctx: bool,
    pub duration_s: f64,
}

/// Generator schedule: ordered phases for one GPU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySchedule {
    #[serde(default = "default_gpu_id")]
    pub gpu_id: String,
    pub phases: Vec<SchedulePhase>,
}

fn default_gpu_id() -> String {
    "gpu0".to_string()
}

impl TelemetrySchedule {
    pub fn validate(&self) -> Result<()> {
        if self.phases.is_empty() {
            return Err(Error::domain("schedule has no phases"));
        }
        for (i, p) in self.phases.iter().enumerate() {
            if !(p.duration_s > 0.0) {
                return Err(Error::domain(format!("schedule phase {i}: duration must be positive")));
            }
            if p.vram_gb > 0.0 && !p.ctx {
                return Err(Error::domain(format!(
                    "schedule phase {i}: VRAM without a CUDA context"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let s: Self = serde_json::from_str(&text)?;
        s.validate()?;
        Ok(s)
    }
}

/// The standard dose-response ramp: `n_phases` context-active phases with
/// VRAM stepping evenly from 0 to `max_vram_gb`.
pub fn dose_schedule(n_phases: usize, max_vram_gb: f64, phase_duration_s: f64) -> TelemetrySchedule {
    let phases = (0..n_phases)
        .map(|i| SchedulePhase {
            vram_gb: if n_phases > 1 {
                max_vram_gb * i as f64 / (n_phases - 1) as f64
            } else {
                0.0
            },
            ctx: true,
            duration_s: phase_duration_s,
        })
        .collect();
    TelemetrySchedule { gpu_id: default_gpu_id(), phases }
}

/// Generates telemetry at the 30 s cadence:
/// `power = idle_power(profile, ctx, vram) + N(0, noise_std_w) + drift_w_per_hr · t/3600`.
///
/// The drift term reproduces slow thermal trends; because the dose ramp
/// walks VRAM linearly in time, a drift aliases into the regression slope,
/// which is exactly the confound the analysis pipeline must surface.
pub fn gen_telemetry(
    profile: &GpuProfile,
    schedule: &TelemetrySchedule,
    noise_std_w: f64,
    drift_w_per_hr: f64,
    seed: u64,
) -> Result<Vec<TelemetrySample>> {
    profile.validate()?;
    schedule.validate()?;
    if noise_std_w < 0.0 {
        return Err(Error::domain("noise std must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = if noise_std_w > 0.0 {
        Some(Normal::new(0.0, noise_std_w).map_err(|e| Error::domain(e.to_string()))?)
    } else {
        None
    };
    let mut samples = Vec::new();
    let mut phase_start = 0.0;
    for phase in &schedule.phases {
        let base = idle_power(profile, phase.ctx, phase.vram_gb)?;
        let clock = if phase.ctx { profile.sm_clock_ctx_mhz } else { profile.sm_clock_idle_mhz };
        let count = (phase.duration_s / SAMPLE_CADENCE_S).floor() as usize;
        for k in 0..count.max(1) {
            let t = phase_start + k as f64 * SAMPLE_CADENCE_S;
            let noise = normal.as_ref().map_or(0.0, |n| n.sample(&mut rng));
            let drift = drift_w_per_hr * t / 3600.0;
            samples.push(TelemetrySample {
                timestamp_s: t,
                gpu_id: schedule.gpu_id.clone(),
                power_w: base + noise + drift,
                sm_clock_mhz: clock,
                vram_used_gb: phase.vram_gb,
                util_pct: 0.0,
            });
        }
        phase_start += phase.duration_s;
    }
    Ok(samples)
}

/// Groups time-ordered context-active samples of one GPU into phases: a
/// new phase starts whenever the VRAM level moves by more than the
/// tolerance. Bare-idle samples are skipped.
pub fn segment_phases(
    samples: &[TelemetrySample],
    clock_threshold_mhz: f64,
) -> Result<Vec<PhaseRecord>> {
    const VRAM_TOLERANCE_GB: f64 = 1e-6;
    let mut phases: Vec<PhaseRecord> = Vec::new();
    let mut current_vram: Option<f64> = None;
    let mut bucket: Vec<f64> = Vec::new();
    let flush = |vram: Option<f64>, bucket: &mut Vec<f64>, phases: &mut Vec<PhaseRecord>| -> Result<()> {
        if let Some(v) = vram {
            if !bucket.is_empty() {
                phases.push(PhaseRecord::new(v, std::mem::take(bucket))?);
            }
        }
        Ok(())
    };
    for s in samples {
        if classify_state(s, clock_threshold_mhz) != GpuState::CudaActive {
            continue;
        }
        match current_vram {
            Some(v) if (s.vram_used_gb - v).abs() <= VRAM_TOLERANCE_GB => {
                bucket.push(s.power_w);
            }
            _ => {
                flush(current_vram, &mut bucket, &mut phases)?;
                current_vram = Some(s.vram_used_gb);
                bucket.push(s.power_w);
            }
        }
    }
    flush(current_vram, &mut bucket, &mut phases)?;
    Ok(phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::builtin_profile;

    fn sample(clock: f64) -> TelemetrySample {
        TelemetrySample {
            timestamp_s: 0.0,
            gpu_id: "gpu0".into(),
            power_w: 100.0,
            sm_clock_mhz: clock,
            vram_used_gb: 0.0,
            util_pct: 0.0,
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_state(&sample(345.0), 700.0), GpuState::BareIdle);
        assert_eq!(classify_state(&sample(1980.0), 700.0), GpuState::CudaActive);
        // boundary is inclusive
        assert_eq!(classify_state(&sample(700.0), 700.0), GpuState::CudaActive);
    }

    #[test]
    fn classify_partitions_everything() {
        for clock in [0.0, 210.0, 345.0, 699.9, 700.0, 1410.0, 2520.0] {
            let s = sample(clock);
            let state = classify_state(&s, 700.0);
            assert!(matches!(state, GpuState::BareIdle | GpuState::CudaActive));
        }
    }

    #[test]
    fn generator_zero_noise_hits_the_model_exactly() {
        let p = builtin_profile("h100").unwrap();
        let schedule = TelemetrySchedule {
            gpu_id: "gpu0".into(),
            phases: vec![
                SchedulePhase { vram_gb: 0.0, ctx: false, duration_s: 120.0 },
                SchedulePhase { vram_gb: 16.0, ctx: true, duration_s: 120.0 },
            ],
        };
        let samples = gen_telemetry(&p, &schedule, 0.0, 0.0, 1).unwrap();
        assert_eq!(samples.len(), 8);
        for s in &samples[..4] {
            assert_eq!(s.power_w, 71.8);
            assert_eq!(s.sm_clock_mhz, 345.0);
        }
        for s in &samples[4..] {
            assert!((s.power_w - (121.7 - 0.002 * 16.0)).abs() < 1e-12);
            assert_eq!(s.sm_clock_mhz, 1980.0);
        }
    }

    #[test]
    fn generator_noise_std_is_honored() {
        let p = builtin_profile("h100").unwrap();
        let schedule = TelemetrySchedule {
            gpu_id: "gpu0".into(),
            phases: vec![SchedulePhase { vram_gb: 0.0, ctx: true, duration_s: 2000.0 * 30.0 }],
        };
        let samples = gen_telemetry(&p, &schedule, 0.17, 0.0, 5).unwrap();
        assert_eq!(samples.len(), 2000);
        let mean = samples.iter().map(|s| s.power_w).sum::<f64>() / 2000.0;
        let var = samples
            .iter()
            .map(|s| (s.power_w - mean).powi(2))
            .sum::<f64>()
            / 1999.0;
        let std = var.sqrt();
        assert!((std - 0.17).abs() / 0.17 < 0.10, "std {std}");
    }

    #[test]
    fn generator_determinism() {
        let p = builtin_profile("a100").unwrap();
        let schedule = dose_schedule(10, 72.0, 300.0);
        let a = gen_telemetry(&p, &schedule, 0.08, -0.01, 9).unwrap();
        let b = gen_telemetry(&p, &schedule, 0.08, -0.01, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip_and_filtering() {
        let p = builtin_profile("h100").unwrap();
        let schedule = dose_schedule(4, 48.0, 120.0);
        let mut samples = gen_telemetry(&p, &schedule, 0.1, 0.0, 3).unwrap();
        // tag three rows as busy; ingest at util 0 must drop them
        samples[1].util_pct = 35.0;
        samples[5].util_pct = 2.0;
        samples[9].util_pct = 100.0;
        let dir = std::env::temp_dir().join("gpupark-core-telemetry-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.csv");
        write_telemetry_csv(&samples, &path).unwrap();

        let strict = ingest(&path, 0.0).unwrap();
        assert_eq!(strict.total_rows, 16);
        assert_eq!(strict.retained, 13);
        assert!((strict.retention_fraction() - 13.0 / 16.0).abs() < 1e-12);

        let all = ingest(&path, 100.0).unwrap();
        assert_eq!(all.retained, 16);
    }

    #[test]
    fn ingest_retention_mirrors_production_rate() {
        // 1000 rows, 997 idle: retention 99.7%
        let mut text = String::from(TELEMETRY_HEADER);
        text.push('\n');
        for i in 0..1000 {
            let util = if i % 333 == 5 { 50.0 } else { 0.0 };
            text.push_str(&format!("{},gpu0,121.7,1980,8.0,{util}\n", i as f64 * 30.0));
        }
        let dir = std::env::temp_dir().join("gpupark-core-telemetry-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("retention.csv");
        std::fs::write(&path, text).unwrap();
        let r = ingest(&path, 0.0).unwrap();
        assert_eq!(r.total_rows, 1000);
        assert_eq!(r.retained, 997);
        assert!((r.retention_fraction() - 0.997).abs() < 1e-12);
    }

    #[test]
    fn malformed_rows_are_reported_with_line_numbers() {
        let text = format!(
            "{TELEMETRY_HEADER}\n0,gpu0,121.7,1980,8.0,0\n30,gpu0,not-a-watt,1980,8.0,0\n60,gpu0,121.7,1980,8.0,0\n90,gpu0,121.7,1980\n"
        );
        let dir = std::env::temp_dir().join("gpupark-core-telemetry-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, text).unwrap();
        match ingest(&path, 0.0) {
            Err(Error::MalformedRows { rows, detail }) => {
                assert_eq!(rows, vec![3, 5]);
                assert!(detail.contains("power_w"), "{detail}");
            }
            other => panic!("expected malformed-rows error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_header_rejected() {
        let dir = std::env::temp_dir().join("gpupark-core-telemetry-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("hdr.csv");
        std::fs::write(&path, "time,power\n1,2\n").unwrap();
        match ingest(&path, 0.0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_result_is_not_an_error() {
        let dir = std::env::temp_dir().join("gpupark-core-telemetry-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("busy.csv");
        std::fs::write(
            &path,
            format!("{TELEMETRY_HEADER}\n0,gpu0,300.0,1980,8.0,90\n"),
        )
        .unwrap();
        let r = ingest(&path, 0.0).unwrap();
        assert_eq!(r.retained, 0);
        assert_eq!(r.total_rows, 1);
    }

    #[test]
    fn phase_segmentation_recovers_the_schedule() {
        let p = builtin_profile("h100").unwrap();
        let mut schedule = dose_schedule(5, 64.0, 300.0);
        // prepend a bare-idle phase that segmentation must skip
        schedule.phases.insert(
            0,
            SchedulePhase { vram_gb: 0.0, ctx: false, duration_s: 300.0 },
        );
        let samples = gen_telemetry(&p, &schedule, 0.0, 0.0, 2).unwrap();
        let phases = segment_phases(&samples, DEFAULT_CLOCK_THRESHOLD_MHZ).unwrap();
        assert_eq!(phases.len(), 5);
        assert_eq!(phases[0].vram_gb, 0.0);
        assert_eq!(phases[4].vram_gb, 64.0);
        for ph in &phases {
            assert_eq!(ph.n_samples, 10);
        }
    }
}
