use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use gpupark_core::breakeven::{breakeven_time, format_breakeven_time};
use gpupark_core::impact::{annual_parking_energy_gwh, reference_corners};
use gpupark_core::power::{builtin_profile, builtin_profiles, parking_tax, LoadProfile};
use gpupark_core::sim::{compare_policies, Policy};
use gpupark_core::stats::{dose_response, tost};
use gpupark_core::telemetry::{dose_schedule, gen_telemetry, segment_phases};
use gpupark_core::traffic::reference_traffic_specs;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::reference;

const DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    /// Breakeven grid at the H100 parking tax.
    Table3,
    /// Fleet-impact sensitivity corners.
    Table4,
    /// Policy comparison across the three traffic patterns.
    Table5,
    /// Per-architecture power decomposition (base + context overhead).
    FigDecomp,
    /// Synthetic dose-response points with fitted slopes.
    FigDose,
}

/// Regenerate a bundled reference table or figure dataset and compare it
/// against the published values.
#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_enum)]
    table: Table,
    /// Comma-separated seed list for stochastic tables (default 0..19).
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Output directory.
    #[arg(long, default_value = "reproduce-out")]
    out: PathBuf,
}

struct Outcome {
    rows: usize,
    failed: usize,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

fn table3(dir: &Path) -> Result<(Outcome, Vec<PathBuf>)> {
    let h100 = builtin_profile::<f64>("h100").unwrap();
    let park = parking_tax(&h100);
    let mut csv = String::from("loader,p_load_w,t_load_s,t_star_s,printed,reference,pass\n");
    let mut failed = 0;
    for (label, p_load, t_load, want) in reference::BREAKEVEN_GRID {
        let load = LoadProfile::constant(label, p_load, t_load);
        let t = breakeven_time(park, &load)?;
        let printed = format_breakeven_time(t);
        let pass = printed == want;
        failed += usize::from(!pass);
        println!("table3 {label:<14} T* = {t:7.1} s -> {printed:<8} (reference {want}): {}", verdict(pass));
        writeln!(csv, "{label},{p_load},{t_load},{t:.3},{printed},{want},{}", verdict(pass))?;
    }
    let path = write_file(dir, "table3.csv", &csv)?;
    Ok((Outcome { rows: 4, failed }, vec![path]))
}

fn table4(dir: &Path) -> Result<(Outcome, Vec<PathBuf>)> {
    let corners = reference_corners::<f64>();
    let mut csv =
        String::from("corner,n_gpus,utilization,park_w,e_park_gwh,reference_gwh,pass\n");
    let mut failed = 0;
    for (scenario, (label, want)) in corners.iter().zip(reference::IMPACT_GRID) {
        let e = annual_parking_energy_gwh(scenario)?;
        let pass = (e - want).abs() <= 1.0;
        failed += usize::from(!pass);
        println!(
            "table4 {label:<5} E_park = {e:8.1} GWh (reference {want} ± 1): {}",
            verdict(pass)
        );
        writeln!(
            csv,
            "{label},{},{},{},{e:.4},{want},{}",
            scenario.n_gpus,
            scenario.utilization,
            scenario.park_w,
            verdict(pass)
        )?;
    }
    let path = write_file(dir, "table4.csv", &csv)?;
    Ok((Outcome { rows: 3, failed }, vec![path]))
}

fn table5(dir: &Path, seeds: &[u64]) -> Result<(Outcome, Vec<PathBuf>)> {
    let profile = builtin_profile::<f64>("h100").unwrap();
    let load = LoadProfile::constant("pytorch70b", 300.0, 45.0);
    let policies = [
        Policy::AlwaysOn,
        Policy::FixedTtl { ttl_s: 300.0 },
        Policy::Breakeven,
    ];
    let labels = ["always-on", "ttl:300", "breakeven"];
    let patterns = ["steady", "bursty", "diurnal"];
    let specs = reference_traffic_specs(DAY);

    let mut runs_csv =
        String::from("pattern,policy,seed,energy_wh,savings_pct,cold_starts,avg_latency_s\n");
    let mut sums = vec![[(0.0f64, 0.0f64, 0.0f64, 0.0f64); 3]; 3];
    for (pi, spec) in specs.iter().enumerate() {
        for &seed in seeds {
            let trace = spec.generate(seed)?;
            let results = compare_policies(&profile, &load, &trace, &policies)?;
            for (ki, r) in results.iter().enumerate() {
                let s = &mut sums[pi][ki];
                s.0 += r.energy_wh;
                s.1 += r.savings_vs_always_on_pct.unwrap_or(0.0);
                s.2 += r.cold_starts as f64;
                s.3 += r.avg_added_latency_s;
                writeln!(
                    runs_csv,
                    "{},{},{seed},{:.4},{:.4},{},{:.4}",
                    patterns[pi],
                    labels[ki],
                    r.energy_wh,
                    r.savings_vs_always_on_pct.unwrap_or(0.0),
                    r.cold_starts,
                    r.avg_added_latency_s
                )?;
            }
        }
    }

    let n = seeds.len() as f64;
    let mut summary_csv = String::from(
        "pattern,policy,mean_energy_wh,mean_savings_pct,mean_cold_starts,mean_latency_s,ref_energy_wh,ref_savings_pct,ref_cold_starts,pass\n",
    );
    let mut failed = 0;
    let mut rows = 0;
    for (pi, pattern) in patterns.iter().enumerate() {
        for (ki, policy) in labels.iter().enumerate() {
            let (e, s, c, l) = sums[pi][ki];
            let (e, s, c, l) = (e / n, s / n, c / n, l / n);
            let reference_row = reference::POLICY_ROWS
                .iter()
                .find(|r| r.pattern == *pattern && r.policy == *policy)
                .expect("reference row");
            // gates: always-on rows are deterministic; breakeven rows carry
            // the published tolerance bands; fixed-TTL rows are informational
            let pass = match *policy {
                "always-on" => Some(
                    (e - 2920.8).abs() <= 1.0 && c == 1.0 && l == 0.0,
                ),
                "breakeven" => {
                    let (_, s_tol, c_tol, lat_band) = reference::POLICY_BANDS
                        .iter()
                        .find(|b| b.0 == *pattern)
                        .copied()
                        .expect("band");
                    let mut ok =
                        (s - reference_row.savings_pct.unwrap()).abs() <= s_tol;
                    if let Some(ct) = c_tol {
                        ok &= (c - reference_row.cold_starts).abs() <= ct;
                    }
                    if let Some((lo, hi)) = lat_band {
                        ok &= l >= lo && l <= hi;
                    }
                    Some(ok)
                }
                _ => None,
            };
            let verdict_text = match pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "n/a",
            };
            if pass == Some(false) {
                failed += 1;
            }
            if pass.is_some() {
                rows += 1;
            }
            println!(
                "table5 {pattern:<8} {policy:<10} energy {e:8.1} Wh  savings {s:5.1}%  cold {c:6.1}  latency {l:5.2} s  (reference {:.0} Wh / {} / {:.0}): {verdict_text}",
                reference_row.energy_wh,
                reference_row
                    .savings_pct
                    .map(|v| format!("{v:.1}%"))
                    .unwrap_or_else(|| "-".into()),
                reference_row.cold_starts
            );
            writeln!(
                summary_csv,
                "{pattern},{policy},{e:.4},{s:.4},{c:.2},{l:.4},{:.0},{},{:.0},{verdict_text}",
                reference_row.energy_wh,
                reference_row
                    .savings_pct
                    .map(|v| format!("{v:.1}"))
                    .unwrap_or_default(),
                reference_row.cold_starts
            )?;
        }
    }
    let p1 = write_file(dir, "table5_runs.csv", &runs_csv)?;
    let p2 = write_file(dir, "table5_summary.csv", &summary_csv)?;
    Ok((Outcome { rows, failed }, vec![p1, p2]))
}

fn fig_decomp(dir: &Path) -> Result<(Outcome, Vec<PathBuf>)> {
    let mut csv = String::from(
        "profile,p_base_w,parking_tax_w,p_ctx_w,tax_pct_of_tdp,ref_tax_w,ref_pct,pass\n",
    );
    let mut failed = 0;
    for p in builtin_profiles::<f64>() {
        let tax = parking_tax(&p);
        let pct = 100.0 * tax / p.tdp_w;
        let (_, ref_tax, ref_pct) = reference::DECOMP_ROWS
            .iter()
            .find(|r| r.0 == p.name)
            .copied()
            .expect("decomp row");
        // 0.11 W covers the print-rounding gap of the published overhead
        let pass = (tax - ref_tax).abs() <= 0.11 && (pct - ref_pct).abs() <= 0.06;
        failed += usize::from(!pass);
        println!(
            "fig_decomp {:<5} base {:5.1} W + context {tax:5.1} W = {:5.1} W ({pct:4.1}% of TDP; reference {ref_tax} W / {ref_pct}%): {}",
            p.name,
            p.p_base_w,
            p.p_ctx_w,
            verdict(pass)
        );
        writeln!(
            csv,
            "{},{},{tax:.4},{},{pct:.3},{ref_tax},{ref_pct},{}",
            p.name,
            p.p_base_w,
            p.p_ctx_w,
            verdict(pass)
        )?;
    }
    let path = write_file(dir, "fig_decomp.csv", &csv)?;
    Ok((Outcome { rows: 3, failed }, vec![path]))
}

fn fig_dose(dir: &Path, seeds: &[u64]) -> Result<(Outcome, Vec<PathBuf>)> {
    let seed = seeds.first().copied().unwrap_or(0);
    let mut points_csv = String::from("profile,vram_gb,mean_power_w,n_samples\n");
    let mut fit_csv = String::from(
        "profile,slope_w_per_gb,intercept_w,ci95_lo,ci95_hi,p_two_sided,p_tost,equivalent,pass\n",
    );
    let mut failed = 0;
    for (name, sigma, max_vram) in reference::DOSE_SETTINGS {
        let profile = builtin_profile::<f64>(name).unwrap();
        let schedule = dose_schedule(40, max_vram, 1200.0);
        let samples = gen_telemetry(&profile, &schedule, sigma, 0.0, seed)?;
        let phases = segment_phases(&samples, 700.0)?;
        for ph in &phases {
            writeln!(points_csv, "{name},{:.4},{:.6},{}", ph.vram_gb, ph.mean_w, ph.n_samples)?;
        }
        let reg = dose_response(&phases)?;
        let eq = tost(&reg, 0.1)?;
        let pass = eq.equivalent && reg.slope_w_per_gb.abs() < 0.1;
        failed += usize::from(!pass);
        println!(
            "fig_dose {name:<5} slope {:+.4} W/GB (CI [{:+.4}, {:+.4}], p {:.3}), TOST p {:.2e} -> {}: {}",
            reg.slope_w_per_gb,
            reg.ci95_lo,
            reg.ci95_hi,
            reg.p_two_sided,
            eq.p_tost,
            if eq.equivalent { "equivalent" } else { "not equivalent" },
            verdict(pass)
        );
        writeln!(
            fit_csv,
            "{name},{:.6},{:.4},{:.6},{:.6},{:.6},{:.3e},{},{}",
            reg.slope_w_per_gb,
            reg.intercept_w,
            reg.ci95_lo,
            reg.ci95_hi,
            reg.p_two_sided,
            eq.p_tost,
            eq.equivalent,
            verdict(pass)
        )?;
    }
    let p1 = write_file(dir, "fig_dose_points.csv", &points_csv)?;
    let p2 = write_file(dir, "fig_dose_fit.csv", &fit_csv)?;
    Ok((Outcome { rows: 3, failed }, vec![p1, p2]))
}

pub fn run(args: &ReproduceArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let seeds = args.seeds.clone().unwrap_or_else(reference::default_seeds);
    if seeds.is_empty() {
        bail!("--seeds must name at least one seed");
    }
    let (outcome, mut outputs) = match args.table {
        Table::Table3 => table3(&args.out)?,
        Table::Table4 => table4(&args.out)?,
        Table::Table5 => table5(&args.out, &seeds)?,
        Table::FigDecomp => fig_decomp(&args.out)?,
        Table::FigDose => fig_dose(&args.out, &seeds)?,
    };
    let resolved = json!({
        "table": format!("{:?}", args.table).to_lowercase(),
        "seeds": seeds,
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "rows_checked": outcome.rows,
        "rows_failed": outcome.failed,
    });
    let manifest_target = outputs.first().cloned().unwrap_or_else(|| args.out.join("x"));
    let refs: Vec<&Path> = outputs.iter().map(|p| p.as_path()).collect();
    let manifest_path = RunManifest::new("reproduce", resolved, &refs).write_next_to(&manifest_target)?;
    outputs.push(manifest_path);
    println!(
        "reproduce: {} gated rows, {} failed; outputs in {}",
        outcome.rows,
        outcome.failed,
        args.out.display()
    );
    if outcome.failed > 0 {
        bail!("{} reproduction checks failed", outcome.failed);
    }
    Ok(())
}
