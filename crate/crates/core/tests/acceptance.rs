//! Acceptance suite: one test per release criterion, each printing a
//! single pass/fail line. Run with `--nocapture` to see the lines:
//!
//! ```text
//! cargo test -p gpupark-core --test acceptance -- --nocapture
//! ```

use std::time::{Duration, Instant};

use gpupark_core::breakeven::{breakeven_time, critical_rate, format_breakeven_time};
use gpupark_core::impact::{
    annual_parking_energy_gwh, co2_kilotonnes, reference_corners, sensitivity_grid,
    DEFAULT_GRID_INTENSITY_KG_PER_KWH,
};
use gpupark_core::numeric::student_t_cdf;
use gpupark_core::power::{
    builtin_profile, builtin_profiles, parking_tax, GpuProfile, LoadProfile,
};
use gpupark_core::sim::{
    compare_policies, simulate_with_timeline, Policy,SimConfig, SimResult,
};
use gpupark_core::stats::{dose_response, effective_n, tost, two_state_stats};
use gpupark_core::telemetry::{dose_schedule, gen_telemetry, segment_phases};
use gpupark_core::traffic::{
    gen_bursty, gen_diurnal, gen_steady, load_trace, reference_traffic_specs, save_trace,
    ArrivalTrace,
};

const DAY: f64 = 86_400.0;

fn report(id: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[{id}] {verdict} — {detail}");
    assert!(pass, "[{id}] FAIL — {detail}");
}

fn within_budget(started: Instant, budget: Duration) -> (bool, f64) {
    let elapsed = started.elapsed();
    (elapsed <= budget, elapsed.as_secs_f64())
}

fn pytorch() -> LoadProfile {
    LoadProfile::constant("pytorch70b", 300.0, 45.0)
}

/// Runs a simulation, re-integrates the emitted timeline independently,
/// and asserts the 1e-9 relative energy-conservation bound plus the exact
/// window closure of the state times.
fn sim_checked(cfg: &SimConfig) -> SimResult {
    let (result, timeline) = simulate_with_timeline(cfg).unwrap();
    let mut joules = 0.0;
    for seg in &timeline {
        joules += seg.power_w * (seg.t_end_s - seg.t_start_s);
    }
    let reported = result.energy_wh * 3600.0;
    let rel = (joules - reported).abs() / reported.max(1e-12);
    assert!(rel < 1e-9, "energy re-integration off by {rel}");
    assert_eq!(
        (result.time_warm_s + result.time_loading_s) + result.time_evicted_s,
        cfg.duration_s
    );
    result
}

#[test]
fn c01_breakeven_grid_printed_precision() {
    let started = Instant::now();
    let rows: [(f64, f64, f64, &str); 4] = [
        (124.0, 30.0, 74.5, "1.2 min"),
        (300.0, 45.0, 270.5, "4.5 min"),
        (300.0, 8.0, 48.1, "48 s"),
        (200.0, 5.0, 20.0, "20 s"),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (p_load, t_load, want_s, want_printed) in rows {
        let load = LoadProfile::constant("row", p_load, t_load);
        let t = breakeven_time(49.9, &load).unwrap();
        let printed = format_breakeven_time(t);
        let ok = (t * 10.0).round() / 10.0 == want_s && printed == want_printed;
        pass &= ok;
        detail.push_str(&format!("{t:.1}s->{printed}; "));
    }
    let (in_time, secs) = within_budget(started, Duration::from_millis(100));
    pass &= in_time;
    report(
        "C01 breakeven grid",
        pass,
        &format!("{detail}runtime {secs:.4}s (budget 0.1s)"),
    );
}

#[test]
fn c02_cross_architecture_breakeven_times() {
    let started = Instant::now();
    let load = pytorch();
    let mut pass = true;
    let mut detail = String::new();
    for (name, want) in [("h100", 271i64), ("a100", 513), ("l40s", 203)] {
        let p: GpuProfile = builtin_profile(name).unwrap();
        let t = breakeven_time(parking_tax(&p), &load).unwrap();
        let rounded = t.round() as i64;
        pass &= rounded == want;
        detail.push_str(&format!("{name}: {t:.1}s -> {rounded} (want {want}); "));
    }
    let (in_time, secs) = within_budget(started, Duration::from_millis(100));
    pass &= in_time;
    report(
        "C02 cross-architecture T*",
        pass,
        &format!("{detail}runtime {secs:.4}s"),
    );
}

#[test]
fn c03_critical_rates() {
    let started = Instant::now();
    let load = pytorch();
    let mut pass = true;
    let mut detail = String::new();
    for (name, want) in [("h100", 13.0), ("a100", 7.0), ("l40s", 18.0)] {
        let p: GpuProfile = builtin_profile(name).unwrap();
        let per_hr = critical_rate(parking_tax(&p), &load).unwrap() * 3600.0;
        pass &= (per_hr - want).abs() <= 0.5;
        detail.push_str(&format!("{name}: {per_hr:.2}/hr (want {want}±0.5); "));
    }
    let (in_time, secs) = within_budget(started, Duration::from_millis(100));
    pass &= in_time;
    report("C03 critical rates", pass, &format!("{detail}runtime {secs:.4}s"));
}

#[test]
fn c04_impact_grid() {
    let started = Instant::now();
    let [low, base, high] = reference_corners::<f64>();
    let table = sensitivity_grid(&low, &base, &high).unwrap();
    let want = [92.0, 462.0, 1745.0];
    let mut pass = true;
    let mut detail = String::new();
    for (e, w) in table.e_park_gwh.iter().zip(want) {
        pass &= (e - w).abs() <= 1.0;
        detail.push_str(&format!("{e:.1} GWh (want {w}±1); "));
    }
    let co2 = co2_kilotonnes(
        annual_parking_energy_gwh(&base).unwrap(),
        DEFAULT_GRID_INTENSITY_KG_PER_KWH,
    )
    .unwrap();
    pass &= (co2 - 180.0).abs() <= 1.0;
    detail.push_str(&format!("CO2 base {co2:.2} kT (want 180±1)"));
    let (in_time, secs) = within_budget(started, Duration::from_millis(100));
    pass &= in_time;
    report("C04 impact grid", pass, &format!("{detail}; runtime {secs:.4}s"));
}

#[test]
fn c05_always_on_baseline() {
    let started = Instant::now();
    let profile: GpuProfile = builtin_profile("h100").unwrap();
    let load = pytorch();
    let trace = gen_steady(5.0, DAY, 0).unwrap();
    let cfg = SimConfig {
        profile: &profile,
        load: &load,
        policy: Policy::AlwaysOn,
        trace: &trace,
        duration_s: DAY,
        count_initial_load: true,
    };
    let r = sim_checked(&cfg);
    let mut pass = (r.energy_wh - 2920.8).abs() < 1e-9;
    pass &= (r.energy_wh - 2921.0).abs() <= 1.0;
    pass &= r.avg_added_latency_s == 0.0;
    pass &= r.cold_starts == 1;
    let (in_time, secs) = within_budget(started, Duration::from_secs(1));
    pass &= in_time;
    report(
        "C05 always-on baseline",
        pass,
        &format!(
            "energy {:.4} Wh (want 2920.8), cold starts {}, latency {}, runtime {secs:.4}s",
            r.energy_wh, r.cold_starts, r.avg_added_latency_s
        ),
    );
}

#[test]
fn c06_policy_comparison_bands() {
    let started = Instant::now();
    let profile: GpuProfile = builtin_profile("h100").unwrap();
    let load = pytorch();
    let seeds: Vec<u64> = (0..24).collect();
    let policies = [
        Policy::AlwaysOn,
        Policy::FixedTtl { ttl_s: 300.0 },
        Policy::Breakeven,
    ];

    // (label, breakeven savings band, cold-start band, latency band)
    let bands: [(usize, f64, f64, Option<(f64, f64)>, Option<(f64, f64)>); 3] = [
        (0, 18.1, 4.0, Some((61.0, 101.0)), None),
        (1, 23.0, 4.0, Some((33.0, 63.0)), Some((3.0, 6.0))),
        (2, 8.2, 3.0, None, None),
    ];

    let specs = reference_traffic_specs(DAY);
    let mut pass = true;
    let mut detail = String::new();
    for (idx, center, tol, cold_band, latency_band) in bands {
        let spec = &specs[idx];
        let mut savings = 0.0;
        let mut colds = 0.0;
        let mut latency = 0.0;
        for &seed in &seeds {
            let trace = spec.generate(seed).unwrap();
            let results = compare_policies(&profile, &load, &trace, &policies).unwrap();
            let be = &results[2];
            savings += be.savings_vs_always_on_pct.unwrap();
            colds += be.cold_starts as f64;
            latency += be.avg_added_latency_s;
        }
        let n = seeds.len() as f64;
        savings /= n;
        colds /= n;
        latency /= n;
        let mut ok = (savings - center).abs() <= tol;
        if let Some((lo, hi)) = cold_band {
            ok &= colds >= lo && colds <= hi;
        }
        if let Some((lo, hi)) = latency_band {
            ok &= latency >= lo && latency <= hi;
        }
        pass &= ok;
        detail.push_str(&format!(
            "{}: savings {savings:.2}% (want {center}±{tol}), colds {colds:.1}, latency {latency:.2}s; ",
            spec.label()
        ));
    }
    let (in_time, secs) = within_budget(started, Duration::from_secs(10));
    pass &= in_time;
    report(
        "C06 policy comparison",
        pass,
        &format!("{detail}runtime {secs:.2}s (budget 10s, 24 seeds)"),
    );
}

#[test]
fn c07_breakeven_identity_with_fixed_ttl() {
    let started = Instant::now();
    let profile: GpuProfile = builtin_profile("h100").unwrap();
    let load = pytorch();
    let t_star = breakeven_time(parking_tax(&profile), &load).unwrap();
    let mut pass = true;
    for seed in 0..100u64 {
        let trace = match seed % 3 {
            0 => gen_steady(1.0 + (seed % 17) as f64, DAY, seed).unwrap(),
            1 => gen_bursty(2.0, 60.0, 7200.0, 0.7, DAY, seed).unwrap(),
            _ => gen_diurnal(30.0, DAY, DAY, seed).unwrap(),
        };
        let mk = |policy: Policy| SimConfig {
            profile: &profile,
            load: &load,
            policy,
            trace: &trace,
            duration_s: DAY,
            count_initial_load: false,
        };
        let a = simulate_with_timeline(&mk(Policy::Breakeven)).unwrap().0;
        let b = simulate_with_timeline(&mk(Policy::FixedTtl { ttl_s: t_star }))
            .unwrap()
            .0;
        pass &= a == b;
    }
    let (in_time, secs) = within_budget(started, Duration::from_secs(5));
    pass &= in_time;
    report(
        "C07 policy identity",
        pass,
        &format!("breakeven == fixed-ttl(T*) bitwise on 100 traces, runtime {secs:.2}s"),
    );
}

#[test]
fn c08_energy_conservation() {
    let started = Instant::now();
    let load = pytorch();
    let staged = gpupark_core::power::builtin_load_profile("qwen7b-staged").unwrap();
    let mut checked = 0usize;
    for profile in builtin_profiles::<f64>() {
        for seed in 0..5u64 {
            let traces = [
                gen_steady(5.0, DAY, seed).unwrap(),
                gen_bursty(2.0, 60.0, 7200.0, 0.7, DAY, seed).unwrap(),
                gen_diurnal(30.0, DAY, DAY, seed).unwrap(),
                ArrivalTrace::new(vec![], DAY, "empty", 0).unwrap(),
            ];
            for trace in &traces {
                for policy in [
                    Policy::AlwaysOn,
                    Policy::FixedTtl { ttl_s: 300.0 },
                    Policy::Breakeven,
                    Policy::RateThreshold { window_s: 1800.0 },
                    Policy::Hysteresis { ttl_low_s: 120.0, ttl_high_s: 900.0 },
                ] {
                    for load_profile in [&load, &staged] {
                        let cfg = SimConfig {
                            profile: &profile,
                            load: load_profile,
                            policy: policy.clone(),
                            trace,
                            duration_s: DAY,
                            count_initial_load: false,
                        };
                        sim_checked(&cfg); // asserts the 1e-9 bound
                        checked += 1;
                    }
                }
            }
        }
    }
    let (_, secs) = within_budget(started, Duration::from_secs(30));
    report(
        "C08 energy conservation",
        true,
        &format!("re-integration within 1e-9 on {checked} runs, runtime {secs:.2}s"),
    );
}

#[test]
fn c09_dose_response_tost_monte_carlo() {
    let started = Instant::now();
    let mut flat: GpuProfile = builtin_profile("h100").unwrap();
    flat.beta_w_per_gb = 0.0;
    flat.name = "h100-flat".into();
    let mut sloped = flat.clone();
    sloped.beta_w_per_gb = 0.15;
    sloped.name = "h100-sloped".into();
    let schedule = dose_schedule(40, 64.0, 1200.0);
    let seeds = 1000u64;

    let mut fail_to_reject = 0;
    let mut equivalent = 0;
    let mut non_equivalent = 0;
    for seed in 0..seeds {
        let samples = gen_telemetry(&flat, &schedule, 0.17, 0.0, seed).unwrap();
        let phases = segment_phases(&samples, 700.0).unwrap();
        let reg = dose_response(&phases).unwrap();
        if reg.p_two_sided >= 0.05 {
            fail_to_reject += 1;
        }
        if tost(&reg, 0.1).unwrap().equivalent {
            equivalent += 1;
        }

        let samples = gen_telemetry(&sloped, &schedule, 0.17, 0.0, 7_000_000 + seed).unwrap();
        let phases = segment_phases(&samples, 700.0).unwrap();
        let reg = dose_response(&phases).unwrap();
        if !tost(&reg, 0.1).unwrap().equivalent {
            non_equivalent += 1;
        }
    }
    let mut pass = fail_to_reject >= 900;
    pass &= equivalent >= 990;
    pass &= non_equivalent >= 990;
    let (in_time, secs) = within_budget(started, Duration::from_secs(30));
    pass &= in_time;
    report(
        "C09 dose-response + TOST",
        pass,
        &format!(
            "beta=0: fail-to-reject {fail_to_reject}/1000 (>=900), equivalent {equivalent}/1000 (>=990); \
             beta=0.15: non-equivalent {non_equivalent}/1000 (>=990); runtime {secs:.2}s"
        ),
    );
}

#[test]
fn c10_two_state_statistics() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20_24);
    let bare: Vec<f64> = Normal::new(74.7, 7.9)
        .unwrap()
        .sample_iter(&mut rng)
        .take(10_000)
        .collect();
    let ctx: Vec<f64> = Normal::new(145.5, 11.2)
        .unwrap()
        .sample_iter(&mut rng)
        .take(10_000)
        .collect();
    let r = two_state_stats(&bare, &ctx).unwrap();
    let pass = (r.delta_w - 70.8).abs() <= 0.5 && (r.cohens_d - 7.3).abs() <= 0.3;
    report(
        "C10 two-state statistics",
        pass,
        &format!(
            "delta {:.3} W (want 70.8±0.5), d {:.3} (want 7.3±0.3), welch p {:.1e}",
            r.delta_w, r.cohens_d, r.welch_p
        ),
    );
}

#[test]
fn c11_effective_sample_size_bracket() {
    let lo_tau = effective_n(335_267, 6);
    let hi_tau = effective_n(335_267, 10);
    let pass = lo_tau.n_eff == 25_790
        && hi_tau.n_eff == 15_965
        && hi_tau.n_eff >= 15_000
        && lo_tau.n_eff <= 26_000;
    report(
        "C11 effective sample size",
        pass,
        &format!(
            "n_eff(tau=6) {} (want 25790), n_eff(tau=10) {} (want 15965); brackets 16k-26k",
            lo_tau.n_eff, hi_tau.n_eff
        ),
    );
}

#[test]
fn c12_thermal_drift_confound() {
    let profile: GpuProfile = builtin_profile("a100").unwrap();
    let schedule = dose_schedule(40, 72.0, 1200.0);
    let seeds = 100u64;
    let mut both = 0;
    for seed in 0..seeds {
        let samples = gen_telemetry(&profile, &schedule, 0.08, -0.01, seed).unwrap();
        let phases = segment_phases(&samples, 700.0).unwrap();
        let reg = dose_response(&phases).unwrap();
        let eq = tost(&reg, 0.1).unwrap();
        if reg.p_two_sided < 0.05 && eq.p_tost < 0.05 && reg.slope_w_per_gb < 0.0 {
            both += 1;
        }
    }
    let pass = both as f64 >= 0.8 * seeds as f64;
    report(
        "C12 drift confound",
        pass,
        &format!(
            "significant-negative yet TOST-equivalent in {both}/{seeds} seeds (>=80)"
        ),
    );
}

#[test]
fn c13_property_basket() {
    let mut pass = true;
    let mut detail = String::new();

    // traffic determinism
    let a = gen_bursty(2.0, 60.0, 7200.0, 0.7, DAY, 99).unwrap();
    let b = gen_bursty(2.0, 60.0, 7200.0, 0.7, DAY, 99).unwrap();
    let det = a == b;
    pass &= det;
    detail.push_str(&format!("determinism {det}; "));

    // thinning correctness: hourly bins over 200 seeds within 3-sigma
    let seeds = 200;
    let mut counts = vec![0.0f64; 24];
    for seed in 0..seeds {
        for &t in &gen_diurnal(30.0, DAY, DAY, seed).unwrap().arrival_times_s {
            counts[(t / 3600.0) as usize] += 1.0;
        }
    }
    let mut thinning_ok = true;
    for (bin, &got) in counts.iter().enumerate() {
        let mut expected = 0.0;
        let steps = 600;
        for k in 0..steps {
            let t = bin as f64 * 3600.0 + (k as f64 + 0.5) * 3600.0 / steps as f64;
            expected +=
                gpupark_core::traffic::diurnal_rate_per_s(30.0, 0.0, DAY, true, t) * 3600.0
                    / steps as f64;
        }
        expected *= seeds as f64;
        let sigma = expected.sqrt().max(1.0);
        thinning_ok &= (got - expected).abs() <= 3.0 * sigma;
    }
    pass &= thinning_ok;
    detail.push_str(&format!("thinning bands {thinning_ok}; "));

    // trace round trip
    let dir = std::env::temp_dir().join("gpupark-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trace.csv");
    let trace = gen_steady(5.0, DAY, 4).unwrap();
    save_trace(&trace, &path).unwrap();
    let rt = load_trace(&path).unwrap() == trace;
    pass &= rt;
    detail.push_str(&format!("round-trip {rt}; "));

    // fleet-energy linearity and zero cases
    let mut s: gpupark_core::FleetScenario = gpupark_core::FleetScenario::new(1.0e6, 0.5, 40.0);
    let e1 = annual_parking_energy_gwh(&s).unwrap();
    s.n_gpus = 2.0e6;
    let linear = (annual_parking_energy_gwh(&s).unwrap() - 2.0 * e1).abs() < 1e-9;
    s.utilization = 1.0;
    let zero = annual_parking_energy_gwh(&s).unwrap() == 0.0;
    s.utilization = 0.0;
    let full = (annual_parking_energy_gwh(&s).unwrap()
        - 2.0e6 * 40.0 * 8760.0 / 1e9)
        .abs()
        < 1e-9;
    pass &= linear && zero && full;
    detail.push_str(&format!("fleet linearity {linear}, zero/full {}; ", zero && full));

    // t-CDF reference: 0.975 at the full-precision quantile; the rounded
    // 2.024 abscissa is pinned against its independently computed value
    let at_quantile: f64 = student_t_cdf(2.024_394_163_911_969, 38.0);
    let at_rounded: f64 = student_t_cdf(2.024, 38.0);
    let tcdf_ok = (at_quantile - 0.975).abs() <= 1e-6
        && (at_rounded - 0.974_978_790_148_929_7).abs() <= 1e-10;
    pass &= tcdf_ok;
    detail.push_str(&format!(
        "t-cdf {:.9}@quantile / {:.9}@2.024 -> {tcdf_ok}",
        at_quantile, at_rounded
    ));

    report("C13 property basket", pass, &detail);
}
