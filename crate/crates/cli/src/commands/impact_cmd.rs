use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use gpupark_core::impact::{
    annual_parking_energy_gwh, co2_kilotonnes, sensitivity_grid, FleetScenario,
};
use serde_json::json;

use crate::manifest::{RunManifest, SCHEMA_VERSION};

/// Fleet-scale annual parking energy and CO₂ estimate.
#[derive(Debug, Args)]
pub struct ImpactArgs {
    /// Fleet size in GPUs.
    #[arg(long, default_value_t = 3.76e6)]
    fleet: f64,
    /// Average utilization in [0, 1]; the idle fraction is 1 − ρ.
    #[arg(long, default_value_t = 0.65)]
    utilization: f64,
    /// Fleet-weighted parking power in watts.
    #[arg(long, default_value_t = 40.0)]
    park_power: f64,
    /// Grid carbon intensity in kg CO₂/kWh (default back-derived from the
    /// reference base case).
    #[arg(long, default_value_t = 0.39)]
    grid_intensity: f64,
    /// Hours per year.
    #[arg(long, default_value_t = 8760.0)]
    hours: f64,
    /// Three scenario JSON files (low base high) for a sensitivity grid.
    #[arg(long, num_args = 3, value_names = ["LOW", "BASE", "HIGH"])]
    sensitivity: Option<Vec<PathBuf>>,
    /// Result JSON to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: &ImpactArgs) -> Result<()> {
    if let Some(paths) = &args.sensitivity {
        if paths.len() != 3 {
            bail!("--sensitivity wants exactly three files: low base high");
        }
        let low = FleetScenario::from_json_file(&paths[0])?;
        let base = FleetScenario::from_json_file(&paths[1])?;
        let high = FleetScenario::from_json_file(&paths[2])?;
        let table = sensitivity_grid(&low, &base, &high)?;
        println!("             {:>12} {:>12} {:>12}", "low", "base", "high");
        println!(
            "fleet        {:>12} {:>12} {:>12}",
            table.scenarios[0].n_gpus, table.scenarios[1].n_gpus, table.scenarios[2].n_gpus
        );
        println!(
            "utilization  {:>12} {:>12} {:>12}",
            table.scenarios[0].utilization,
            table.scenarios[1].utilization,
            table.scenarios[2].utilization
        );
        println!(
            "park power W {:>12} {:>12} {:>12}",
            table.scenarios[0].park_w, table.scenarios[1].park_w, table.scenarios[2].park_w
        );
        println!(
            "E_park GWh   {:>12.0} {:>12.0} {:>12.0}",
            table.e_park_gwh[0], table.e_park_gwh[1], table.e_park_gwh[2]
        );
        println!(
            "CO2 kT       {:>12.1} {:>12.1} {:>12.1}",
            table.co2_kt[0], table.co2_kt[1], table.co2_kt[2]
        );
        if let Some(out) = &args.out {
            let payload = json!({"schema_version": SCHEMA_VERSION, "sensitivity": table});
            std::fs::write(out, serde_json::to_string_pretty(&payload)?)?;
            RunManifest::new("impact", payload, &[out]).write_next_to(out)?;
        }
        return Ok(());
    }

    let mut scenario = FleetScenario::new(args.fleet, args.utilization, args.park_power);
    scenario.hours_per_year = args.hours;
    scenario.grid_intensity_kg_per_kwh = args.grid_intensity;
    let e_gwh = annual_parking_energy_gwh(&scenario)?;
    let co2_kt = co2_kilotonnes(e_gwh, args.grid_intensity)?;
    println!(
        "E_park = {:.0} GWh/yr ({e_gwh:.4} GWh), CO2 = {co2_kt:.1} kT/yr @ {} kg/kWh",
        e_gwh.round(),
        args.grid_intensity
    );
    let payload = json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario,
        "e_park_gwh": e_gwh,
        "e_park_gwh_rounded": e_gwh.round(),
        "co2_kt": co2_kt,
    });
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&payload)?)?;
        RunManifest::new("impact", payload, &[out]).write_next_to(out)?;
    }
    Ok(())
}
