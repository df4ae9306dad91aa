pub mod analyze_cmd;
pub mod breakeven_cmd;
pub mod impact_cmd;
pub mod reproduce_cmd;
pub mod simulate_cmd;
pub mod telemetry_cmd;
pub mod traffic_cmd;
