//! Simulate one handshake over a satellite path and print the full report.
//!
//!     cargo run --example simulate_handshake

use satike::netsim::{build_scenario, run_handshake_seeded, SimConfig};
use satike::{Level, Variant};

fn main() {
    let scenario = build_scenario("GEO", 7).unwrap();
    let config = SimConfig::for_variant(Variant::Tb2);
    let report =
        run_handshake_seeded(&scenario, Variant::Tb2, Level::I, config, 7).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    println!(
        "\n{} messages in {:.1} ms; {} protocol bytes ({} with headers)",
        report.messages, report.completion_ms, report.bytes_total, report.bytes_total_with_headers
    );
}
