//! Inspect the built-in scenarios: path delays, jitter samples, and the
//! one-way latency of a single datagram.
//!
//!     cargo run --example link_latency

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use satike::netsim::{build_scenario, one_way_latency, sample_jitter, SCENARIO_NAMES};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for name in SCENARIO_NAMES {
        let scenario = build_scenario(name, 1).unwrap();
        println!("{name}: one-way path {:.3} ms", scenario.one_way_path_ms());
        for link in &scenario.links {
            println!(
                "  {} -> {}: delay {:.3} ms, jitter sigma {:.5} ms, rate {}",
                link.endpoint_a,
                link.endpoint_b,
                link.one_way_delay_ms,
                link.jitter_ms,
                link.rate_bps
                    .map(|r| format!("{} bps", r))
                    .unwrap_or_else(|| "unlimited".into()),
            );
        }
        let samples: Vec<f64> = (0..5)
            .map(|_| sample_jitter(&scenario.links[1], &mut rng))
            .collect();
        println!(
            "  jitter draws on the uplink: {:?}",
            samples.iter().map(|s| (s * 1000.0).round() / 1000.0).collect::<Vec<_>>()
        );
        println!(
            "  one-way latency, 1500-byte datagram: {:.3} ms\n",
            one_way_latency(&scenario, 1500, &mut rng)
        );
    }
}
