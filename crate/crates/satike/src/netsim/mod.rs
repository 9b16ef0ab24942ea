//! Discrete-event simulator of a single-satellite-hop link.
//!
//! A scenario is a chain of directed links (host to modem, modem to
//! satellite, satellite to modem, modem to host) with per-link one-way
//! delay, jitter (standard deviation of a zero-mean truncated normal) and an
//! optional serialization rate, plus a fixed per-message processing delay at
//! the receiving host. The three built-in scenarios differ only in the
//! satellite hop: LEO, MEO and GEO orbits with delay inversely proportional
//! to jitter.
//!
//! Handshake runs advance a virtual clock; each protocol message is charged
//! the path propagation (plus sampled jitter per datagram) and one
//! processing delay. Messages larger than the MTU are fragmented and the
//! fragments travel as separate back-to-back datagrams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{fragment, CodecError, OverheadModel};
use crate::crypto::suite::SuiteConfig;
use crate::crypto::{Level, Variant};
use crate::handshake::{AuthCredentials, HandshakeError, Session};

/// Default per-message processing time at the receiving endpoint.
pub const DEFAULT_PROCESSING_MS: f64 = 10.0;
/// Handshakes exceeding this much simulated time are reported failed.
pub const DEFAULT_TIMEOUT_MS: f64 = 30_000.0;

/// One-way host-to-modem delay. The modem link's round-trip figure of
/// 22.500 ms contributes half in each direction.
pub const HOST_MODEM_ONE_WAY_MS: f64 = 11.25;
/// Ground-to-satellite serialization rate (bits per second).
pub const GROUND_SAT_RATE_BPS: u64 = 5_000_000;

#[derive(Debug, Error)]
pub enum NetsimError {
    #[error("unknown scenario: {0}")]
    UnknownScenario(String),
    #[error(transparent)]
    Handshake(#[from] HandshakeError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("bad scenario file: {0}")]
    BadScenarioFile(String),
}

/// A directed channel between two adjacent nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub endpoint_a: String,
    pub endpoint_b: String,
    /// Bits per second; `None` means unlimited (zero serialization delay).
    pub rate_bps: Option<u64>,
    pub one_way_delay_ms: f64,
    /// Standard deviation of the per-datagram jitter.
    pub jitter_ms: f64,
}

impl Link {
    pub fn valid(&self) -> bool {
        self.one_way_delay_ms >= 0.0 && self.jitter_ms >= 0.0
    }

    /// Serialization delay for a datagram of `bytes` on this link.
    pub fn serialization_ms(&self, bytes: usize) -> f64 {
        match self.rate_bps {
            Some(rate) => (bytes as f64 * 8.0) / (rate as f64 / 1_000.0),
            None => 0.0,
        }
    }
}

/// A named initiator-to-responder path plus endpoint processing cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub links: Vec<Link>,
    /// Per-message processing delay at the receiving endpoint.
    pub processing_ms: f64,
    /// When false, all jitter samples are zero (deterministic runs).
    pub jitter_enabled: bool,
    pub seed: u64,
}

impl Scenario {
    /// Sum of link propagation delays, excluding jitter, serialization and
    /// processing.
    pub fn one_way_path_ms(&self) -> f64 {
        self.links.iter().map(|l| l.one_way_delay_ms).sum()
    }

    pub fn with_jitter(mut self, enabled: bool) -> Self {
        self.jitter_enabled = enabled;
        self
    }

    pub fn with_processing_ms(mut self, processing_ms: f64) -> Self {
        self.processing_ms = processing_ms;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Serialize to the scenario file format.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_toml(text: &str) -> Result<Scenario, NetsimError> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| NetsimError::BadScenarioFile(e.to_string()))?;
        if scenario.links.iter().any(|l| !l.valid()) {
            return Err(NetsimError::BadScenarioFile(
                "negative delay or jitter".into(),
            ));
        }
        Ok(scenario)
    }
}

/// Names of the built-in single-hop scenarios.
pub const SCENARIO_NAMES: [&str; 3] = ["LEO", "MEO", "GEO"];

/// Build one of the built-in scenarios: a host-modem-satellite-modem-host
/// chain whose satellite hop matches the named orbit.
pub fn build_scenario(name: &str, seed: u64) -> Result<Scenario, NetsimError> {
    let upper = name.to_ascii_uppercase();
    // (ground-to-satellite one-way delay, jitter standard deviation), ms.
    let (sat_delay_ms, sat_jitter_ms) = match upper.as_str() {
        "LEO" => (6.862, 1.178),
        "MEO" => (78.915, 0.14),
        "GEO" => (127.247, 0.000_04),
        _ => return Err(NetsimError::UnknownScenario(name.to_string())),
    };
    let host_modem = |a: &str, b: &str| Link {
        endpoint_a: a.into(),
        endpoint_b: b.into(),
        rate_bps: None,
        one_way_delay_ms: HOST_MODEM_ONE_WAY_MS,
        jitter_ms: 0.0,
    };
    let ground_sat = |a: &str, b: &str| Link {
        endpoint_a: a.into(),
        endpoint_b: b.into(),
        rate_bps: Some(GROUND_SAT_RATE_BPS),
        one_way_delay_ms: sat_delay_ms,
        jitter_ms: sat_jitter_ms,
    };
    Ok(Scenario {
        name: upper.clone(),
        links: vec![
            host_modem("initiator", "modem-a"),
            ground_sat("modem-a", &upper),
            ground_sat(&upper, "modem-b"),
            host_modem("modem-b", "responder"),
        ],
        processing_ms: DEFAULT_PROCESSING_MS,
        jitter_enabled: true,
        seed,
    })
}

/// Draw one jitter value for a link: Normal(0, sigma) truncated below at
/// minus the link's propagation delay so the total hop delay stays
/// non-negative.
pub fn sample_jitter(link: &Link, rng: &mut dyn RngCore) -> f64 {
    if link.jitter_ms <= 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, link.jitter_ms).expect("sigma is positive and finite");
    loop {
        let draw = normal.sample(rng);
        if draw >= -link.one_way_delay_ms {
            return draw;
        }
    }
}

/// One-way latency of a single datagram of `message_bytes` across the path:
/// per-link propagation, jitter and serialization, plus one processing delay
/// at the receiver.
pub fn one_way_latency(scenario: &Scenario, message_bytes: usize, rng: &mut dyn RngCore) -> f64 {
    let mut total = scenario.processing_ms;
    for link in &scenario.links {
        total += link.one_way_delay_ms + link.serialization_ms(message_bytes);
        if scenario.jitter_enabled {
            total += sample_jitter(link, rng);
        }
    }
    total
}

/// One datagram crossing the path during a handshake run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmitEvent {
    /// Virtual time at which the datagram is sent.
    pub sent_at_ms: f64,
    pub from_initiator: bool,
    /// Encoded bytes plus the per-datagram network header.
    pub wire_bytes: usize,
    /// Index of the protocol message this datagram belongs to.
    pub message_index: usize,
    pub fragment_index: usize,
}

/// Outcome of one simulated handshake.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HandshakeReport {
    pub variant: Variant,
    pub level: Level,
    pub scenario: String,
    pub completion_ms: f64,
    pub messages: usize,
    /// Encoded protocol bytes, excluding network headers.
    pub bytes_initiator_to_responder: usize,
    pub bytes_responder_to_initiator: usize,
    pub bytes_total: usize,
    /// Including one network header per datagram.
    pub bytes_total_with_headers: usize,
    pub per_message_sizes: Vec<usize>,
    pub failed: bool,
    pub seed: u64,
    #[serde(skip)]
    pub events: Vec<TransmitEvent>,
}

/// Simulation knobs independent of the scenario.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub overhead: OverheadModel,
    pub timeout_ms: f64,
}

impl SimConfig {
    pub fn for_variant(variant: Variant) -> Self {
        SimConfig {
            overhead: OverheadModel::new(variant.rohc_default()),
            timeout_ms: DEFAULT_TIMEOUT_MS,
        }
    }
}

/// Run one full handshake over the scenario, advancing a virtual clock.
///
/// Each protocol message is charged the path propagation (with per-datagram
/// jitter) and one receiver processing delay; fragments of an over-MTU
/// message travel as separate datagrams sent back-to-back, so the message
/// arrives when its slowest fragment does. Serialization time is not charged
/// here: at the modeled rates it is dominated by propagation and keeping it
/// out preserves exact agreement with the analytic latency model.
pub fn run_handshake(
    scenario: &Scenario,
    suite: &SuiteConfig,
    creds_initiator: AuthCredentials,
    creds_responder: AuthCredentials,
    config: SimConfig,
    seed: u64,
) -> Result<HandshakeReport, NetsimError> {
    let mut rng_i = ChaCha20Rng::seed_from_u64(seed.wrapping_mul(3));
    let mut rng_r = ChaCha20Rng::seed_from_u64(seed.wrapping_mul(3).wrapping_add(1));
    let mut rng_link = ChaCha20Rng::seed_from_u64(seed.wrapping_mul(3).wrapping_add(2));

    let (mut initiator, first) =
        Session::initiate(suite.clone(), creds_initiator, config.overhead, &mut rng_i)?;
    let mut responder = Session::respond(suite.clone(), creds_responder, config.overhead)?;

    let mut clock_ms = 0.0f64;
    let mut events = Vec::new();
    let mut per_message_sizes = Vec::new();
    let mut bytes_i2r = 0usize;
    let mut bytes_r2i = 0usize;
    let mut wire_total = 0usize;
    let mut failed = false;

    let mut current = Some(first);
    let mut to_responder = true;
    let mut message_index = 0usize;

    while let Some(message) = current.take() {
        // Transmit: one datagram per fragment, sent back-to-back.
        let datagrams = fragment(&message, &config.overhead)?;
        let mut message_bytes = 0usize;
        let mut arrival = clock_ms;
        for (fragment_index, datagram) in datagrams.iter().enumerate() {
            let encoded = datagram.encode().map_err(NetsimError::Codec)?;
            let wire = encoded.len() + config.overhead.datagram_header_bytes();
            events.push(TransmitEvent {
                sent_at_ms: clock_ms,
                from_initiator: to_responder,
                wire_bytes: wire,
                message_index,
                fragment_index,
            });
            message_bytes += encoded.len();
            wire_total += wire;
            let mut path = scenario.one_way_path_ms();
            if scenario.jitter_enabled {
                for link in &scenario.links {
                    path += sample_jitter(link, &mut rng_link);
                }
            }
            arrival = arrival.max(clock_ms + path);
        }
        per_message_sizes.push(message_bytes);
        if to_responder {
            bytes_i2r += message_bytes;
        } else {
            bytes_r2i += message_bytes;
        }
        clock_ms = arrival + scenario.processing_ms;
        message_index += 1;
        if clock_ms > config.timeout_ms {
            failed = true;
            break;
        }

        // Deliver (reassembly is implicit: the peer processes the original
        // message once all fragments have arrived).
        let reply = if to_responder {
            responder.step(&message, &mut rng_r)?
        } else {
            initiator.step(&message, &mut rng_i)?
        };
        to_responder = !to_responder;
        current = reply;
    }

    if !failed && (!initiator.is_established() || !responder.is_established()) {
        failed = true;
    }

    Ok(HandshakeReport {
        variant: suite.variant,
        level: suite.level,
        scenario: scenario.name.clone(),
        completion_ms: clock_ms,
        messages: message_index,
        bytes_initiator_to_responder: bytes_i2r,
        bytes_responder_to_initiator: bytes_r2i,
        bytes_total: bytes_i2r + bytes_r2i,
        bytes_total_with_headers: wire_total,
        per_message_sizes,
        failed,
        seed,
        events,
    })
}

/// Convenience wrapper: resolve the suite, generate matched credentials from
/// the seed, and run.
pub fn run_handshake_seeded(
    scenario: &Scenario,
    variant: Variant,
    level: Level,
    config: SimConfig,
    seed: u64,
) -> Result<HandshakeReport, NetsimError> {
    let suite = SuiteConfig::resolve(variant, level).map_err(HandshakeError::Crypto)?;
    let (creds_i, creds_r) =
        AuthCredentials::generate_pair(&suite, seed).map_err(NetsimError::Handshake)?;
    run_handshake(scenario, &suite, creds_i, creds_r, config, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_jitter(name: &str) -> Scenario {
        build_scenario(name, 1).unwrap().with_jitter(false)
    }

    /// Per-message accumulation in the same order as the simulator, so the
    /// comparison is bit-exact rather than algebraic.
    fn accumulate(messages: usize, scenario: &Scenario) -> f64 {
        let mut clock = 0.0f64;
        for _ in 0..messages {
            clock += scenario.one_way_path_ms();
            clock += scenario.processing_ms;
        }
        clock
    }

    #[test]
    fn built_in_path_delays() {
        assert!((zero_jitter("LEO").one_way_path_ms() - 36.224).abs() < 1e-9);
        assert!((zero_jitter("MEO").one_way_path_ms() - 180.33).abs() < 1e-9);
        assert!((zero_jitter("GEO").one_way_path_ms() - 276.994).abs() < 1e-9);
        assert!(matches!(
            build_scenario("HALO", 0),
            Err(NetsimError::UnknownScenario(_))
        ));
    }

    #[test]
    fn geo_idealized_one_way_latency() {
        // Zero-byte message, processing zeroed: pure propagation.
        let scenario = zero_jitter("GEO").with_processing_ms(0.0);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let latency = one_way_latency(&scenario, 0, &mut rng);
        assert!((latency - (2.0 * 11.25 + 2.0 * 127.247)).abs() < 1e-9);
        // Deterministic without jitter.
        let mut rng2 = ChaCha20Rng::seed_from_u64(99);
        assert_eq!(latency, one_way_latency(&scenario, 0, &mut rng2));
    }

    #[test]
    fn serialization_charged_at_link_rate() {
        // 1500 bytes at 5 Mbps on each of the two satellite links: 2.4 ms
        // per link on top of propagation and processing.
        let scenario = zero_jitter("LEO");
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let empty = one_way_latency(&scenario, 0, &mut rng);
        let loaded = one_way_latency(&scenario, 1500, &mut rng);
        assert!((loaded - empty - 2.0 * 2.4).abs() < 1e-9);
    }

    #[test]
    fn jitter_sample_statistics() {
        let link = Link {
            endpoint_a: "a".into(),
            endpoint_b: "b".into(),
            rate_bps: Some(GROUND_SAT_RATE_BPS),
            one_way_delay_ms: 6.862,
            jitter_ms: 1.178,
        };
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_jitter(&link, &mut rng)).collect();
        assert!(draws.iter().all(|d| *d >= -link.one_way_delay_ms));
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        // Truncation at -5.8 sigma is negligible: mean near 0, sigma within 2%.
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((std - 1.178).abs() / 1.178 < 0.02, "std {std}");
        // Deterministic under a fixed seed.
        let mut a = ChaCha20Rng::seed_from_u64(5);
        let mut b = ChaCha20Rng::seed_from_u64(5);
        assert_eq!(sample_jitter(&link, &mut a), sample_jitter(&link, &mut b));
    }

    #[test]
    fn zero_jitter_run_matches_analytic_count() {
        for variant in Variant::ALL {
            for name in SCENARIO_NAMES {
                let scenario = zero_jitter(name);
                let config = SimConfig::for_variant(variant);
                let report =
                    run_handshake_seeded(&scenario, variant, Level::I, config, 3).unwrap();
                assert!(!report.failed);
                assert_eq!(report.messages, variant.message_count());
                let expected = accumulate(variant.message_count(), &scenario);
                assert_eq!(report.completion_ms, expected, "{variant} {name}");
            }
        }
    }

    #[test]
    fn geo_two_exchange_run_near_reference() {
        let scenario = zero_jitter("GEO");
        let config = SimConfig::for_variant(Variant::Tb2);
        let report = run_handshake_seeded(&scenario, Variant::Tb2, Level::I, config, 1).unwrap();
        // 4 x (276.994 + 10) = 1147.976, close to the 1144.4 reference run.
        assert!((report.completion_ms - 1147.976).abs() < 1e-9);
        assert!((report.completion_ms / 1000.0 - 1.1444).abs() / 1.1444 < 0.01);
    }

    #[test]
    fn lw3_is_exactly_two_transmissions() {
        for name in SCENARIO_NAMES {
            let scenario = build_scenario(name, 4).unwrap();
            let config = SimConfig::for_variant(Variant::Lw3);
            let report = run_handshake_seeded(&scenario, Variant::Lw3, Level::I, config, 4).unwrap();
            assert_eq!(report.events.len(), 2);
            assert_eq!(report.messages, 2);
            assert!(!report.failed);
        }
    }

    #[test]
    fn oversized_messages_fragment_into_multiple_datagrams() {
        // A level-III PQ-signature AUTH exceeds the MTU and must travel as
        // several datagrams of one message.
        let scenario = zero_jitter("LEO");
        let config = SimConfig::for_variant(Variant::Lw1);
        let report = run_handshake_seeded(&scenario, Variant::Lw1, Level::III, config, 5).unwrap();
        assert!(!report.failed);
        assert_eq!(report.messages, 6);
        assert!(report.events.len() > 6, "events {}", report.events.len());
        // Fragmentation must not add latency beyond the per-message model.
        assert_eq!(report.completion_ms, accumulate(6, &scenario));
        // Every datagram fits the MTU.
        assert!(report
            .events
            .iter()
            .all(|e| e.wire_bytes <= config.overhead.mtu));
    }

    #[test]
    fn byte_accounting_consistent() {
        let scenario = zero_jitter("MEO");
        let config = SimConfig::for_variant(Variant::Tb2);
        let report = run_handshake_seeded(&scenario, Variant::Tb2, Level::I, config, 8).unwrap();
        assert_eq!(
            report.bytes_total,
            report.bytes_initiator_to_responder + report.bytes_responder_to_initiator
        );
        assert_eq!(report.per_message_sizes.len(), report.messages);
        assert_eq!(
            report.per_message_sizes.iter().sum::<usize>(),
            report.bytes_total
        );
        // One uncompressed header per datagram (no fragmentation here).
        assert_eq!(
            report.bytes_total_with_headers,
            report.bytes_total + report.events.len() * 28
        );
    }

    #[test]
    fn identical_seeds_reproduce_identical_reports() {
        let scenario = build_scenario("LEO", 2).unwrap();
        let config = SimConfig::for_variant(Variant::Lw2);
        let a = run_handshake_seeded(&scenario, Variant::Lw2, Level::I, config, 11).unwrap();
        let b = run_handshake_seeded(&scenario, Variant::Lw2, Level::I, config, 11).unwrap();
        assert_eq!(a, b);
        let c = run_handshake_seeded(&scenario, Variant::Lw2, Level::I, config, 12).unwrap();
        assert_ne!(a.completion_ms, c.completion_ms);
    }

    #[test]
    fn tight_timeout_marks_run_failed() {
        let scenario = zero_jitter("GEO");
        let mut config = SimConfig::for_variant(Variant::Tb1);
        config.timeout_ms = 500.0;
        let report = run_handshake_seeded(&scenario, Variant::Tb1, Level::I, config, 1).unwrap();
        assert!(report.failed);
        assert!(report.messages < Variant::Tb1.message_count());
    }

    #[test]
    fn scenario_file_round_trip() {
        let scenario = build_scenario("MEO", 42).unwrap();
        let text = scenario.to_toml();
        let parsed = Scenario::from_toml(&text).unwrap();
        assert_eq!(parsed, scenario);
        assert!(Scenario::from_toml("not a scenario").is_err());
        let negative = text.replace("78.915", "-78.915");
        assert!(matches!(
            Scenario::from_toml(&negative),
            Err(NetsimError::BadScenarioFile(_))
        ));
    }
}
