//! IKEv2-style handshake variants for satellite links, with a discrete-event
//! link simulator and a benchmark harness.
//!
//! The crate is organized around five building blocks:
//!
//! - [`crypto`]: algorithm registry, deterministic toy providers for the
//!   asymmetric primitives, real HMAC/AES-GCM for the symmetric ones.
//! - [`codec`]: IKE-style message encoding, MTU checks, fragmentation and
//!   per-datagram overhead accounting.
//! - [`handshake`]: initiator/responder state machines for the five protocol
//!   variants (TB1, TB2, LW1, LW2, LW3) and their key schedules.
//! - [`netsim`]: virtual-clock simulation of LEO/MEO/GEO satellite paths.
//! - [`harness`]: experiment sweeps, aggregation, reference comparison and
//!   CSV/JSON reports.
//!
//! See the `examples/` directory for a runnable walkthrough of each
//! capability, or the `satike` binary for the batch CLI.

pub mod cli;
pub mod codec;
pub mod crypto;
pub mod handshake;
pub mod harness;
pub mod netsim;

pub use crypto::{Level, Variant};
