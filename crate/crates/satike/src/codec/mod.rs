//! IKE-style message codec and wire accounting.
//!
//! Layout mirrors the standard IKEv2 framing so byte accounting stays
//! comparable to real deployments: a 28-byte message header followed by a
//! chain of payloads, each with a 4-byte generic header (next-kind, reserved,
//! 16-bit length). Two extra payload kinds carry the KEM ciphertext and the
//! encrypted nonce of the two-message variant.

mod fragment;
mod hexdump;
mod message;

pub use fragment::{fragment, reassemble};
pub use hexdump::{from_hexdump, to_hexdump};
pub use message::{
    ExchangeType, Flags, Message, MessageHeader, Payload, PayloadKind, HEADER_LEN,
    PAYLOAD_HEADER_LEN,
};
pub(crate) use message::{decode_inner_chain, encode_inner_chain};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("payload body of {0} bytes exceeds the 16-bit length field")]
    PayloadTooLarge(usize),
    #[error("message truncated: need {needed} bytes, have {have}")]
    TruncatedMessage { needed: usize, have: usize },
    #[error("header length field {field} does not match actual length {actual}")]
    LengthMismatch { field: usize, actual: usize },
    #[error("unknown critical payload kind {0}")]
    UnknownCriticalPayload(u8),
    #[error("unknown exchange type {0}")]
    UnknownExchange(u8),
    #[error("fragment {0} missing during reassembly")]
    MissingFragment(u16),
    #[error("duplicate fragment {0}")]
    DuplicateFragment(u16),
    #[error("fragment set is inconsistent (totals or kinds disagree)")]
    InconsistentFragments,
    #[error("INIT messages must not be fragmented")]
    FragmentedInit,
    #[error("message of {size} bytes does not fit mtu {mtu} and cannot be fragmented here")]
    Unfragmentable { size: usize, mtu: usize },
    #[error("bad hexdump fixture: {0}")]
    BadFixture(String),
}

/// Per-datagram network overhead and the MTU bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverheadModel {
    /// Uncompressed IP+UDP header bytes per datagram.
    pub ip_udp_bytes: usize,
    /// Compressed header bytes per datagram when ROHC is on.
    pub rohc_bytes: usize,
    pub rohc_enabled: bool,
    pub mtu: usize,
}

/// IPv4 + UDP.
pub const DEFAULT_IP_UDP_BYTES: usize = 28;
/// Typical steady-state compressed header.
pub const DEFAULT_ROHC_BYTES: usize = 3;
pub const DEFAULT_MTU: usize = 1500;

impl OverheadModel {
    pub fn new(rohc_enabled: bool) -> Self {
        OverheadModel {
            ip_udp_bytes: DEFAULT_IP_UDP_BYTES,
            rohc_bytes: DEFAULT_ROHC_BYTES,
            rohc_enabled,
            mtu: DEFAULT_MTU,
        }
    }

    pub fn with_mtu(mut self, mtu: usize) -> Self {
        self.mtu = mtu;
        self
    }

    /// Header bytes actually charged per datagram.
    pub fn datagram_header_bytes(&self) -> usize {
        if self.rohc_enabled {
            self.rohc_bytes
        } else {
            self.ip_udp_bytes
        }
    }

    pub fn valid(&self) -> bool {
        self.rohc_bytes < self.ip_udp_bytes && self.mtu > self.ip_udp_bytes + HEADER_LEN
    }
}

impl Default for OverheadModel {
    fn default() -> Self {
        OverheadModel::new(false)
    }
}

/// True iff the encoded message plus its datagram header fits the MTU.
pub fn check_mtu_safe(message: &Message, model: &OverheadModel) -> bool {
    match message.encode() {
        Ok(bytes) => bytes.len() + model.datagram_header_bytes() <= model.mtu,
        Err(_) => false,
    }
}

/// Total bytes on the wire for a list of datagrams: encoded size plus one
/// network header each.
pub fn wire_cost(messages: &[Message], model: &OverheadModel) -> usize {
    messages
        .iter()
        .map(|m| {
            m.encode()
                .map(|b| b.len() + model.datagram_header_bytes())
                .unwrap_or(0)
        })
        .sum()
}
