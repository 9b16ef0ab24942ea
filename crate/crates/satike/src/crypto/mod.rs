//! Pluggable cryptographic primitives behind role-based interfaces.
//!
//! Asymmetric operations (KEX, KEM, SIG) go through the deterministic toy
//! provider in [`toy`]: hash-based stand-ins that emit artifacts of exactly
//! the registry lengths and reproduce byte-for-byte under a fixed seed. The
//! symmetric primitives (PRF, AEAD) are the real HMAC and AES-GCM, since the
//! key schedule and encrypted-payload accounting depend on them directly.
//!
//! Nothing here is constant-time and the toy provider offers no security;
//! handshake correctness, byte accounting and latency are all that matter.

pub mod aead;
pub mod algorithm;
pub mod prf;
pub mod suite;
pub mod toy;

pub use aead::{aead_open, aead_seal};
pub use algorithm::{registry_lookup, registry_table, AlgorithmId, AlgorithmSpec, Role};
pub use prf::{prf, prf_plus};
pub use suite::{AuthMode, Level, SuiteConfig, Variant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("unknown algorithm: {0}")]
    UnknownAlgorithm(String),
    #[error("algorithm {id} has role {actual:?}, expected {expected:?}")]
    RoleMismatch {
        id: AlgorithmId,
        expected: Role,
        actual: Role,
    },
    #[error("malformed public key: expected {expected} bytes, got {got}")]
    MalformedPublicKey { expected: usize, got: usize },
    #[error("malformed ciphertext: expected {expected} bytes, got {got}")]
    MalformedCiphertext { expected: usize, got: usize },
    #[error("malformed signature: expected {expected} bytes, got {got}")]
    MalformedSignature { expected: usize, got: usize },
    #[error("malformed peer public value: expected {expected} bytes, got {got}")]
    MalformedPeerPublic { expected: usize, got: usize },
    #[error("AEAD key must be {expected} bytes, got {got}")]
    BadAeadKey { expected: usize, got: usize },
    #[error("AEAD authentication failure")]
    AuthenticationFailure,
    #[error("prf+ output length {requested} exceeds {max} (255 blocks)")]
    OutputTooLong { requested: usize, max: usize },
    #[error("combine_secrets called with no parts")]
    EmptyParts,
    #[error("no suite defined for ({variant:?}, {level:?})")]
    UnknownSuite { variant: Variant, level: Level },
}

/// Where a shared secret came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecretOrigin {
    Kex,
    Kem,
    Combined,
}

/// A shared secret together with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedSecret {
    pub bytes: Vec<u8>,
    pub origin: SecretOrigin,
}

/// How a keypair was produced: fresh for this session, or a long-lived key
/// distributed out-of-band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyProvenance {
    Ephemeral,
    StaticOob,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub algorithm: AlgorithmId,
    pub public: Vec<u8>,
    pub secret: Vec<u8>,
    pub provenance: KeyProvenance,
}

/// Concatenate constituent secrets in their given order (classical first,
/// then post-quantum, fixed globally) into one combined secret.
pub fn combine_secrets(parts: &[SharedSecret]) -> Result<SharedSecret, CryptoError> {
    if parts.is_empty() {
        return Err(CryptoError::EmptyParts);
    }
    let mut bytes = Vec::with_capacity(parts.iter().map(|p| p.bytes.len()).sum());
    for part in parts {
        bytes.extend_from_slice(&part.bytes);
    }
    Ok(SharedSecret {
        bytes,
        origin: SecretOrigin::Combined,
    })
}

fn expect_role(spec: &AlgorithmSpec, expected: Role) -> Result<(), CryptoError> {
    if spec.role != expected {
        return Err(CryptoError::RoleMismatch {
            id: spec.id,
            expected,
            actual: spec.role,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ss(bytes: &[u8], origin: SecretOrigin) -> SharedSecret {
        SharedSecret {
            bytes: bytes.to_vec(),
            origin,
        }
    }

    #[test]
    fn combine_concatenates_in_order() {
        let a = ss(&[1u8; 32], SecretOrigin::Kex);
        let b = ss(&[2u8; 32], SecretOrigin::Kem);
        let c = combine_secrets(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(c.bytes.len(), 64);
        assert_eq!(&c.bytes[..32], &a.bytes[..]);
        assert_eq!(&c.bytes[32..], &b.bytes[..]);
        assert_eq!(c.origin, SecretOrigin::Combined);
    }

    #[test]
    fn combine_single_part_keeps_bytes() {
        let a = ss(&[7u8; 48], SecretOrigin::Kex);
        let c = combine_secrets(std::slice::from_ref(&a)).unwrap();
        assert_eq!(c.bytes, a.bytes);
        assert_eq!(c.origin, SecretOrigin::Combined);
    }

    #[test]
    fn combine_empty_rejected() {
        assert_eq!(combine_secrets(&[]), Err(CryptoError::EmptyParts));
    }

    #[test]
    fn combine_injective_at_fixed_lengths() {
        let a = ss(&[1u8; 32], SecretOrigin::Kex);
        let b = ss(&[2u8; 32], SecretOrigin::Kem);
        let mut a2 = a.clone();
        a2.bytes[5] ^= 0xff;
        let mut b2 = b.clone();
        b2.bytes[31] ^= 0x01;
        let base = combine_secrets(&[a.clone(), b.clone()]).unwrap();
        assert_ne!(combine_secrets(&[a2, b.clone()]).unwrap(), base);
        assert_ne!(combine_secrets(&[a, b2]).unwrap(), base);
    }
}
