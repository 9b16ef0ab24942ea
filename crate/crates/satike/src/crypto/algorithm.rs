//! Algorithm registry: every primitive the protocol variants use, with the
//! exact byte sizes of its artifacts.
//!
//! Sizes are frozen from the standardized parameter sets (FIPS 203/204 for
//! ML-KEM/ML-DSA, the Classic McEliece submission, SEC1 fixed-width point
//! encodings for the elliptic-curve primitives). All wire accounting in the
//! codec and the byte-cost reports derives from this table.

use serde::{Deserialize, Serialize};

use super::CryptoError;

/// Identifier for every algorithm known to the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmId {
    X25519,
    EcP384,
    MlKem512,
    MlKem768,
    McEliece348864,
    McEliece460896,
    EcdsaP256,
    EcdsaP384,
    MlDsa44,
    MlDsa65,
    Aes128Gcm,
    Aes192Gcm,
    HmacSha256,
    HmacSha384,
    Psk,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 15] = [
        AlgorithmId::X25519,
        AlgorithmId::EcP384,
        AlgorithmId::MlKem512,
        AlgorithmId::MlKem768,
        AlgorithmId::McEliece348864,
        AlgorithmId::McEliece460896,
        AlgorithmId::EcdsaP256,
        AlgorithmId::EcdsaP384,
        AlgorithmId::MlDsa44,
        AlgorithmId::MlDsa65,
        AlgorithmId::Aes128Gcm,
        AlgorithmId::Aes192Gcm,
        AlgorithmId::HmacSha256,
        AlgorithmId::HmacSha384,
        AlgorithmId::Psk,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::X25519 => "X25519",
            AlgorithmId::EcP384 => "ECP384",
            AlgorithmId::MlKem512 => "ML-KEM-512",
            AlgorithmId::MlKem768 => "ML-KEM-768",
            AlgorithmId::McEliece348864 => "MCELIECE-348864",
            AlgorithmId::McEliece460896 => "MCELIECE-460896",
            AlgorithmId::EcdsaP256 => "ECDSA-P256",
            AlgorithmId::EcdsaP384 => "ECDSA-P384",
            AlgorithmId::MlDsa44 => "ML-DSA-44",
            AlgorithmId::MlDsa65 => "ML-DSA-65",
            AlgorithmId::Aes128Gcm => "AES-128-GCM",
            AlgorithmId::Aes192Gcm => "AES-192-GCM",
            AlgorithmId::HmacSha256 => "HMAC-SHA-256",
            AlgorithmId::HmacSha384 => "HMAC-SHA-384",
            AlgorithmId::Psk => "PSK",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, CryptoError> {
        let upper = name.to_ascii_uppercase();
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.name() == upper)
            .ok_or_else(|| CryptoError::UnknownAlgorithm(name.to_string()))
    }

    /// A stable one-byte code, used by the toy provider for domain separation
    /// and by the compact SA encoding.
    pub fn code(&self) -> u8 {
        match self {
            AlgorithmId::X25519 => 1,
            AlgorithmId::EcP384 => 2,
            AlgorithmId::MlKem512 => 3,
            AlgorithmId::MlKem768 => 4,
            AlgorithmId::McEliece348864 => 5,
            AlgorithmId::McEliece460896 => 6,
            AlgorithmId::EcdsaP256 => 7,
            AlgorithmId::EcdsaP384 => 8,
            AlgorithmId::MlDsa44 => 9,
            AlgorithmId::MlDsa65 => 10,
            AlgorithmId::Aes128Gcm => 11,
            AlgorithmId::Aes192Gcm => 12,
            AlgorithmId::HmacSha256 => 13,
            AlgorithmId::HmacSha384 => 14,
            AlgorithmId::Psk => 15,
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The cryptographic role an algorithm plays in a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Classical (Diffie-Hellman style) key exchange.
    Kex,
    /// Key encapsulation mechanism.
    Kem,
    /// Digital signature.
    Sig,
    /// Authenticated encryption with associated data.
    Aead,
    /// Keyed pseudo-random function.
    Prf,
    /// Pre-shared key (no asymmetric artifacts).
    Psk,
}

/// Registry entry: role plus the byte length of every artifact the algorithm
/// produces. Zero means "not applicable for this role".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub id: AlgorithmId,
    pub role: Role,
    /// Public key length (KEX/KEM/SIG).
    pub public_key_bytes: usize,
    /// KEM ciphertext or signature length.
    pub ciphertext_or_sig_bytes: usize,
    /// Shared-secret length for KEX/KEM; symmetric key length for AEAD;
    /// output length for PRF.
    pub shared_secret_bytes: usize,
}

impl AlgorithmSpec {
    /// AEAD key length.
    pub fn key_len(&self) -> usize {
        debug_assert_eq!(self.role, Role::Aead);
        self.shared_secret_bytes
    }

    /// PRF output length.
    pub fn output_len(&self) -> usize {
        debug_assert_eq!(self.role, Role::Prf);
        self.shared_secret_bytes
    }
}

const REGISTRY: [AlgorithmSpec; 15] = [
    AlgorithmSpec {
        id: AlgorithmId::X25519,
        role: Role::Kex,
        public_key_bytes: 32,
        ciphertext_or_sig_bytes: 0,
        shared_secret_bytes: 32,
    },
    // Uncompressed x||y coordinates, shared secret is the x coordinate.
    AlgorithmSpec {
        id: AlgorithmId::EcP384,
        role: Role::Kex,
        public_key_bytes: 96,
        ciphertext_or_sig_bytes: 0,
        shared_secret_bytes: 48,
    },
    AlgorithmSpec {
        id: AlgorithmId::MlKem512,
        role: Role::Kem,
        public_key_bytes: 800,
        ciphertext_or_sig_bytes: 768,
        shared_secret_bytes: 32,
    },
    AlgorithmSpec {
        id: AlgorithmId::MlKem768,
        role: Role::Kem,
        public_key_bytes: 1184,
        ciphertext_or_sig_bytes: 1088,
        shared_secret_bytes: 32,
    },
    AlgorithmSpec {
        id: AlgorithmId::McEliece348864,
        role: Role::Kem,
        public_key_bytes: 261120,
        ciphertext_or_sig_bytes: 96,
        shared_secret_bytes: 32,
    },
    AlgorithmSpec {
        id: AlgorithmId::McEliece460896,
        role: Role::Kem,
        public_key_bytes: 524160,
        ciphertext_or_sig_bytes: 156,
        shared_secret_bytes: 32,
    },
    // Raw fixed-width r||s signatures and x||y public keys (no ASN.1, no
    // point-compression prefix) so byte accounting is deterministic.
    AlgorithmSpec {
        id: AlgorithmId::EcdsaP256,
        role: Role::Sig,
        public_key_bytes: 64,
        ciphertext_or_sig_bytes: 64,
        shared_secret_bytes: 0,
    },
    AlgorithmSpec {
        id: AlgorithmId::EcdsaP384,
        role: Role::Sig,
        public_key_bytes: 96,
        ciphertext_or_sig_bytes: 96,
        shared_secret_bytes: 0,
    },
    AlgorithmSpec {
        id: AlgorithmId::MlDsa44,
        role: Role::Sig,
        public_key_bytes: 1312,
        ciphertext_or_sig_bytes: 2420,
        shared_secret_bytes: 0,
    },
    AlgorithmSpec {
        id: AlgorithmId::MlDsa65,
        role: Role::Sig,
        public_key_bytes: 1952,
        ciphertext_or_sig_bytes: 3309,
        shared_secret_bytes: 0,
    },
    AlgorithmSpec {
        id: AlgorithmId::Aes128Gcm,
        role: Role::Aead,
        public_key_bytes: 0,
        ciphertext_or_sig_bytes: 0,
        shared_secret_bytes: 16,
    },
    AlgorithmSpec {
        id: AlgorithmId::Aes192Gcm,
        role: Role::Aead,
        public_key_bytes: 0,
        ciphertext_or_sig_bytes: 0,
        shared_secret_bytes: 24,
    },
    AlgorithmSpec {
        id: AlgorithmId::HmacSha256,
        role: Role::Prf,
        public_key_bytes: 0,
        ciphertext_or_sig_bytes: 0,
        shared_secret_bytes: 32,
    },
    AlgorithmSpec {
        id: AlgorithmId::HmacSha384,
        role: Role::Prf,
        public_key_bytes: 0,
        ciphertext_or_sig_bytes: 0,
        shared_secret_bytes: 48,
    },
    AlgorithmSpec {
        id: AlgorithmId::Psk,
        role: Role::Psk,
        public_key_bytes: 0,
        ciphertext_or_sig_bytes: 0,
        shared_secret_bytes: 0,
    },
];

/// Look up the immutable spec for an algorithm.
pub fn registry_lookup(id: AlgorithmId) -> AlgorithmSpec {
    REGISTRY
        .iter()
        .copied()
        .find(|s| s.id == id)
        .expect("every AlgorithmId has a registry row")
}

/// The full registry table, for dumps and cross-checking.
pub fn registry_table() -> &'static [AlgorithmSpec] {
    &REGISTRY
}
