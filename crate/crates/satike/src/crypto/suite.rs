//! Variant and security-level resolution into concrete algorithm suites.

use serde::{Deserialize, Serialize};

use super::{registry_lookup, AlgorithmId, AlgorithmSpec, CryptoError};

/// The five protocol variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    Tb1,
    Tb2,
    Lw1,
    Lw2,
    Lw3,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Tb1,
        Variant::Tb2,
        Variant::Lw1,
        Variant::Lw2,
        Variant::Lw3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Tb1 => "TB1",
            Variant::Tb2 => "TB2",
            Variant::Lw1 => "LW1",
            Variant::Lw2 => "LW2",
            Variant::Lw3 => "LW3",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TB1" => Some(Variant::Tb1),
            "TB2" => Some(Variant::Tb2),
            "LW1" => Some(Variant::Lw1),
            "LW2" => Some(Variant::Lw2),
            "LW3" => Some(Variant::Lw3),
            _ => None,
        }
    }

    /// Total messages in a complete handshake.
    pub fn message_count(&self) -> usize {
        match self {
            Variant::Tb1 | Variant::Lw1 => 6,
            Variant::Tb2 | Variant::Lw2 => 4,
            Variant::Lw3 => 2,
        }
    }

    /// Round trips in a complete handshake.
    pub fn round_trips(&self) -> usize {
        self.message_count() / 2
    }

    /// Whether header compression is on by default for this variant.
    pub fn rohc_default(&self) -> bool {
        matches!(self, Variant::Lw1 | Variant::Lw2 | Variant::Lw3)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// NIST security level targeted by a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    I,
    III,
}

impl Level {
    pub const ALL: [Level; 2] = [Level::I, Level::III];

    pub fn name(&self) -> &'static str {
        match self {
            Level::I => "I",
            Level::III => "III",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Some(Level::I),
            "III" | "3" => Some(Level::III),
            _ => None,
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How peers authenticate each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuthMode {
    /// Classical signature; raw public key transmitted in-band (TB1).
    RawPkSig,
    /// MAC keyed by a pre-shared secret (TB2).
    Psk,
    /// Post-quantum signature; certificate pre-shared out-of-band, nothing
    /// transmitted (LW1).
    PqCertSig,
    /// Classical and post-quantum signatures concatenated; both must verify
    /// (LW2).
    HybridSig,
    /// Implicit via decapsulation under static KEM keys (LW3).
    ImplicitKem,
}

/// Fully resolved algorithm suite for one (variant, level) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub level: Level,
    pub variant: Variant,
    pub aead: AlgorithmSpec,
    pub prf: AlgorithmSpec,
    pub kex: Option<AlgorithmSpec>,
    pub kem: Option<AlgorithmSpec>,
    pub sig_classical: Option<AlgorithmSpec>,
    pub sig_pq: Option<AlgorithmSpec>,
    pub auth_mode: AuthMode,
}

impl SuiteConfig {
    /// Resolve the suite for a (variant, level) pair.
    pub fn resolve(variant: Variant, level: Level) -> Result<SuiteConfig, CryptoError> {
        let (aead, prf, kex, kem, sig_c, sig_pq) = match level {
            Level::I => (
                AlgorithmId::Aes128Gcm,
                AlgorithmId::HmacSha256,
                AlgorithmId::X25519,
                AlgorithmId::MlKem512,
                AlgorithmId::EcdsaP256,
                AlgorithmId::MlDsa44,
            ),
            Level::III => (
                AlgorithmId::Aes192Gcm,
                AlgorithmId::HmacSha384,
                AlgorithmId::EcP384,
                AlgorithmId::MlKem768,
                AlgorithmId::EcdsaP384,
                AlgorithmId::MlDsa65,
            ),
        };
        let lw3_kem = match level {
            Level::I => AlgorithmId::McEliece348864,
            Level::III => AlgorithmId::McEliece460896,
        };
        let look = |id: AlgorithmId| Some(registry_lookup(id));
        let suite = match variant {
            Variant::Tb1 => SuiteConfig {
                level,
                variant,
                aead: registry_lookup(aead),
                prf: registry_lookup(prf),
                kex: look(kex),
                kem: look(kem),
                sig_classical: look(sig_c),
                sig_pq: None,
                auth_mode: AuthMode::RawPkSig,
            },
            Variant::Tb2 => SuiteConfig {
                level,
                variant,
                aead: registry_lookup(aead),
                prf: registry_lookup(prf),
                kex: None,
                kem: look(kem),
                sig_classical: None,
                sig_pq: None,
                auth_mode: AuthMode::Psk,
            },
            Variant::Lw1 => SuiteConfig {
                level,
                variant,
                aead: registry_lookup(aead),
                prf: registry_lookup(prf),
                kex: look(kex),
                kem: look(kem),
                sig_classical: None,
                sig_pq: look(sig_pq),
                auth_mode: AuthMode::PqCertSig,
            },
            Variant::Lw2 => SuiteConfig {
                level,
                variant,
                aead: registry_lookup(aead),
                prf: registry_lookup(prf),
                kex: look(kex),
                kem: look(kem),
                sig_classical: look(sig_c),
                sig_pq: look(sig_pq),
                auth_mode: AuthMode::HybridSig,
            },
            Variant::Lw3 => SuiteConfig {
                level,
                variant,
                aead: registry_lookup(aead),
                prf: registry_lookup(prf),
                kex: None,
                kem: look(lw3_kem),
                sig_classical: None,
                sig_pq: None,
                auth_mode: AuthMode::ImplicitKem,
            },
        };
        Ok(suite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tb2_level_i_row() {
        let s = SuiteConfig::resolve(Variant::Tb2, Level::I).unwrap();
        assert!(s.kex.is_none());
        assert_eq!(s.kem.unwrap().id, AlgorithmId::MlKem512);
        assert_eq!(s.auth_mode, AuthMode::Psk);
        assert_eq!(s.aead.id, AlgorithmId::Aes128Gcm);
        assert_eq!(s.prf.id, AlgorithmId::HmacSha256);
    }

    #[test]
    fn lw3_has_no_kex_and_no_sigs() {
        for level in Level::ALL {
            let s = SuiteConfig::resolve(Variant::Lw3, level).unwrap();
            assert!(s.kex.is_none());
            assert!(s.sig_classical.is_none());
            assert!(s.sig_pq.is_none());
            assert_eq!(s.auth_mode, AuthMode::ImplicitKem);
        }
        assert_eq!(
            SuiteConfig::resolve(Variant::Lw3, Level::I)
                .unwrap()
                .kem
                .unwrap()
                .id,
            AlgorithmId::McEliece348864
        );
        assert_eq!(
            SuiteConfig::resolve(Variant::Lw3, Level::III)
                .unwrap()
                .kem
                .unwrap()
                .id,
            AlgorithmId::McEliece460896
        );
    }

    #[test]
    fn level_iii_suite_table() {
        let s = SuiteConfig::resolve(Variant::Lw2, Level::III).unwrap();
        assert_eq!(s.kex.unwrap().id, AlgorithmId::EcP384);
        assert_eq!(s.kem.unwrap().id, AlgorithmId::MlKem768);
        assert_eq!(s.sig_classical.unwrap().id, AlgorithmId::EcdsaP384);
        assert_eq!(s.sig_pq.unwrap().id, AlgorithmId::MlDsa65);
        assert_eq!(s.aead.id, AlgorithmId::Aes192Gcm);
        assert_eq!(s.prf.id, AlgorithmId::HmacSha384);

        let tb1 = SuiteConfig::resolve(Variant::Tb1, Level::III).unwrap();
        assert_eq!(tb1.sig_classical.unwrap().id, AlgorithmId::EcdsaP384);
        assert!(tb1.sig_pq.is_none());
        assert_eq!(tb1.auth_mode, AuthMode::RawPkSig);

        let lw1 = SuiteConfig::resolve(Variant::Lw1, Level::III).unwrap();
        assert!(lw1.sig_classical.is_none());
        assert_eq!(lw1.sig_pq.unwrap().id, AlgorithmId::MlDsa65);
        assert_eq!(lw1.auth_mode, AuthMode::PqCertSig);
    }

    #[test]
    fn message_counts() {
        assert_eq!(Variant::Tb1.message_count(), 6);
        assert_eq!(Variant::Tb2.message_count(), 4);
        assert_eq!(Variant::Lw1.message_count(), 6);
        assert_eq!(Variant::Lw2.message_count(), 4);
        assert_eq!(Variant::Lw3.message_count(), 2);
    }

    #[test]
    fn rohc_defaults_follow_variant_class() {
        assert!(!Variant::Tb1.rohc_default());
        assert!(!Variant::Tb2.rohc_default());
        assert!(Variant::Lw1.rohc_default());
        assert!(Variant::Lw2.rohc_default());
        assert!(Variant::Lw3.rohc_default());
    }
}
