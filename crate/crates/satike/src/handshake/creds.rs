//! Authentication credentials per variant, and deterministic generation of
//! matched credential pairs for tests and simulation runs.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::HandshakeError;
use crate::crypto::suite::{AuthMode, SuiteConfig};
use crate::crypto::{toy, KeyPair, KeyProvenance};

/// Nonce length (the λ of the two-message exchange), fixed at 256 bits.
pub const NONCE_LEN: usize = 32;

/// Opaque 16-byte peer identifier carried in ID payloads.
pub type PeerId = [u8; 16];

/// Key material for one side of a handshake. Only the fields the suite's
/// authentication mode requires need to be populated.
#[derive(Debug, Clone, Default)]
pub struct AuthCredentials {
    pub local_id: PeerId,
    pub peer_id: PeerId,
    /// Classical signing keypair (RAW-PK-SIG, HYBRID-SIG).
    pub sig_classical: Option<KeyPair>,
    /// Post-quantum signing keypair (PQ-CERT-SIG, HYBRID-SIG).
    pub sig_pq: Option<KeyPair>,
    /// Peer's classical verification key.
    pub peer_pub_classical: Option<Vec<u8>>,
    /// Peer's post-quantum verification key (pre-shared; for PQ-CERT-SIG this
    /// stands in for the certificate, which is an opaque out-of-band blob).
    pub peer_pub_pq: Option<Vec<u8>>,
    /// Pre-shared authentication key (PSK mode).
    pub psk: Option<Vec<u8>>,
    /// Post-quantum pre-shared key folded into the key schedule (TB2).
    pub ppk: Option<Vec<u8>>,
    /// Own static KEM keypair (IMPLICIT-KEM).
    pub kem_static: Option<KeyPair>,
    /// Peer's static KEM public key, pre-shared out-of-band (IMPLICIT-KEM).
    pub peer_kem_static_pub: Option<Vec<u8>>,
}

impl AuthCredentials {
    /// Check that the material matches what `suite.auth_mode` requires.
    pub fn check_for(&self, suite: &SuiteConfig) -> Result<(), HandshakeError> {
        let ok = match suite.auth_mode {
            AuthMode::RawPkSig => self.sig_classical.is_some() && self.peer_pub_classical.is_some(),
            AuthMode::Psk => self.psk.is_some(),
            AuthMode::PqCertSig => self.sig_pq.is_some() && self.peer_pub_pq.is_some(),
            AuthMode::HybridSig => {
                self.sig_classical.is_some()
                    && self.sig_pq.is_some()
                    && self.peer_pub_classical.is_some()
                    && self.peer_pub_pq.is_some()
            }
            AuthMode::ImplicitKem => {
                let static_ok = self
                    .kem_static
                    .as_ref()
                    .is_some_and(|kp| kp.provenance == KeyProvenance::StaticOob);
                static_ok && self.peer_kem_static_pub.is_some()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(HandshakeError::CredentialMismatch)
        }
    }

    /// Generate a matched (initiator, responder) credential pair for a suite,
    /// deterministic in `seed`.
    pub fn generate_pair(
        suite: &SuiteConfig,
        seed: u64,
    ) -> Result<(AuthCredentials, AuthCredentials), HandshakeError> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut id_i: PeerId = [0; 16];
        let mut id_r: PeerId = [0; 16];
        rng.fill_bytes(&mut id_i);
        rng.fill_bytes(&mut id_r);
        let mut initiator = AuthCredentials {
            local_id: id_i,
            peer_id: id_r,
            ..Default::default()
        };
        let mut responder = AuthCredentials {
            local_id: id_r,
            peer_id: id_i,
            ..Default::default()
        };
        match suite.auth_mode {
            AuthMode::RawPkSig => {
                let spec = suite.sig_classical.as_ref().expect("suite has classical sig");
                let kp_i = toy::sig_keygen(spec, &mut rng, KeyProvenance::StaticOob)?;
                let kp_r = toy::sig_keygen(spec, &mut rng, KeyProvenance::StaticOob)?;
                initiator.peer_pub_classical = Some(kp_r.public.clone());
                responder.peer_pub_classical = Some(kp_i.public.clone());
                initiator.sig_classical = Some(kp_i);
                responder.sig_classical = Some(kp_r);
            }
            AuthMode::Psk => {
                let mut psk = vec![0u8; 32];
                rng.fill_bytes(&mut psk);
                let mut ppk = vec![0u8; 32];
                rng.fill_bytes(&mut ppk);
                initiator.psk = Some(psk.clone());
                responder.psk = Some(psk);
                initiator.ppk = Some(ppk.clone());
                responder.ppk = Some(ppk);
            }
            AuthMode::PqCertSig => {
                let spec = suite.sig_pq.as_ref().expect("suite has pq sig");
                let kp_i = toy::sig_keygen(spec, &mut rng, KeyProvenance::StaticOob)?;
                let kp_r = toy::sig_keygen(spec, &mut rng, KeyProvenance::StaticOob)?;
                initiator.peer_pub_pq = Some(kp_r.public.clone());
                responder.peer_pub_pq = Some(kp_i.public.clone());
                initiator.sig_pq = Some(kp_i);
                responder.sig_pq = Some(kp_r);
            }
            AuthMode::HybridSig => {
                let c = suite.sig_classical.as_ref().expect("suite has classical sig");
                let q = suite.sig_pq.as_ref().expect("suite has pq sig");
                let ci = toy::sig_keygen(c, &mut rng, KeyProvenance::StaticOob)?;
                let cr = toy::sig_keygen(c, &mut rng, KeyProvenance::StaticOob)?;
                let qi = toy::sig_keygen(q, &mut rng, KeyProvenance::StaticOob)?;
                let qr = toy::sig_keygen(q, &mut rng, KeyProvenance::StaticOob)?;
                initiator.peer_pub_classical = Some(cr.public.clone());
                initiator.peer_pub_pq = Some(qr.public.clone());
                responder.peer_pub_classical = Some(ci.public.clone());
                responder.peer_pub_pq = Some(qi.public.clone());
                initiator.sig_classical = Some(ci);
                initiator.sig_pq = Some(qi);
                responder.sig_classical = Some(cr);
                responder.sig_pq = Some(qr);
            }
            AuthMode::ImplicitKem => {
                let spec = suite.kem.as_ref().expect("suite has kem");
                let kp_i = toy::kem_keygen(spec, &mut rng, KeyProvenance::StaticOob)?;
                let kp_r = toy::kem_keygen(spec, &mut rng, KeyProvenance::StaticOob)?;
                initiator.peer_kem_static_pub = Some(kp_r.public.clone());
                responder.peer_kem_static_pub = Some(kp_i.public.clone());
                initiator.kem_static = Some(kp_i);
                responder.kem_static = Some(kp_r);
            }
        }
        Ok((initiator, responder))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{Level, Variant};

    #[test]
    fn generated_pairs_satisfy_their_suite() {
        for variant in Variant::ALL {
            for level in Level::ALL {
                let suite = SuiteConfig::resolve(variant, level).unwrap();
                let (i, r) = AuthCredentials::generate_pair(&suite, 7).unwrap();
                i.check_for(&suite).unwrap();
                r.check_for(&suite).unwrap();
                assert_eq!(i.local_id, r.peer_id);
            }
        }
    }

    #[test]
    fn mismatched_creds_rejected() {
        let tb2 = SuiteConfig::resolve(Variant::Tb2, Level::I).unwrap();
        let lw3 = SuiteConfig::resolve(Variant::Lw3, Level::I).unwrap();
        let (psk_creds, _) = AuthCredentials::generate_pair(&tb2, 1).unwrap();
        assert!(matches!(
            psk_creds.check_for(&lw3),
            Err(HandshakeError::CredentialMismatch)
        ));
    }

    #[test]
    fn lw3_static_material_is_oob() {
        let suite = SuiteConfig::resolve(Variant::Lw3, Level::I).unwrap();
        let (i, r) = AuthCredentials::generate_pair(&suite, 3).unwrap();
        for creds in [&i, &r] {
            assert_eq!(
                creds.kem_static.as_ref().unwrap().provenance,
                KeyProvenance::StaticOob
            );
        }
    }
}
