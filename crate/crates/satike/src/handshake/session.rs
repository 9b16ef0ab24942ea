//! Per-peer handshake session and the step-driven state machine.

use rand::RngCore;

use super::creds::{AuthCredentials, NONCE_LEN};
use super::schedule::{skeyseed_initial, skeyseed_rekey, KeySchedule};
use super::HandshakeError;
use crate::codec::{
    check_mtu_safe, ExchangeType, Flags, Message, MessageHeader, OverheadModel, Payload,
    PayloadKind,
};
use crate::codec::{decode_inner_chain, encode_inner_chain};
use crate::crypto::suite::{AuthMode, SuiteConfig};
use crate::crypto::{aead_open, aead_seal, combine_secrets, prf, prf_plus, toy, KeyPair,
    KeyProvenance, SharedSecret, Variant};

const KEY_PAD: &[u8] = b"Key Pad for IKEv2";
const LW3_NONCE_ENC_LABEL: &[u8] = b"lw3-nonce-enc";
/// Fixed traffic-selector body, included for byte accounting only.
const TS_BODY: [u8; 8] = [0x07, 0x00, 0x00, 0x08, 0x00, 0x00, 0xff, 0xff];
const SA_BODY_LEN: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleEnd {
    Initiator,
    Responder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Idle,
    WaitInit,
    WaitIntermediate,
    WaitAuth,
    Established,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Sent,
    Received,
}

/// One side of a handshake. Created via [`Session::initiate`] or
/// [`Session::respond`] and advanced strictly sequentially by [`Session::step`].
#[derive(Debug)]
pub struct Session {
    pub role: RoleEnd,
    pub suite: SuiteConfig,
    pub phase: Phase,
    creds: AuthCredentials,
    overhead: OverheadModel,
    spi_i: [u8; 8],
    spi_r: [u8; 8],
    nonce_local: Vec<u8>,
    nonce_peer: Vec<u8>,
    kex_keys: Option<KeyPair>,
    kem_keys: Option<KeyPair>,
    secrets: Vec<SharedSecret>,
    schedule: Option<KeySchedule>,
    /// Encoded bytes of every message sent or received, in order.
    pub transcript: Vec<(Direction, Vec<u8>)>,
    first_sent: Vec<u8>,
    first_received: Vec<u8>,
}

/// Compact fixed SA encoding: one proposal, one transform per role, padded to
/// a constant 48 bytes so byte accounting is deterministic.
fn sa_body(suite: &SuiteConfig) -> Vec<u8> {
    let mut body = vec![0u8; SA_BODY_LEN];
    body[0] = match suite.level {
        crate::crypto::Level::I => 1,
        crate::crypto::Level::III => 3,
    };
    body[1] = suite.variant.message_count() as u8;
    body[2] = suite.aead.id.code();
    body[3] = suite.prf.id.code();
    body[4] = suite.kex.as_ref().map(|s| s.id.code()).unwrap_or(0);
    body[5] = suite.kem.as_ref().map(|s| s.id.code()).unwrap_or(0);
    body[6] = suite.sig_classical.as_ref().map(|s| s.id.code()).unwrap_or(0);
    body[7] = suite.sig_pq.as_ref().map(|s| s.id.code()).unwrap_or(0);
    body
}

/// Deterministic per-message AEAD nonce: sender role byte, zero padding,
/// message id. Each (key, direction, id) triple is used at most once.
fn message_nonce(sender: RoleEnd, message_id: u32) -> [u8; 12] {
    let mut nonce = [0u8; 12];
    nonce[0] = match sender {
        RoleEnd::Initiator => 0x49,
        RoleEnd::Responder => 0x52,
    };
    nonce[8..].copy_from_slice(&message_id.to_be_bytes());
    nonce
}

fn random_nonce(rng: &mut dyn RngCore) -> Vec<u8> {
    let mut n = vec![0u8; NONCE_LEN];
    rng.fill_bytes(&mut n);
    n
}

impl Session {
    /// Start a handshake as initiator; returns the session and the first
    /// message to send.
    pub fn initiate(
        suite: SuiteConfig,
        creds: AuthCredentials,
        overhead: OverheadModel,
        rng: &mut dyn RngCore,
    ) -> Result<(Session, Message), HandshakeError> {
        creds.check_for(&suite)?;
        let mut spi_i = [0u8; 8];
        rng.fill_bytes(&mut spi_i);
        let mut session = Session {
            role: RoleEnd::Initiator,
            suite,
            phase: Phase::WaitInit,
            creds,
            overhead,
            spi_i,
            spi_r: [0u8; 8],
            nonce_local: random_nonce(rng),
            nonce_peer: Vec::new(),
            kex_keys: None,
            kem_keys: None,
            secrets: Vec::new(),
            schedule: None,
            transcript: Vec::new(),
            first_sent: Vec::new(),
            first_received: Vec::new(),
        };
        let message = match session.suite.variant {
            Variant::Lw3 => session.build_lw3_message(rng, 0, Flags::INITIATOR)?,
            _ => session.build_init_request(rng)?,
        };
        if !check_mtu_safe(&message, &session.overhead) {
            session.phase = Phase::Failed;
            return Err(HandshakeError::InitExceedsMtu);
        }
        session.record_sent(&message)?;
        Ok((session, message))
    }

    /// Create the responder side; it waits for the initiator's first message.
    pub fn respond(
        suite: SuiteConfig,
        creds: AuthCredentials,
        overhead: OverheadModel,
    ) -> Result<Session, HandshakeError> {
        creds.check_for(&suite)?;
        Ok(Session {
            role: RoleEnd::Responder,
            suite,
            phase: Phase::Idle,
            creds,
            overhead,
            spi_i: [0u8; 8],
            spi_r: [0u8; 8],
            nonce_local: Vec::new(),
            nonce_peer: Vec::new(),
            kex_keys: None,
            kem_keys: None,
            secrets: Vec::new(),
            schedule: None,
            transcript: Vec::new(),
            first_sent: Vec::new(),
            first_received: Vec::new(),
        })
    }

    /// The derived key schedule, present once enough secrets are known.
    pub fn schedule(&self) -> Option<&KeySchedule> {
        self.schedule.as_ref()
    }

    /// sk_d, the root of all further derivations.
    pub fn sk_d(&self) -> Option<&[u8]> {
        self.schedule.as_ref().map(|s| s.sk_d.as_slice())
    }

    pub fn is_established(&self) -> bool {
        self.phase == Phase::Established
    }

    /// Advance one phase with an incoming message, optionally producing the
    /// reply. Any failure moves the session to [`Phase::Failed`].
    pub fn step(
        &mut self,
        incoming: &Message,
        rng: &mut dyn RngCore,
    ) -> Result<Option<Message>, HandshakeError> {
        match self.step_inner(incoming, rng) {
            Ok(out) => Ok(out),
            Err(e) => {
                self.phase = Phase::Failed;
                Err(e)
            }
        }
    }

    fn step_inner(
        &mut self,
        incoming: &Message,
        rng: &mut dyn RngCore,
    ) -> Result<Option<Message>, HandshakeError> {
        match (self.role, self.phase, incoming.header.exchange_type) {
            // Responder receives the first message.
            (RoleEnd::Responder, Phase::Idle, ExchangeType::Init)
                if self.suite.variant != Variant::Lw3 =>
            {
                self.record_received(incoming)?;
                self.handle_init_request(incoming, rng).map(Some)
            }
            (RoleEnd::Responder, Phase::Idle, ExchangeType::Lw3Exch)
                if self.suite.variant == Variant::Lw3 =>
            {
                self.record_received(incoming)?;
                self.handle_lw3_request(incoming, rng).map(Some)
            }
            // Initiator receives the INIT response.
            (RoleEnd::Initiator, Phase::WaitInit, ExchangeType::Init)
                if self.suite.variant != Variant::Lw3 =>
            {
                self.expect_response(incoming, 0)?;
                self.record_received(incoming)?;
                self.handle_init_response(incoming, rng).map(Some)
            }
            (RoleEnd::Initiator, Phase::WaitInit, ExchangeType::Lw3Exch)
                if self.suite.variant == Variant::Lw3 =>
            {
                self.expect_response(incoming, 0)?;
                self.record_received(incoming)?;
                self.handle_lw3_response(incoming)?;
                Ok(None)
            }
            // Intermediate exchange (three-exchange variants only).
            (RoleEnd::Responder, Phase::WaitIntermediate, ExchangeType::Intermediate) => {
                self.record_received(incoming)?;
                self.handle_intermediate_request(incoming, rng).map(Some)
            }
            (RoleEnd::Initiator, Phase::WaitIntermediate, ExchangeType::Intermediate) => {
                self.expect_response(incoming, 1)?;
                self.record_received(incoming)?;
                self.handle_intermediate_response(incoming, rng).map(Some)
            }
            // Authentication exchange.
            (RoleEnd::Responder, Phase::WaitAuth, ExchangeType::Auth) => {
                self.record_received(incoming)?;
                self.handle_auth_request(incoming).map(Some)
            }
            (RoleEnd::Initiator, Phase::WaitAuth, ExchangeType::Auth) => {
                self.expect_response(incoming, self.auth_message_id())?;
                self.record_received(incoming)?;
                self.handle_auth_response(incoming)?;
                Ok(None)
            }
            _ => Err(HandshakeError::UnexpectedExchange),
        }
    }

    // ---- INIT ----

    fn build_init_request(&mut self, rng: &mut dyn RngCore) -> Result<Message, HandshakeError> {
        let ke_body = match self.suite.variant {
            Variant::Tb1 | Variant::Lw1 => {
                let spec = self.suite.kex.clone().expect("kex present");
                let kp = toy::kex_generate(&spec, rng)?;
                let public = kp.public.clone();
                self.kex_keys = Some(kp);
                public
            }
            Variant::Tb2 => {
                let spec = self.suite.kem.clone().expect("kem present");
                let kp = toy::kem_keygen(&spec, rng, KeyProvenance::Ephemeral)?;
                let public = kp.public.clone();
                self.kem_keys = Some(kp);
                public
            }
            Variant::Lw2 => {
                // Classical and post-quantum public values concatenated,
                // classical first.
                let kex_spec = self.suite.kex.clone().expect("kex present");
                let kem_spec = self.suite.kem.clone().expect("kem present");
                let kex = toy::kex_generate(&kex_spec, rng)?;
                let kem = toy::kem_keygen(&kem_spec, rng, KeyProvenance::Ephemeral)?;
                let mut body = kex.public.clone();
                body.extend_from_slice(&kem.public);
                self.kex_keys = Some(kex);
                self.kem_keys = Some(kem);
                body
            }
            Variant::Lw3 => unreachable!("LW3 builds its own exchange"),
        };
        Ok(Message::new(
            MessageHeader::new(self.spi_i, [0u8; 8], ExchangeType::Init, 0, Flags::INITIATOR),
            vec![
                Payload::new(PayloadKind::Sa, sa_body(&self.suite)),
                Payload::new(PayloadKind::Ke, ke_body),
                Payload::new(PayloadKind::Nonce, self.nonce_local.clone()),
            ],
        ))
    }

    fn handle_init_request(
        &mut self,
        incoming: &Message,
        rng: &mut dyn RngCore,
    ) -> Result<Message, HandshakeError> {
        self.spi_i = incoming.header.initiator_spi;
        rng.fill_bytes(&mut self.spi_r);
        self.nonce_local = random_nonce(rng);
        let peer_ke = required(incoming, PayloadKind::Ke)?;
        self.nonce_peer = required(incoming, PayloadKind::Nonce)?.body.clone();

        let ke_body = match self.suite.variant {
            Variant::Tb1 | Variant::Lw1 => {
                let spec = self.suite.kex.clone().expect("kex present");
                let kp = toy::kex_generate(&spec, rng)?;
                let ss = toy::kex_derive(&kp, &peer_ke.body)?;
                let public = kp.public.clone();
                self.kex_keys = Some(kp);
                self.secrets.push(ss);
                public
            }
            Variant::Tb2 => {
                let spec = self.suite.kem.clone().expect("kem present");
                let (ct, ss) = toy::kem_encap(&peer_ke.body, &spec, rng)?;
                self.secrets.push(ss);
                ct
            }
            Variant::Lw2 => {
                let kex_spec = self.suite.kex.clone().expect("kex present");
                let kem_spec = self.suite.kem.clone().expect("kem present");
                let split = kex_spec.public_key_bytes;
                if peer_ke.body.len() != split + kem_spec.public_key_bytes {
                    return Err(HandshakeError::MissingPayload(PayloadKind::Ke));
                }
                let kex = toy::kex_generate(&kex_spec, rng)?;
                let ss_classical = toy::kex_derive(&kex, &peer_ke.body[..split])?;
                let (ct, ss_pq) = toy::kem_encap(&peer_ke.body[split..], &kem_spec, rng)?;
                let mut body = kex.public.clone();
                body.extend_from_slice(&ct);
                self.kex_keys = Some(kex);
                self.secrets.push(ss_classical);
                self.secrets.push(ss_pq);
                body
            }
            Variant::Lw3 => unreachable!(),
        };
        let reply = Message::new(
            MessageHeader::new(
                self.spi_i,
                self.spi_r,
                ExchangeType::Init,
                0,
                Flags::RESPONSE,
            ),
            vec![
                Payload::new(PayloadKind::Sa, sa_body(&self.suite)),
                Payload::new(PayloadKind::Ke, ke_body),
                Payload::new(PayloadKind::Nonce, self.nonce_local.clone()),
            ],
        );
        if !check_mtu_safe(&reply, &self.overhead) {
            return Err(HandshakeError::InitExceedsMtu);
        }
        self.record_sent(&reply)?;
        self.derive_initial_schedule()?;
        self.phase = match self.suite.variant {
            Variant::Tb1 | Variant::Lw1 => Phase::WaitIntermediate,
            _ => Phase::WaitAuth,
        };
        Ok(reply)
    }

    fn handle_init_response(
        &mut self,
        incoming: &Message,
        rng: &mut dyn RngCore,
    ) -> Result<Message, HandshakeError> {
        self.spi_r = incoming.header.responder_spi;
        let peer_ke = required(incoming, PayloadKind::Ke)?;
        self.nonce_peer = required(incoming, PayloadKind::Nonce)?.body.clone();

        match self.suite.variant {
            Variant::Tb1 | Variant::Lw1 => {
                let own = self.kex_keys.as_ref().ok_or(HandshakeError::MissingSecret)?;
                let ss = toy::kex_derive(own, &peer_ke.body)?;
                self.secrets.push(ss);
            }
            Variant::Tb2 => {
                let own = self.kem_keys.as_ref().ok_or(HandshakeError::MissingSecret)?;
                let ss = toy::kem_decap(&peer_ke.body, own)
                    .map_err(|_| HandshakeError::DecapsulationFailure)?;
                self.secrets.push(ss);
            }
            Variant::Lw2 => {
                let kex_spec = self.suite.kex.clone().expect("kex present");
                let kem_spec = self.suite.kem.clone().expect("kem present");
                let split = kex_spec.public_key_bytes;
                if peer_ke.body.len() != split + kem_spec.ciphertext_or_sig_bytes {
                    return Err(HandshakeError::MissingPayload(PayloadKind::Ke));
                }
                let kex = self.kex_keys.as_ref().ok_or(HandshakeError::MissingSecret)?;
                let kem = self.kem_keys.as_ref().ok_or(HandshakeError::MissingSecret)?;
                let ss_classical = toy::kex_derive(kex, &peer_ke.body[..split])?;
                let ss_pq = toy::kem_decap(&peer_ke.body[split..], kem)
                    .map_err(|_| HandshakeError::DecapsulationFailure)?;
                self.secrets.push(ss_classical);
                self.secrets.push(ss_pq);
            }
            Variant::Lw3 => unreachable!(),
        }
        self.derive_initial_schedule()?;
        match self.suite.variant {
            Variant::Tb1 | Variant::Lw1 => {
                let msg = self.build_intermediate_request(rng)?;
                self.record_sent(&msg)?;
                self.phase = Phase::WaitIntermediate;
                Ok(msg)
            }
            _ => {
                let msg = self.build_auth_message(Flags::INITIATOR)?;
                self.record_sent(&msg)?;
                self.phase = Phase::WaitAuth;
                Ok(msg)
            }
        }
    }

    // ---- INTERMEDIATE (additional KEM exchange with rekey) ----

    fn build_intermediate_request(
        &mut self,
        rng: &mut dyn RngCore,
    ) -> Result<Message, HandshakeError> {
        let spec = self.suite.kem.clone().expect("kem present");
        let kp = toy::kem_keygen(&spec, rng, KeyProvenance::Ephemeral)?;
        let ke = Payload::new(PayloadKind::Ke, kp.public.clone());
        self.kem_keys = Some(kp);
        self.seal_message(ExchangeType::Intermediate, 1, Flags::INITIATOR, &[ke])
    }

    fn handle_intermediate_request(
        &mut self,
        incoming: &Message,
        rng: &mut dyn RngCore,
    ) -> Result<Message, HandshakeError> {
        let inner = self.open_message(incoming)?;
        let peer_ke = required_in(&inner, PayloadKind::Ke)?;
        let spec = self.suite.kem.clone().expect("kem present");
        let (ct, ss) = toy::kem_encap(&peer_ke.body, &spec, rng)?;
        let reply = self.seal_message(
            ExchangeType::Intermediate,
            1,
            Flags::RESPONSE,
            &[Payload::new(PayloadKind::Ke, ct)],
        )?;
        self.record_sent(&reply)?;
        self.secrets.push(ss);
        self.rekey_schedule()?;
        self.phase = Phase::WaitAuth;
        Ok(reply)
    }

    fn handle_intermediate_response(
        &mut self,
        incoming: &Message,
        _rng: &mut dyn RngCore,
    ) -> Result<Message, HandshakeError> {
        let inner = self.open_message(incoming)?;
        let ct = required_in(&inner, PayloadKind::Ke)?;
        let own = self.kem_keys.as_ref().ok_or(HandshakeError::MissingSecret)?;
        let ss = toy::kem_decap(&ct.body, own).map_err(|_| HandshakeError::DecapsulationFailure)?;
        self.secrets.push(ss);
        self.rekey_schedule()?;
        let msg = self.build_auth_message(Flags::INITIATOR)?;
        self.record_sent(&msg)?;
        self.phase = Phase::WaitAuth;
        Ok(msg)
    }

    // ---- AUTH ----

    fn auth_message_id(&self) -> u32 {
        match self.suite.variant {
            Variant::Tb1 | Variant::Lw1 => 2,
            _ => 1,
        }
    }

    fn build_auth_message(&mut self, flags: Flags) -> Result<Message, HandshakeError> {
        let mut inner = vec![Payload::new(PayloadKind::Id, self.creds.local_id.to_vec())];
        inner.push(self.build_auth_payload()?);
        if self.suite.auth_mode == AuthMode::RawPkSig {
            let kp = self
                .creds
                .sig_classical
                .as_ref()
                .ok_or(HandshakeError::CredentialMismatch)?;
            inner.push(Payload::new(PayloadKind::Cert, kp.public.clone()));
        }
        inner.push(Payload::new(PayloadKind::Ts, TS_BODY.to_vec()));
        self.seal_message(ExchangeType::Auth, self.auth_message_id(), flags, &inner)
    }

    fn handle_auth_request(&mut self, incoming: &Message) -> Result<Message, HandshakeError> {
        let inner = self.open_message(incoming)?;
        self.verify_auth_inner(&inner)?;
        let reply = self.build_auth_message(Flags::RESPONSE)?;
        self.record_sent(&reply)?;
        self.phase = Phase::Established;
        Ok(reply)
    }

    fn handle_auth_response(&mut self, incoming: &Message) -> Result<(), HandshakeError> {
        let inner = self.open_message(incoming)?;
        self.verify_auth_inner(&inner)?;
        self.phase = Phase::Established;
        Ok(())
    }

    /// Octets covered by the authentication check for the given signer:
    /// signer's first message, then the verifier's nonce, then
    /// prf(sk_p, signer identity).
    fn auth_octets(&self, signer: RoleEnd) -> Result<Vec<u8>, HandshakeError> {
        let schedule = self.schedule.as_ref().ok_or(HandshakeError::MissingSecret)?;
        let (first_message, peer_nonce, sk_p, id) = match (signer, self.role) {
            (RoleEnd::Initiator, RoleEnd::Initiator) => (
                &self.first_sent,
                &self.nonce_peer,
                &schedule.sk_pi,
                &self.creds.local_id,
            ),
            (RoleEnd::Initiator, RoleEnd::Responder) => (
                &self.first_received,
                &self.nonce_local,
                &schedule.sk_pi,
                &self.creds.peer_id,
            ),
            (RoleEnd::Responder, RoleEnd::Responder) => (
                &self.first_sent,
                &self.nonce_peer,
                &schedule.sk_pr,
                &self.creds.local_id,
            ),
            (RoleEnd::Responder, RoleEnd::Initiator) => (
                &self.first_received,
                &self.nonce_local,
                &schedule.sk_pr,
                &self.creds.peer_id,
            ),
        };
        let mut octets = first_message.clone();
        octets.extend_from_slice(peer_nonce);
        octets.extend_from_slice(&prf(sk_p, id, &self.suite.prf)?);
        Ok(octets)
    }

    /// Build the AUTH payload for this side's authentication mode.
    pub fn build_auth_payload(&self) -> Result<Payload, HandshakeError> {
        let octets = self.auth_octets(self.role)?;
        let body = match self.suite.auth_mode {
            AuthMode::RawPkSig => {
                let kp = self
                    .creds
                    .sig_classical
                    .as_ref()
                    .ok_or(HandshakeError::CredentialMismatch)?;
                toy::sign(&octets, kp)?
            }
            AuthMode::PqCertSig => {
                let kp = self
                    .creds
                    .sig_pq
                    .as_ref()
                    .ok_or(HandshakeError::CredentialMismatch)?;
                toy::sign(&octets, kp)?
            }
            AuthMode::HybridSig => {
                // Classical signature first, post-quantum second.
                let c = self
                    .creds
                    .sig_classical
                    .as_ref()
                    .ok_or(HandshakeError::CredentialMismatch)?;
                let q = self
                    .creds
                    .sig_pq
                    .as_ref()
                    .ok_or(HandshakeError::CredentialMismatch)?;
                let mut body = toy::sign(&octets, c)?;
                body.extend_from_slice(&toy::sign(&octets, q)?);
                body
            }
            AuthMode::Psk => {
                let psk = self.creds.psk.as_ref().ok_or(HandshakeError::CredentialMismatch)?;
                let pad_key = prf(psk, KEY_PAD, &self.suite.prf)?;
                prf(&pad_key, &octets, &self.suite.prf)?
            }
            AuthMode::ImplicitKem => return Err(HandshakeError::CredentialMismatch),
        };
        Ok(Payload::new(PayloadKind::Auth, body))
    }

    /// Verify the peer's AUTH payload (plus CERT where the mode transmits
    /// one) against the expected octets.
    pub fn verify_auth_payload(
        &self,
        auth: &Payload,
        cert: Option<&Payload>,
    ) -> Result<bool, HandshakeError> {
        let signer = match self.role {
            RoleEnd::Initiator => RoleEnd::Responder,
            RoleEnd::Responder => RoleEnd::Initiator,
        };
        let octets = self.auth_octets(signer)?;
        let ok = match self.suite.auth_mode {
            AuthMode::RawPkSig => {
                let spec = self.suite.sig_classical.clone().expect("suite has sig");
                let transmitted = cert.ok_or(HandshakeError::MissingPayload(PayloadKind::Cert))?;
                // The in-band raw key must match the out-of-band trust anchor.
                let anchor = self
                    .creds
                    .peer_pub_classical
                    .as_ref()
                    .ok_or(HandshakeError::CredentialMismatch)?;
                transmitted.body == *anchor
                    && toy::verify(&octets, &auth.body, &transmitted.body, &spec)?
            }
            AuthMode::PqCertSig => {
                let spec = self.suite.sig_pq.clone().expect("suite has sig");
                let anchor = self
                    .creds
                    .peer_pub_pq
                    .as_ref()
                    .ok_or(HandshakeError::CredentialMismatch)?;
                toy::verify(&octets, &auth.body, anchor, &spec)?
            }
            AuthMode::HybridSig => {
                let c = self.suite.sig_classical.clone().expect("suite has sig");
                let q = self.suite.sig_pq.clone().expect("suite has sig");
                let split = c.ciphertext_or_sig_bytes;
                if auth.body.len() != split + q.ciphertext_or_sig_bytes {
                    return Ok(false);
                }
                let anchor_c = self
                    .creds
                    .peer_pub_classical
                    .as_ref()
                    .ok_or(HandshakeError::CredentialMismatch)?;
                let anchor_q = self
                    .creds
                    .peer_pub_pq
                    .as_ref()
                    .ok_or(HandshakeError::CredentialMismatch)?;
                // Both halves must verify.
                toy::verify(&octets, &auth.body[..split], anchor_c, &c)?
                    && toy::verify(&octets, &auth.body[split..], anchor_q, &q)?
            }
            AuthMode::Psk => {
                let psk = self.creds.psk.as_ref().ok_or(HandshakeError::CredentialMismatch)?;
                let pad_key = prf(psk, KEY_PAD, &self.suite.prf)?;
                let expected = prf(&pad_key, &octets, &self.suite.prf)?;
                expected == auth.body
            }
            AuthMode::ImplicitKem => return Err(HandshakeError::CredentialMismatch),
        };
        Ok(ok)
    }

    fn verify_auth_inner(&self, inner: &[Payload]) -> Result<(), HandshakeError> {
        let id = required_in(inner, PayloadKind::Id)?;
        if id.body != self.creds.peer_id {
            return Err(HandshakeError::AuthFailure);
        }
        let auth = required_in(inner, PayloadKind::Auth)?;
        let cert = inner.iter().find(|p| p.kind == PayloadKind::Cert);
        if self.verify_auth_payload(auth, cert)? {
            Ok(())
        } else {
            Err(HandshakeError::AuthFailure)
        }
    }

    // ---- LW3 ----

    fn lw3_seal_nonce(&self, shared: &[u8]) -> Result<Vec<u8>, HandshakeError> {
        let key = prf_plus(
            shared,
            LW3_NONCE_ENC_LABEL,
            self.suite.aead.key_len(),
            &self.suite.prf,
        )?;
        // The key is a fresh one-time secret; a fixed nonce is never reused
        // under it.
        Ok(aead_seal(&key, &[0u8; 12], &[], &self.nonce_local, &self.suite.aead)?)
    }

    fn lw3_open_nonce(&self, shared: &[u8], sealed: &[u8]) -> Result<Vec<u8>, HandshakeError> {
        let key = prf_plus(
            shared,
            LW3_NONCE_ENC_LABEL,
            self.suite.aead.key_len(),
            &self.suite.prf,
        )?;
        aead_open(&key, &[0u8; 12], &[], sealed, &self.suite.aead)
            .map_err(|_| HandshakeError::NonceDecryptFailure)
    }

    fn build_lw3_message(
        &mut self,
        rng: &mut dyn RngCore,
        message_id: u32,
        flags: Flags,
    ) -> Result<Message, HandshakeError> {
        let spec = self.suite.kem.clone().expect("kem present");
        let peer_pub = self
            .creds
            .peer_kem_static_pub
            .as_ref()
            .ok_or(HandshakeError::CredentialMismatch)?;
        let (ct, ss) = toy::kem_encap(peer_pub, &spec, rng)?;
        if self.nonce_local.is_empty() {
            self.nonce_local = random_nonce(rng);
        }
        let sealed = self.lw3_seal_nonce(&ss.bytes)?;
        self.secrets.push(ss);
        Ok(Message::new(
            MessageHeader::new(self.spi_i, self.spi_r, ExchangeType::Lw3Exch, message_id, flags),
            vec![
                Payload::new(PayloadKind::KemCt, ct),
                Payload::new(PayloadKind::EncNonce, sealed),
            ],
        ))
    }

    /// Decapsulate the peer's ciphertext with the static key and recover the
    /// peer nonce. AEAD failure here IS the (implicit) authentication failure.
    fn lw3_absorb_peer(&mut self, incoming: &Message) -> Result<SharedSecret, HandshakeError> {
        let ct = required(incoming, PayloadKind::KemCt)?;
        let sealed = required(incoming, PayloadKind::EncNonce)?;
        let own = self
            .creds
            .kem_static
            .as_ref()
            .ok_or(HandshakeError::CredentialMismatch)?;
        let peer_ss =
            toy::kem_decap(&ct.body, own).map_err(|_| HandshakeError::DecapsulationFailure)?;
        self.nonce_peer = self.lw3_open_nonce(&peer_ss.bytes, &sealed.body)?;
        Ok(peer_ss)
    }

    fn lw3_derive(&mut self, peer_ss: SharedSecret, peer_is_initiator: bool) -> Result<(), HandshakeError> {
        // Initiator-first ordering for both the nonces and the secrets:
        // the secret the initiator encapsulated comes first.
        let (n_a, n_b, k_a, k_b) = if peer_is_initiator {
            (
                self.nonce_peer.clone(),
                self.nonce_local.clone(),
                peer_ss.bytes.clone(),
                self.secrets[0].bytes.clone(),
            )
        } else {
            (
                self.nonce_local.clone(),
                self.nonce_peer.clone(),
                self.secrets[0].bytes.clone(),
                peer_ss.bytes.clone(),
            )
        };
        self.secrets.push(peer_ss);
        let mut nonces = n_a.clone();
        nonces.extend_from_slice(&n_b);
        let mut combined = k_a;
        combined.extend_from_slice(&k_b);
        let skeyseed = skeyseed_initial(&self.suite.prf, &n_a, &n_b, &combined)?;
        self.schedule = Some(KeySchedule::derive(
            &self.suite.prf,
            &self.suite.aead,
            skeyseed,
            &n_a,
            &n_b,
            &self.spi_i,
            &self.spi_r,
        )?);
        Ok(())
    }

    fn handle_lw3_request(
        &mut self,
        incoming: &Message,
        rng: &mut dyn RngCore,
    ) -> Result<Message, HandshakeError> {
        self.spi_i = incoming.header.initiator_spi;
        rng.fill_bytes(&mut self.spi_r);
        let peer_ss = self.lw3_absorb_peer(incoming)?;
        let reply = self.build_lw3_message(rng, 0, Flags::RESPONSE)?;
        self.record_sent(&reply)?;
        self.lw3_derive(peer_ss, true)?;
        self.phase = Phase::Established;
        Ok(reply)
    }

    fn handle_lw3_response(&mut self, incoming: &Message) -> Result<(), HandshakeError> {
        self.spi_r = incoming.header.responder_spi;
        let peer_ss = self.lw3_absorb_peer(incoming)?;
        self.lw3_derive(peer_ss, false)?;
        self.phase = Phase::Established;
        Ok(())
    }

    // ---- key schedule ----

    fn derive_initial_schedule(&mut self) -> Result<(), HandshakeError> {
        if self.secrets.is_empty() {
            return Err(HandshakeError::MissingSecret);
        }
        let combined = combine_secrets(&self.secrets)?;
        let (nonce_i, nonce_r) = self.nonces_by_role();
        let skeyseed = skeyseed_initial(&self.suite.prf, nonce_i, nonce_r, &combined.bytes)?;
        let mut schedule = KeySchedule::derive(
            &self.suite.prf,
            &self.suite.aead,
            skeyseed,
            nonce_i,
            nonce_r,
            &self.spi_i,
            &self.spi_r,
        )?;
        // The two-exchange PSK variant folds its post-quantum pre-shared key
        // into sk_d and the sk_p keys.
        if self.suite.variant == Variant::Tb2 {
            if let Some(ppk) = &self.creds.ppk {
                schedule.fold_ppk(ppk, &self.suite.prf)?;
            }
        }
        self.schedule = Some(schedule);
        Ok(())
    }

    fn rekey_schedule(&mut self) -> Result<(), HandshakeError> {
        let prev = self.schedule.as_ref().ok_or(HandshakeError::MissingSecret)?;
        let ss_new = self.secrets.last().ok_or(HandshakeError::MissingSecret)?;
        let (nonce_i, nonce_r) = self.nonces_by_role();
        let skeyseed = skeyseed_rekey(&self.suite.prf, &prev.sk_d, &ss_new.bytes, nonce_i, nonce_r)?;
        self.schedule = Some(KeySchedule::derive(
            &self.suite.prf,
            &self.suite.aead,
            skeyseed,
            nonce_i,
            nonce_r,
            &self.spi_i,
            &self.spi_r,
        )?);
        Ok(())
    }

    fn nonces_by_role(&self) -> (&[u8], &[u8]) {
        match self.role {
            RoleEnd::Initiator => (&self.nonce_local, &self.nonce_peer),
            RoleEnd::Responder => (&self.nonce_peer, &self.nonce_local),
        }
    }

    // ---- encrypted payload helpers ----

    fn seal_message(
        &self,
        exchange: ExchangeType,
        message_id: u32,
        flags: Flags,
        inner: &[Payload],
    ) -> Result<Message, HandshakeError> {
        let schedule = self.schedule.as_ref().ok_or(HandshakeError::MissingSecret)?;
        let key = match self.role {
            RoleEnd::Initiator => &schedule.sk_ei,
            RoleEnd::Responder => &schedule.sk_er,
        };
        let plaintext = encode_inner_chain(inner)?;
        let sealed = aead_seal(
            key,
            &message_nonce(self.role, message_id),
            &[],
            &plaintext,
            &self.suite.aead,
        )?;
        Ok(Message::new(
            MessageHeader::new(self.spi_i, self.spi_r, exchange, message_id, flags),
            vec![Payload::new(PayloadKind::Encrypted, sealed)],
        ))
    }

    fn open_message(&self, incoming: &Message) -> Result<Vec<Payload>, HandshakeError> {
        let schedule = self.schedule.as_ref().ok_or(HandshakeError::MissingSecret)?;
        let sender = match self.role {
            RoleEnd::Initiator => RoleEnd::Responder,
            RoleEnd::Responder => RoleEnd::Initiator,
        };
        let key = match sender {
            RoleEnd::Initiator => &schedule.sk_ei,
            RoleEnd::Responder => &schedule.sk_er,
        };
        let sealed = required(incoming, PayloadKind::Encrypted)?;
        let plaintext = aead_open(
            key,
            &message_nonce(sender, incoming.header.message_id),
            &[],
            &sealed.body,
            &self.suite.aead,
        )
        .map_err(|_| HandshakeError::AuthFailure)?;
        Ok(decode_inner_chain(&plaintext)?)
    }

    // ---- bookkeeping ----

    fn expect_response(&self, incoming: &Message, message_id: u32) -> Result<(), HandshakeError> {
        if !incoming.header.flags.contains(Flags::RESPONSE)
            || incoming.header.message_id != message_id
        {
            return Err(HandshakeError::UnexpectedExchange);
        }
        Ok(())
    }

    fn record_sent(&mut self, message: &Message) -> Result<(), HandshakeError> {
        let bytes = message.encode()?;
        if self.first_sent.is_empty() {
            self.first_sent = bytes.clone();
        }
        self.transcript.push((Direction::Sent, bytes));
        Ok(())
    }

    fn record_received(&mut self, message: &Message) -> Result<(), HandshakeError> {
        let bytes = message.encode()?;
        if self.first_received.is_empty() {
            self.first_received = bytes.clone();
        }
        self.transcript.push((Direction::Received, bytes));
        Ok(())
    }
}

/// Drive a full handshake between two in-memory sessions, returning both
/// established sessions and all exchanged messages in order.
pub fn run_in_memory(
    suite: &SuiteConfig,
    creds_i: AuthCredentials,
    creds_r: AuthCredentials,
    overhead: OverheadModel,
    rng_i: &mut dyn RngCore,
    rng_r: &mut dyn RngCore,
) -> Result<(Session, Session, Vec<Message>), HandshakeError> {
    let (mut initiator, first) = Session::initiate(suite.clone(), creds_i, overhead, rng_i)?;
    let mut responder = Session::respond(suite.clone(), creds_r, overhead)?;
    let mut messages = vec![first.clone()];
    let mut current = first;
    let mut to_responder = true;
    loop {
        let out = if to_responder {
            responder.step(&current, rng_r)?
        } else {
            initiator.step(&current, rng_i)?
        };
        match out {
            Some(reply) => {
                messages.push(reply.clone());
                current = reply;
                to_responder = !to_responder;
            }
            None => break,
        }
    }
    Ok((initiator, responder, messages))
}

/// Run the complete two-message exchange and return the transcript plus both
/// sides' root secrets.
pub fn lw3_round(
    suite: &SuiteConfig,
    initiator_creds: AuthCredentials,
    responder_creds: AuthCredentials,
    rng_i: &mut dyn RngCore,
    rng_r: &mut dyn RngCore,
) -> Result<(Vec<Message>, Vec<u8>, Vec<u8>), HandshakeError> {
    let overhead = OverheadModel::new(suite.variant.rohc_default());
    let (initiator, responder, messages) =
        run_in_memory(suite, initiator_creds, responder_creds, overhead, rng_i, rng_r)?;
    let seed_i = initiator
        .schedule()
        .map(|s| s.skeyseed.clone())
        .ok_or(HandshakeError::MissingSecret)?;
    let seed_r = responder
        .schedule()
        .map(|s| s.skeyseed.clone())
        .ok_or(HandshakeError::MissingSecret)?;
    Ok((messages, seed_i, seed_r))
}

fn required<'a>(message: &'a Message, kind: PayloadKind) -> Result<&'a Payload, HandshakeError> {
    message
        .payload(kind)
        .ok_or(HandshakeError::MissingPayload(kind))
}

fn required_in(payloads: &[Payload], kind: PayloadKind) -> Result<&Payload, HandshakeError> {
    payloads
        .iter()
        .find(|p| p.kind == kind)
        .ok_or(HandshakeError::MissingPayload(kind))
}
