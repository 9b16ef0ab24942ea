//! Initiator/responder state machines for the five handshake variants.
//!
//! TB1 and LW1 run three exchanges (INIT, INTERMEDIATE, AUTH), carrying the
//! classical key exchange in INIT and the KEM in the encrypted INTERMEDIATE,
//! with a key-schedule rekey in between. TB2 and LW2 run two exchanges,
//! TB2 with the KEM alone and LW2 with classical and KEM material
//! concatenated in a single KE payload. LW3 is a fixed-suite two-message
//! exchange over static KEM keys with implicit authentication.

mod creds;
mod oob;
mod schedule;
mod session;

pub use creds::{AuthCredentials, PeerId, NONCE_LEN};
pub use oob::OobStore;
pub use schedule::{skeyseed_initial, skeyseed_rekey, KeySchedule};
pub use session::{lw3_round, run_in_memory, Direction, Phase, RoleEnd, Session};

use thiserror::Error;

use crate::codec::{CodecError, PayloadKind};
use crate::crypto::CryptoError;

#[derive(Debug, Error)]
pub enum HandshakeError {
    #[error("message arrived in an unexpected exchange or order")]
    UnexpectedExchange,
    #[error(transparent)]
    Decode(#[from] CodecError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error("authentication failure")]
    AuthFailure,
    #[error("decapsulation failure")]
    DecapsulationFailure,
    #[error("peer nonce failed to decrypt (implicit authentication failure)")]
    NonceDecryptFailure,
    #[error("required shared secret not yet available")]
    MissingSecret,
    #[error("credentials do not match the suite's authentication mode")]
    CredentialMismatch,
    #[error("initial message exceeds the MTU; no fragmentation is available yet")]
    InitExceedsMtu,
    #[error("required payload {0:?} missing from message")]
    MissingPayload(PayloadKind),
    #[error("key store I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for HandshakeError {
    fn from(e: std::io::Error) -> Self {
        HandshakeError::Io(e.to_string())
    }
}
