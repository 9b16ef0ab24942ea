//! The two-message exchange over static KEM keys: both sides agree on a root
//! secret after a single round trip, and a wrong static key surfaces as an
//! implicit authentication failure.
//!
//!     cargo run --example two_message_exchange

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use satike::codec::OverheadModel;
use satike::crypto::suite::SuiteConfig;
use satike::handshake::{lw3_round, run_in_memory, AuthCredentials, HandshakeError};
use satike::{Level, Variant};

fn main() {
    let suite = SuiteConfig::resolve(Variant::Lw3, Level::I).unwrap();
    let (creds_i, creds_r) = AuthCredentials::generate_pair(&suite, 99).unwrap();

    let mut rng_i = ChaCha20Rng::seed_from_u64(198);
    let mut rng_r = ChaCha20Rng::seed_from_u64(199);
    let (messages, seed_i, seed_r) =
        lw3_round(&suite, creds_i.clone(), creds_r.clone(), &mut rng_i, &mut rng_r).unwrap();
    assert_eq!(messages.len(), 2);
    assert_eq!(seed_i, seed_r);
    for (i, m) in messages.iter().enumerate() {
        println!(
            "message {}: {} bytes ({})",
            i + 1,
            m.encode().unwrap().len(),
            m.payloads
                .iter()
                .map(|p| format!("{:?}({})", p.kind, p.body.len()))
                .collect::<Vec<_>>()
                .join(" + ")
        );
    }
    println!("agreed root secret: {}…", hex::encode(&seed_i[..8]));

    // Swap in an unrelated static keypair on the responder: decapsulation
    // yields the wrong secret, so the initiator's encrypted nonce fails to
    // open.
    let (wrong, _) = AuthCredentials::generate_pair(&suite, 100).unwrap();
    let mut bad = creds_r;
    bad.kem_static = wrong.kem_static;
    let mut rng_i = ChaCha20Rng::seed_from_u64(198);
    let mut rng_r = ChaCha20Rng::seed_from_u64(199);
    let err = run_in_memory(
        &suite,
        creds_i,
        bad,
        OverheadModel::new(true),
        &mut rng_i,
        &mut rng_r,
    )
    .unwrap_err();
    assert!(matches!(err, HandshakeError::NonceDecryptFailure));
    println!("wrong static key rejected: {err}");
}
