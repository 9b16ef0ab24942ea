//! Run one in-memory handshake per variant and print the message flow and
//! the agreed root key.
//!
//!     cargo run --example handshake_walkthrough

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use satike::codec::OverheadModel;
use satike::crypto::suite::SuiteConfig;
use satike::handshake::{run_in_memory, AuthCredentials};
use satike::{Level, Variant};

fn main() {
    for variant in Variant::ALL {
        let suite = SuiteConfig::resolve(variant, Level::I).unwrap();
        let (creds_i, creds_r) = AuthCredentials::generate_pair(&suite, 7).unwrap();
        let overhead = OverheadModel::new(variant.rohc_default());
        let mut rng_i = ChaCha20Rng::seed_from_u64(14);
        let mut rng_r = ChaCha20Rng::seed_from_u64(15);
        let (initiator, responder, messages) =
            run_in_memory(&suite, creds_i, creds_r, overhead, &mut rng_i, &mut rng_r).unwrap();

        println!("{variant} (level I, {:?} auth):", suite.auth_mode);
        for (i, m) in messages.iter().enumerate() {
            let dir = if i % 2 == 0 { "->" } else { "<-" };
            println!(
                "  {dir} {:?} id={} {:4} bytes  [{}]",
                m.header.exchange_type,
                m.header.message_id,
                m.encode().unwrap().len(),
                m.payloads
                    .iter()
                    .map(|p| format!("{:?}", p.kind))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        assert!(initiator.is_established() && responder.is_established());
        assert_eq!(initiator.sk_d(), responder.sk_d());
        println!(
            "  established; sk_d = {}…\n",
            hex::encode(&initiator.sk_d().unwrap()[..8])
        );
    }
}
