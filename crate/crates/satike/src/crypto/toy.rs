//! Deterministic hash-based stand-ins for the asymmetric primitives.
//!
//! Every artifact has exactly the registry length and every operation is a
//! pure function of its inputs plus the bytes drawn from the caller's seeded
//! randomness source, so whole handshakes replay byte-for-byte under a fixed
//! seed. The constructions are NOT secure and make no attempt to be: anyone
//! holding a public key can recompute "shared" secrets and forge signatures.
//!
//! Behavior notes, per operation:
//! - `kem_decap` of a tampered ciphertext succeeds but yields a different
//!   secret (no internal integrity check); tampering is surfaced by whatever
//!   consumes the secret, e.g. AEAD open during the handshake.
//! - `kex_derive` hashes the unordered pair of public values, which is what
//!   makes both directions agree.

use rand::RngCore;
use sha2::{Digest, Sha256};

use super::{
    expect_role, registry_lookup, AlgorithmSpec, CryptoError, KeyPair, KeyProvenance, Role,
    SecretOrigin, SharedSecret,
};

/// Counter-mode SHA-256 expansion with label-based domain separation.
fn expand(label: &str, parts: &[&[u8]], out_len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(out_len);
    let mut counter: u32 = 0;
    while out.len() < out_len {
        let mut h = Sha256::new();
        h.update(label.as_bytes());
        h.update(counter.to_be_bytes());
        for p in parts {
            h.update((p.len() as u64).to_be_bytes());
            h.update(p);
        }
        out.extend_from_slice(&h.finalize());
        counter += 1;
    }
    out.truncate(out_len);
    out
}

fn keygen(
    label_sk: &str,
    label_pk: &str,
    spec: &AlgorithmSpec,
    rng: &mut dyn RngCore,
    provenance: KeyProvenance,
) -> KeyPair {
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let code = [spec.id.code()];
    let secret = expand(label_sk, &[&code, &seed], 32);
    let public = expand(label_pk, &[&code, &secret], spec.public_key_bytes);
    KeyPair {
        algorithm: spec.id,
        public,
        secret,
        provenance,
    }
}

fn public_from_secret(label_pk: &str, spec: &AlgorithmSpec, secret: &[u8]) -> Vec<u8> {
    expand(label_pk, &[&[spec.id.code()], secret], spec.public_key_bytes)
}

// ---- KEM ----

pub fn kem_keygen(
    spec: &AlgorithmSpec,
    rng: &mut dyn RngCore,
    provenance: KeyProvenance,
) -> Result<KeyPair, CryptoError> {
    expect_role(spec, Role::Kem)?;
    Ok(keygen("toy-kem-sk", "toy-kem-pk", spec, rng, provenance))
}

pub fn kem_encap(
    public: &[u8],
    spec: &AlgorithmSpec,
    rng: &mut dyn RngCore,
) -> Result<(Vec<u8>, SharedSecret), CryptoError> {
    expect_role(spec, Role::Kem)?;
    if public.len() != spec.public_key_bytes {
        return Err(CryptoError::MalformedPublicKey {
            expected: spec.public_key_bytes,
            got: public.len(),
        });
    }
    let mut coins = [0u8; 32];
    rng.fill_bytes(&mut coins);
    let code = [spec.id.code()];
    let ciphertext = expand(
        "toy-kem-ct",
        &[&code, public, &coins],
        spec.ciphertext_or_sig_bytes,
    );
    // The secret binds the full ciphertext, so any flipped ciphertext byte
    // decapsulates to a different secret.
    let ss = expand(
        "toy-kem-ss",
        &[&code, public, &ciphertext],
        spec.shared_secret_bytes,
    );
    Ok((
        ciphertext,
        SharedSecret {
            bytes: ss,
            origin: SecretOrigin::Kem,
        },
    ))
}

pub fn kem_decap(ciphertext: &[u8], keypair: &KeyPair) -> Result<SharedSecret, CryptoError> {
    let spec = registry_lookup(keypair.algorithm);
    expect_role(&spec, Role::Kem)?;
    if ciphertext.len() != spec.ciphertext_or_sig_bytes {
        return Err(CryptoError::MalformedCiphertext {
            expected: spec.ciphertext_or_sig_bytes,
            got: ciphertext.len(),
        });
    }
    let public = public_from_secret("toy-kem-pk", &spec, &keypair.secret);
    let ss = expand(
        "toy-kem-ss",
        &[&[spec.id.code()], &public, ciphertext],
        spec.shared_secret_bytes,
    );
    Ok(SharedSecret {
        bytes: ss,
        origin: SecretOrigin::Kem,
    })
}

// ---- KEX ----

pub fn kex_generate(spec: &AlgorithmSpec, rng: &mut dyn RngCore) -> Result<KeyPair, CryptoError> {
    expect_role(spec, Role::Kex)?;
    Ok(keygen(
        "toy-kex-sk",
        "toy-kex-pk",
        spec,
        rng,
        KeyProvenance::Ephemeral,
    ))
}

pub fn kex_derive(own: &KeyPair, peer_public: &[u8]) -> Result<SharedSecret, CryptoError> {
    let spec = registry_lookup(own.algorithm);
    expect_role(&spec, Role::Kex)?;
    if peer_public.len() != spec.public_key_bytes {
        return Err(CryptoError::MalformedPeerPublic {
            expected: spec.public_key_bytes,
            got: peer_public.len(),
        });
    }
    let own_public = public_from_secret("toy-kex-pk", &spec, &own.secret);
    let (lo, hi) = if own_public.as_slice() <= peer_public {
        (own_public.as_slice(), peer_public)
    } else {
        (peer_public, own_public.as_slice())
    };
    let ss = expand(
        "toy-kex-ss",
        &[&[spec.id.code()], lo, hi],
        spec.shared_secret_bytes,
    );
    Ok(SharedSecret {
        bytes: ss,
        origin: SecretOrigin::Kex,
    })
}

// ---- Signatures ----

pub fn sig_keygen(
    spec: &AlgorithmSpec,
    rng: &mut dyn RngCore,
    provenance: KeyProvenance,
) -> Result<KeyPair, CryptoError> {
    expect_role(spec, Role::Sig)?;
    Ok(keygen("toy-sig-sk", "toy-sig-pk", spec, rng, provenance))
}

pub fn sign(message: &[u8], keypair: &KeyPair) -> Result<Vec<u8>, CryptoError> {
    let spec = registry_lookup(keypair.algorithm);
    expect_role(&spec, Role::Sig)?;
    let public = public_from_secret("toy-sig-pk", &spec, &keypair.secret);
    Ok(expand(
        "toy-sig",
        &[&[spec.id.code()], &public, message],
        spec.ciphertext_or_sig_bytes,
    ))
}

pub fn verify(
    message: &[u8],
    signature: &[u8],
    public: &[u8],
    spec: &AlgorithmSpec,
) -> Result<bool, CryptoError> {
    expect_role(spec, Role::Sig)?;
    if public.len() != spec.public_key_bytes {
        return Err(CryptoError::MalformedPublicKey {
            expected: spec.public_key_bytes,
            got: public.len(),
        });
    }
    if signature.len() != spec.ciphertext_or_sig_bytes {
        return Err(CryptoError::MalformedSignature {
            expected: spec.ciphertext_or_sig_bytes,
            got: signature.len(),
        });
    }
    let expected = expand(
        "toy-sig",
        &[&[spec.id.code()], public, message],
        spec.ciphertext_or_sig_bytes,
    );
    Ok(expected == signature)
}
