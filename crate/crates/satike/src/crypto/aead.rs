//! AES-GCM authenticated encryption for the encrypted payloads.

use aes::Aes192;
use aes_gcm::aead::generic_array::GenericArray;
use aes_gcm::aead::{Aead, Payload};
use aes_gcm::{Aes128Gcm, AesGcm, KeyInit, Nonce};

use super::{expect_role, AlgorithmId, AlgorithmSpec, CryptoError, Role};

type Aes192Gcm = AesGcm<Aes192, aes_gcm::aes::cipher::consts::U12>;

pub const NONCE_LEN: usize = 12;
pub const TAG_LEN: usize = 16;

fn check_key(spec: &AlgorithmSpec, key: &[u8]) -> Result<(), CryptoError> {
    expect_role(spec, Role::Aead)?;
    if key.len() != spec.key_len() {
        return Err(CryptoError::BadAeadKey {
            expected: spec.key_len(),
            got: key.len(),
        });
    }
    Ok(())
}

/// Encrypt and authenticate. Output is ciphertext followed by the 16-byte tag.
pub fn aead_seal(
    key: &[u8],
    nonce: &[u8; NONCE_LEN],
    aad: &[u8],
    plaintext: &[u8],
    spec: &AlgorithmSpec,
) -> Result<Vec<u8>, CryptoError> {
    check_key(spec, key)?;
    let n = Nonce::from_slice(nonce);
    let payload = Payload {
        msg: plaintext,
        aad,
    };
    let out = match spec.id {
        AlgorithmId::Aes128Gcm => Aes128Gcm::new(GenericArray::from_slice(key))
            .encrypt(n, payload)
            .expect("GCM encryption is infallible for in-memory buffers"),
        AlgorithmId::Aes192Gcm => Aes192Gcm::new(GenericArray::from_slice(key))
            .encrypt(n, payload)
            .expect("GCM encryption is infallible for in-memory buffers"),
        other => return Err(CryptoError::UnknownAlgorithm(other.name().to_string())),
    };
    debug_assert_eq!(out.len(), plaintext.len() + TAG_LEN);
    Ok(out)
}

/// Decrypt and verify. Any tampering with ciphertext, tag, nonce or AAD yields
/// [`CryptoError::AuthenticationFailure`].
pub fn aead_open(
    key: &[u8],
    nonce: &[u8; NONCE_LEN],
    aad: &[u8],
    ciphertext: &[u8],
    spec: &AlgorithmSpec,
) -> Result<Vec<u8>, CryptoError> {
    check_key(spec, key)?;
    if ciphertext.len() < TAG_LEN {
        return Err(CryptoError::AuthenticationFailure);
    }
    let n = Nonce::from_slice(nonce);
    let payload = Payload {
        msg: ciphertext,
        aad,
    };
    let result = match spec.id {
        AlgorithmId::Aes128Gcm => {
            Aes128Gcm::new(GenericArray::from_slice(key)).decrypt(n, payload)
        }
        AlgorithmId::Aes192Gcm => {
            Aes192Gcm::new(GenericArray::from_slice(key)).decrypt(n, payload)
        }
        other => return Err(CryptoError::UnknownAlgorithm(other.name().to_string())),
    };
    result.map_err(|_| CryptoError::AuthenticationFailure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::registry_lookup;

    #[test]
    fn seal_open_round_trip() {
        for id in [AlgorithmId::Aes128Gcm, AlgorithmId::Aes192Gcm] {
            let spec = registry_lookup(id);
            let key = vec![0x42u8; spec.key_len()];
            let nonce = [7u8; NONCE_LEN];
            let ct = aead_seal(&key, &nonce, b"aad", b"hello satellite", &spec).unwrap();
            assert_eq!(ct.len(), 15 + TAG_LEN);
            let pt = aead_open(&key, &nonce, b"aad", &ct, &spec).unwrap();
            assert_eq!(pt, b"hello satellite");
        }
    }

    #[test]
    fn tampering_detected() {
        let spec = registry_lookup(AlgorithmId::Aes128Gcm);
        let key = [0u8; 16];
        let nonce = [0u8; NONCE_LEN];
        let ct = aead_seal(&key, &nonce, b"", b"payload", &spec).unwrap();

        // Flipped tag byte.
        let mut bad = ct.clone();
        *bad.last_mut().unwrap() ^= 1;
        assert_eq!(
            aead_open(&key, &nonce, b"", &bad, &spec),
            Err(CryptoError::AuthenticationFailure)
        );

        // Flipped ciphertext byte.
        let mut bad = ct.clone();
        bad[0] ^= 1;
        assert_eq!(
            aead_open(&key, &nonce, b"", &bad, &spec),
            Err(CryptoError::AuthenticationFailure)
        );

        // Wrong AAD.
        assert_eq!(
            aead_open(&key, &nonce, b"x", &ct, &spec),
            Err(CryptoError::AuthenticationFailure)
        );
    }

    #[test]
    fn wrong_key_length_rejected() {
        let spec = registry_lookup(AlgorithmId::Aes192Gcm);
        let err = aead_seal(&[0u8; 16], &[0u8; NONCE_LEN], b"", b"", &spec).unwrap_err();
        assert_eq!(
            err,
            CryptoError::BadAeadKey {
                expected: 24,
                got: 16
            }
        );
    }

    // NIST GCM validation vector (AES-128, 96-bit IV, empty AAD).
    #[test]
    fn aes128_gcm_nist_vector() {
        let spec = registry_lookup(AlgorithmId::Aes128Gcm);
        let key = hex::decode("7fddb57453c241d03efbed3ac44e371c").unwrap();
        let nonce_v = hex::decode("ee283a3fc75575e33efd4887").unwrap();
        let mut nonce = [0u8; NONCE_LEN];
        nonce.copy_from_slice(&nonce_v);
        let pt = hex::decode("d5de42b461646c255c87bd2962d3b9a2").unwrap();
        let out = aead_seal(&key, &nonce, b"", &pt, &spec).unwrap();
        assert_eq!(
            hex::encode(&out[..16]),
            "2ccda4a5415cb91e135c2a0f78c9b2fd"
        );
        assert_eq!(
            hex::encode(&out[16..]),
            "b36d1df9b9d5e596f83e8b7f52971cb3"
        );
    }
}
