//! Out-of-band key distribution store.
//!
//! Static public keys (signature verification keys, static KEM keys) are
//! assumed to be provisioned before launch rather than transmitted during a
//! handshake. The store is a flat directory with one raw key file per
//! (peer id, algorithm) pair.

use std::fs;
use std::path::{Path, PathBuf};

use super::creds::PeerId;
use super::HandshakeError;
use crate::crypto::{registry_lookup, AlgorithmId, CryptoError};

/// Directory-backed store of pre-shared public keys.
pub struct OobStore {
    root: PathBuf,
}

impl OobStore {
    /// Open (creating if needed) a store rooted at `root`.
    pub fn open(root: impl AsRef<Path>) -> Result<OobStore, HandshakeError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root)?;
        Ok(OobStore { root })
    }

    fn key_path(&self, peer: &PeerId, algorithm: AlgorithmId) -> PathBuf {
        self.root
            .join(format!("{}.{}.key", hex::encode(peer), algorithm.name()))
    }

    /// Store a peer's public key, overwriting any previous value.
    pub fn put(
        &self,
        peer: &PeerId,
        algorithm: AlgorithmId,
        public: &[u8],
    ) -> Result<(), HandshakeError> {
        let spec = registry_lookup(algorithm);
        if public.len() != spec.public_key_bytes {
            return Err(HandshakeError::Crypto(CryptoError::MalformedPublicKey {
                expected: spec.public_key_bytes,
                got: public.len(),
            }));
        }
        fs::write(self.key_path(peer, algorithm), public)?;
        Ok(())
    }

    /// Fetch a peer's public key; length-checked against the registry.
    pub fn get(&self, peer: &PeerId, algorithm: AlgorithmId) -> Result<Vec<u8>, HandshakeError> {
        let bytes = fs::read(self.key_path(peer, algorithm))?;
        let spec = registry_lookup(algorithm);
        if bytes.len() != spec.public_key_bytes {
            return Err(HandshakeError::Crypto(CryptoError::MalformedPublicKey {
                expected: spec.public_key_bytes,
                got: bytes.len(),
            }));
        }
        Ok(bytes)
    }

    pub fn contains(&self, peer: &PeerId, algorithm: AlgorithmId) -> bool {
        self.key_path(peer, algorithm).is_file()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_get_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = OobStore::open(dir.path()).unwrap();
        let peer: PeerId = [7; 16];
        let key = vec![0xab; 64];
        store.put(&peer, AlgorithmId::EcdsaP256, &key).unwrap();
        assert!(store.contains(&peer, AlgorithmId::EcdsaP256));
        assert_eq!(store.get(&peer, AlgorithmId::EcdsaP256).unwrap(), key);
        assert!(!store.contains(&peer, AlgorithmId::MlDsa44));
    }

    #[test]
    fn wrong_length_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = OobStore::open(dir.path()).unwrap();
        let peer: PeerId = [1; 16];
        assert!(matches!(
            store.put(&peer, AlgorithmId::EcdsaP256, &[0; 63]),
            Err(HandshakeError::Crypto(CryptoError::MalformedPublicKey { .. }))
        ));
    }

    #[test]
    fn missing_key_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let store = OobStore::open(dir.path()).unwrap();
        assert!(matches!(
            store.get(&[9; 16], AlgorithmId::MlDsa44),
            Err(HandshakeError::Io(_))
        ));
    }
}
