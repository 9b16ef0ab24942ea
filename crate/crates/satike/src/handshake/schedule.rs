//! Key-schedule derivation.
//!
//! The root secret is derived with the nonces as PRF key and the (combined)
//! shared secret as data; session keys then come from one prf+ expansion over
//! nonces and SPIs, split in the fixed order sk_d, sk_ai, sk_ar, sk_ei,
//! sk_er, sk_pi, sk_pr. Variants with an extra key exchange rekey the root
//! as prf(sk_d_prev, ss_new || Ni || Nr) and re-expand.

use crate::crypto::{prf, prf_plus, AlgorithmSpec, CryptoError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySchedule {
    pub skeyseed: Vec<u8>,
    pub sk_d: Vec<u8>,
    pub sk_ai: Vec<u8>,
    pub sk_ar: Vec<u8>,
    pub sk_ei: Vec<u8>,
    pub sk_er: Vec<u8>,
    pub sk_pi: Vec<u8>,
    pub sk_pr: Vec<u8>,
}

/// Root secret for the single-exchange derivation:
/// `prf(Ni || Nr, secret)`.
pub fn skeyseed_initial(
    prf_spec: &AlgorithmSpec,
    nonce_i: &[u8],
    nonce_r: &[u8],
    secret: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    let mut key = Vec::with_capacity(nonce_i.len() + nonce_r.len());
    key.extend_from_slice(nonce_i);
    key.extend_from_slice(nonce_r);
    prf(&key, secret, prf_spec)
}

/// Rekeyed root after an additional key exchange:
/// `prf(sk_d_prev, ss_new || Ni || Nr)`.
pub fn skeyseed_rekey(
    prf_spec: &AlgorithmSpec,
    sk_d_prev: &[u8],
    ss_new: &[u8],
    nonce_i: &[u8],
    nonce_r: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    let mut data = Vec::with_capacity(ss_new.len() + nonce_i.len() + nonce_r.len());
    data.extend_from_slice(ss_new);
    data.extend_from_slice(nonce_i);
    data.extend_from_slice(nonce_r);
    prf(sk_d_prev, &data, prf_spec)
}

impl KeySchedule {
    /// Expand all session keys from a root secret.
    pub fn derive(
        prf_spec: &AlgorithmSpec,
        aead_spec: &AlgorithmSpec,
        skeyseed: Vec<u8>,
        nonce_i: &[u8],
        nonce_r: &[u8],
        spi_i: &[u8; 8],
        spi_r: &[u8; 8],
    ) -> Result<KeySchedule, CryptoError> {
        let p = prf_spec.output_len();
        let e = aead_spec.key_len();
        let total = 5 * p + 2 * e;
        let mut info = Vec::with_capacity(nonce_i.len() + nonce_r.len() + 16);
        info.extend_from_slice(nonce_i);
        info.extend_from_slice(nonce_r);
        info.extend_from_slice(spi_i);
        info.extend_from_slice(spi_r);
        let keymat = prf_plus(&skeyseed, &info, total, prf_spec)?;
        let mut take = {
            let mut offset = 0usize;
            move |len: usize| {
                let out = keymat[offset..offset + len].to_vec();
                offset += len;
                out
            }
        };
        Ok(KeySchedule {
            skeyseed,
            sk_d: take(p),
            sk_ai: take(p),
            sk_ar: take(p),
            sk_ei: take(e),
            sk_er: take(e),
            sk_pi: take(p),
            sk_pr: take(p),
        })
    }

    /// Fold a post-quantum pre-shared key into sk_d and the sk_p keys,
    /// leaving the encryption keys untouched.
    pub fn fold_ppk(&mut self, ppk: &[u8], prf_spec: &AlgorithmSpec) -> Result<(), CryptoError> {
        self.sk_d = prf_plus(ppk, &self.sk_d, self.sk_d.len(), prf_spec)?;
        self.sk_pi = prf_plus(ppk, &self.sk_pi, self.sk_pi.len(), prf_spec)?;
        self.sk_pr = prf_plus(ppk, &self.sk_pr, self.sk_pr.len(), prf_spec)?;
        Ok(())
    }
}
