//! HMAC-based PRF and the iterated prf+ expansion used by the key schedule.

use hmac::{Hmac, Mac};
use sha2::{Sha256, Sha384};

use super::{expect_role, AlgorithmId, AlgorithmSpec, CryptoError, Role};

fn hmac_sha256(key: &[u8], data: &[u8]) -> Vec<u8> {
    let mut mac = <Hmac<Sha256> as Mac>::new_from_slice(key).expect("HMAC accepts any key length");
    mac.update(data);
    mac.finalize().into_bytes().to_vec()
}

fn hmac_sha384(key: &[u8], data: &[u8]) -> Vec<u8> {
    let mut mac = <Hmac<Sha384> as Mac>::new_from_slice(key).expect("HMAC accepts any key length");
    mac.update(data);
    mac.finalize().into_bytes().to_vec()
}

/// prf(key, data) for the suite's negotiated PRF.
pub fn prf(key: &[u8], data: &[u8], spec: &AlgorithmSpec) -> Result<Vec<u8>, CryptoError> {
    expect_role(spec, Role::Prf)?;
    Ok(match spec.id {
        AlgorithmId::HmacSha256 => hmac_sha256(key, data),
        AlgorithmId::HmacSha384 => hmac_sha384(key, data),
        other => return Err(CryptoError::UnknownAlgorithm(other.name().to_string())),
    })
}

/// Iterated expansion:
///   T1 = prf(K, S | 0x01), Tn = prf(K, Tn-1 | S | n)
/// truncated to `out_len`. Output for a shorter length is always a prefix of
/// the output for a longer one.
pub fn prf_plus(
    key: &[u8],
    data: &[u8],
    out_len: usize,
    spec: &AlgorithmSpec,
) -> Result<Vec<u8>, CryptoError> {
    expect_role(spec, Role::Prf)?;
    let block = spec.output_len();
    let max = 255 * block;
    if out_len > max {
        return Err(CryptoError::OutputTooLong {
            requested: out_len,
            max,
        });
    }
    let mut out = Vec::with_capacity(out_len);
    let mut prev: Vec<u8> = Vec::new();
    let mut counter: u8 = 1;
    while out.len() < out_len {
        let mut input = Vec::with_capacity(prev.len() + data.len() + 1);
        input.extend_from_slice(&prev);
        input.extend_from_slice(data);
        input.push(counter);
        prev = prf(key, &input, spec)?;
        out.extend_from_slice(&prev);
        counter = counter.wrapping_add(1);
    }
    out.truncate(out_len);
    Ok(out)
}
