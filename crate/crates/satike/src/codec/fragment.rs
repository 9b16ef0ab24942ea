//! Message-level fragmentation for the post-INIT exchanges.
//!
//! A fragment is a regular message carrying a single FRAGMENT payload whose
//! body is `fragment_number (u16) || total_fragments (u16) || chunk`, where
//! the chunks partition the encoded original message. INIT messages must not
//! be fragmented: the extension is not active yet at that point.

use super::message::{Message, Payload, PayloadKind, HEADER_LEN, PAYLOAD_HEADER_LEN};
use super::{check_mtu_safe, CodecError, OverheadModel};

const FRAG_META_LEN: usize = 4;

/// Split a message into MTU-safe fragments. A message that already fits is
/// returned unchanged as a single-element list.
pub fn fragment(message: &Message, model: &OverheadModel) -> Result<Vec<Message>, CodecError> {
    if check_mtu_safe(message, model) {
        return Ok(vec![message.clone()]);
    }
    if message.header.exchange_type == super::ExchangeType::Init {
        return Err(CodecError::FragmentedInit);
    }
    let overhead = model.datagram_header_bytes() + HEADER_LEN + PAYLOAD_HEADER_LEN + FRAG_META_LEN;
    if model.mtu <= overhead {
        return Err(CodecError::Unfragmentable {
            size: message.encoded_len(),
            mtu: model.mtu,
        });
    }
    let capacity = model.mtu - overhead;
    let encoded = message.encode()?;
    let total = encoded.len().div_ceil(capacity);
    if total > u16::MAX as usize {
        return Err(CodecError::Unfragmentable {
            size: encoded.len(),
            mtu: model.mtu,
        });
    }
    let fragments = encoded
        .chunks(capacity)
        .enumerate()
        .map(|(i, chunk)| {
            let mut body = Vec::with_capacity(FRAG_META_LEN + chunk.len());
            body.extend_from_slice(&((i + 1) as u16).to_be_bytes());
            body.extend_from_slice(&(total as u16).to_be_bytes());
            body.extend_from_slice(chunk);
            Message::new(
                message.header.clone(),
                vec![Payload::new(PayloadKind::Fragment, body)],
            )
        })
        .collect();
    Ok(fragments)
}

/// Inverse of [`fragment`]. Accepts fragments in any order; rejects missing
/// and duplicate fragment numbers.
pub fn reassemble(fragments: &[Message]) -> Result<Message, CodecError> {
    if fragments.is_empty() {
        return Err(CodecError::MissingFragment(1));
    }
    if fragments.len() == 1 && fragments[0].payload(PayloadKind::Fragment).is_none() {
        return Ok(fragments[0].clone());
    }
    let mut total: Option<u16> = None;
    let mut chunks: Vec<Option<Vec<u8>>> = Vec::new();
    for frag in fragments {
        let payload = frag
            .payload(PayloadKind::Fragment)
            .ok_or(CodecError::InconsistentFragments)?;
        if payload.body.len() < FRAG_META_LEN {
            return Err(CodecError::InconsistentFragments);
        }
        let num = u16::from_be_bytes([payload.body[0], payload.body[1]]);
        let tot = u16::from_be_bytes([payload.body[2], payload.body[3]]);
        if num == 0 || tot == 0 || num > tot {
            return Err(CodecError::InconsistentFragments);
        }
        match total {
            None => {
                total = Some(tot);
                chunks.resize(tot as usize, None);
            }
            Some(t) if t != tot => return Err(CodecError::InconsistentFragments),
            Some(_) => {}
        }
        let slot = &mut chunks[num as usize - 1];
        if slot.is_some() {
            return Err(CodecError::DuplicateFragment(num));
        }
        *slot = Some(payload.body[FRAG_META_LEN..].to_vec());
    }
    let mut encoded = Vec::new();
    for (i, chunk) in chunks.into_iter().enumerate() {
        match chunk {
            Some(c) => encoded.extend_from_slice(&c),
            None => return Err(CodecError::MissingFragment(i as u16 + 1)),
        }
    }
    Message::decode(&encoded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::message::{ExchangeType, Flags, MessageHeader};

    fn auth_message(body_len: usize) -> Message {
        Message::new(
            MessageHeader::new([1; 8], [2; 8], ExchangeType::Auth, 2, Flags::INITIATOR),
            vec![Payload::new(PayloadKind::Encrypted, vec![0x5a; body_len])],
        )
    }

    #[test]
    fn large_auth_message_fragments_and_reassembles() {
        let model = OverheadModel::new(false).with_mtu(1500);
        // 28 + 4 + 4968 = 5000 encoded bytes.
        let m = auth_message(4968);
        let frags = fragment(&m, &model).unwrap();
        // capacity = 1500 - 28 - 28 - 4 - 4 = 1436; ceil(5000/1436) = 4.
        assert_eq!(frags.len(), 4);
        for f in &frags {
            assert!(check_mtu_safe(f, &model));
        }
        assert_eq!(reassemble(&frags).unwrap(), m);
    }

    #[test]
    fn small_message_passes_through() {
        let model = OverheadModel::new(false);
        let m = auth_message(100);
        let frags = fragment(&m, &model).unwrap();
        assert_eq!(frags, vec![m.clone()]);
        assert_eq!(reassemble(&frags).unwrap(), m);
    }

    #[test]
    fn out_of_order_reassembly() {
        let model = OverheadModel::new(true).with_mtu(600);
        let m = auth_message(2000);
        let mut frags = fragment(&m, &model).unwrap();
        frags.reverse();
        assert_eq!(reassemble(&frags).unwrap(), m);
    }

    #[test]
    fn missing_fragment_detected() {
        let model = OverheadModel::new(false).with_mtu(1500);
        let mut frags = fragment(&auth_message(4968), &model).unwrap();
        frags.remove(2);
        assert_eq!(reassemble(&frags), Err(CodecError::MissingFragment(3)));
    }

    #[test]
    fn duplicate_fragment_detected() {
        let model = OverheadModel::new(false).with_mtu(1500);
        let mut frags = fragment(&auth_message(4968), &model).unwrap();
        frags.push(frags[1].clone());
        assert_eq!(reassemble(&frags), Err(CodecError::DuplicateFragment(2)));
    }

    #[test]
    fn init_messages_refuse_to_fragment() {
        let model = OverheadModel::new(false).with_mtu(576);
        let m = Message::new(
            MessageHeader::new([1; 8], [0; 8], ExchangeType::Init, 0, Flags::INITIATOR),
            vec![Payload::new(PayloadKind::Ke, vec![0; 1184])],
        );
        assert_eq!(fragment(&m, &model), Err(CodecError::FragmentedInit));
    }
}
