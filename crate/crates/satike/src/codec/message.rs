//! Message header, payload framing, and the encode/decode pair.

use super::CodecError;

/// Serialized message header length.
pub const HEADER_LEN: usize = 28;
/// Generic payload header: next-kind (1), reserved/critical (1), length (2).
pub const PAYLOAD_HEADER_LEN: usize = 4;
/// Largest payload body the 16-bit length field can carry.
pub const MAX_PAYLOAD_BODY: usize = u16::MAX as usize - PAYLOAD_HEADER_LEN;

const VERSION: u8 = 0x20;
const CRITICAL_BIT: u8 = 0x80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExchangeType {
    /// IKE_SA_INIT.
    Init,
    /// IKE_INTERMEDIATE.
    Intermediate,
    /// IKE_AUTH.
    Auth,
    /// The fixed-suite two-message exchange.
    Lw3Exch,
}

impl ExchangeType {
    pub fn code(&self) -> u8 {
        match self {
            ExchangeType::Init => 34,
            ExchangeType::Auth => 35,
            ExchangeType::Intermediate => 43,
            ExchangeType::Lw3Exch => 240,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, CodecError> {
        match code {
            34 => Ok(ExchangeType::Init),
            35 => Ok(ExchangeType::Auth),
            43 => Ok(ExchangeType::Intermediate),
            240 => Ok(ExchangeType::Lw3Exch),
            other => Err(CodecError::UnknownExchange(other)),
        }
    }
}

/// Header flag bits (same positions as the standard layout).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Flags(pub u8);

impl Flags {
    pub const INITIATOR: Flags = Flags(0x08);
    pub const RESPONSE: Flags = Flags(0x20);

    pub fn contains(&self, other: Flags) -> bool {
        self.0 & other.0 == other.0
    }
}

impl std::ops::BitOr for Flags {
    type Output = Flags;
    fn bitor(self, rhs: Flags) -> Flags {
        Flags(self.0 | rhs.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PayloadKind {
    Sa,
    Ke,
    Nonce,
    Id,
    Cert,
    CertReq,
    Auth,
    Ts,
    Encrypted,
    Fragment,
    /// KEM ciphertext of the two-message variant.
    KemCt,
    /// Encrypted nonce of the two-message variant.
    EncNonce,
}

impl PayloadKind {
    pub fn code(&self) -> u8 {
        match self {
            PayloadKind::Sa => 33,
            PayloadKind::Ke => 34,
            PayloadKind::Id => 35,
            PayloadKind::Cert => 37,
            PayloadKind::CertReq => 38,
            PayloadKind::Auth => 39,
            PayloadKind::Nonce => 40,
            PayloadKind::Ts => 44,
            PayloadKind::Encrypted => 46,
            PayloadKind::Fragment => 53,
            PayloadKind::KemCt => 201,
            PayloadKind::EncNonce => 202,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            33 => Some(PayloadKind::Sa),
            34 => Some(PayloadKind::Ke),
            35 => Some(PayloadKind::Id),
            37 => Some(PayloadKind::Cert),
            38 => Some(PayloadKind::CertReq),
            39 => Some(PayloadKind::Auth),
            40 => Some(PayloadKind::Nonce),
            44 => Some(PayloadKind::Ts),
            46 => Some(PayloadKind::Encrypted),
            53 => Some(PayloadKind::Fragment),
            201 => Some(PayloadKind::KemCt),
            202 => Some(PayloadKind::EncNonce),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Payload {
    pub kind: PayloadKind,
    pub body: Vec<u8>,
}

impl Payload {
    pub fn new(kind: PayloadKind, body: Vec<u8>) -> Self {
        Payload { kind, body }
    }

    pub fn encoded_len(&self) -> usize {
        PAYLOAD_HEADER_LEN + self.body.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageHeader {
    pub initiator_spi: [u8; 8],
    pub responder_spi: [u8; 8],
    pub exchange_type: ExchangeType,
    pub message_id: u32,
    pub flags: Flags,
}

impl MessageHeader {
    pub fn new(
        initiator_spi: [u8; 8],
        responder_spi: [u8; 8],
        exchange_type: ExchangeType,
        message_id: u32,
        flags: Flags,
    ) -> Self {
        MessageHeader {
            initiator_spi,
            responder_spi,
            exchange_type,
            message_id,
            flags,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub header: MessageHeader,
    pub payloads: Vec<Payload>,
}

impl Message {
    pub fn new(header: MessageHeader, payloads: Vec<Payload>) -> Self {
        Message { header, payloads }
    }

    pub fn payload(&self, kind: PayloadKind) -> Option<&Payload> {
        self.payloads.iter().find(|p| p.kind == kind)
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.payloads.iter().map(Payload::encoded_len).sum::<usize>()
    }

    /// Serialize to bytes, patching the total length into the header.
    pub fn encode(&self) -> Result<Vec<u8>, CodecError> {
        for p in &self.payloads {
            if p.body.len() > MAX_PAYLOAD_BODY {
                return Err(CodecError::PayloadTooLarge(p.body.len()));
            }
        }
        let total = self.encoded_len();
        let mut out = Vec::with_capacity(total);
        out.extend_from_slice(&self.header.initiator_spi);
        out.extend_from_slice(&self.header.responder_spi);
        let first_kind = self.payloads.first().map(|p| p.kind.code()).unwrap_or(0);
        out.push(first_kind);
        out.push(VERSION);
        out.push(self.header.exchange_type.code());
        out.push(self.header.flags.0);
        out.extend_from_slice(&self.header.message_id.to_be_bytes());
        out.extend_from_slice(&(total as u32).to_be_bytes());
        encode_chain(&self.payloads, &mut out)?;
        debug_assert_eq!(out.len(), total);
        Ok(out)
    }

    /// Parse from bytes. Rejects truncation and inconsistent length fields;
    /// unknown payload kinds are skipped unless their critical bit is set.
    pub fn decode(bytes: &[u8]) -> Result<Message, CodecError> {
        if bytes.len() < HEADER_LEN {
            return Err(CodecError::TruncatedMessage {
                needed: HEADER_LEN,
                have: bytes.len(),
            });
        }
        let mut initiator_spi = [0u8; 8];
        initiator_spi.copy_from_slice(&bytes[0..8]);
        let mut responder_spi = [0u8; 8];
        responder_spi.copy_from_slice(&bytes[8..16]);
        let first_kind = bytes[16];
        let exchange_type = ExchangeType::from_code(bytes[18])?;
        let flags = Flags(bytes[19]);
        let message_id = u32::from_be_bytes(bytes[20..24].try_into().unwrap());
        let length = u32::from_be_bytes(bytes[24..28].try_into().unwrap()) as usize;
        if length != bytes.len() {
            return Err(CodecError::LengthMismatch {
                field: length,
                actual: bytes.len(),
            });
        }
        let payloads = decode_chain(first_kind, &bytes[HEADER_LEN..])?;
        Ok(Message {
            header: MessageHeader {
                initiator_spi,
                responder_spi,
                exchange_type,
                message_id,
                flags,
            },
            payloads,
        })
    }
}

fn encode_chain(payloads: &[Payload], out: &mut Vec<u8>) -> Result<(), CodecError> {
    for (i, p) in payloads.iter().enumerate() {
        let next = payloads.get(i + 1).map(|n| n.kind.code()).unwrap_or(0);
        out.push(next);
        out.push(0); // reserved; critical bit clear for all known kinds
        out.extend_from_slice(&((PAYLOAD_HEADER_LEN + p.body.len()) as u16).to_be_bytes());
        out.extend_from_slice(&p.body);
    }
    Ok(())
}

fn decode_chain(first_kind: u8, mut rest: &[u8]) -> Result<Vec<Payload>, CodecError> {
    let mut payloads = Vec::new();
    let mut kind_code = first_kind;
    while kind_code != 0 {
        if rest.len() < PAYLOAD_HEADER_LEN {
            return Err(CodecError::TruncatedMessage {
                needed: PAYLOAD_HEADER_LEN,
                have: rest.len(),
            });
        }
        let next = rest[0];
        let reserved = rest[1];
        let plen = u16::from_be_bytes([rest[2], rest[3]]) as usize;
        if plen < PAYLOAD_HEADER_LEN || plen > rest.len() {
            return Err(CodecError::LengthMismatch {
                field: plen,
                actual: rest.len(),
            });
        }
        let body = &rest[PAYLOAD_HEADER_LEN..plen];
        match PayloadKind::from_code(kind_code) {
            Some(kind) => payloads.push(Payload::new(kind, body.to_vec())),
            None if reserved & CRITICAL_BIT != 0 => {
                return Err(CodecError::UnknownCriticalPayload(kind_code))
            }
            None => {} // non-critical unknown payload: skip
        }
        rest = &rest[plen..];
        kind_code = next;
    }
    if !rest.is_empty() {
        return Err(CodecError::LengthMismatch {
            field: 0,
            actual: rest.len(),
        });
    }
    Ok(payloads)
}

/// Encode a payload chain standalone (used for encrypted-payload plaintext):
/// one leading byte holding the first payload kind, then the chain.
pub(crate) fn encode_inner_chain(payloads: &[Payload]) -> Result<Vec<u8>, CodecError> {
    for p in payloads {
        if p.body.len() > MAX_PAYLOAD_BODY {
            return Err(CodecError::PayloadTooLarge(p.body.len()));
        }
    }
    let mut out = Vec::new();
    out.push(payloads.first().map(|p| p.kind.code()).unwrap_or(0));
    encode_chain(payloads, &mut out)?;
    Ok(out)
}

pub(crate) fn decode_inner_chain(bytes: &[u8]) -> Result<Vec<Payload>, CodecError> {
    if bytes.is_empty() {
        return Err(CodecError::TruncatedMessage { needed: 1, have: 0 });
    }
    decode_chain(bytes[0], &bytes[1..])
}
