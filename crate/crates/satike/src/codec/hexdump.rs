//! Hex-dump fixture format for codec regression tests and transcript export.
//!
//! First line is free-form metadata (variant, level, exchange, direction);
//! the remaining lines are hex bytes, 32 bytes per line.

use super::message::Message;
use super::CodecError;

const BYTES_PER_LINE: usize = 32;

/// Render a message as a fixture: metadata line followed by hex lines.
pub fn to_hexdump(message: &Message, metadata: &str) -> Result<String, CodecError> {
    let bytes = message.encode()?;
    let mut out = String::with_capacity(metadata.len() + bytes.len() * 2 + 16);
    out.push_str(metadata);
    out.push('\n');
    for chunk in bytes.chunks(BYTES_PER_LINE) {
        out.push_str(&hex::encode(chunk));
        out.push('\n');
    }
    Ok(out)
}

/// Parse a fixture back into its metadata line and decoded message.
pub fn from_hexdump(fixture: &str) -> Result<(String, Message), CodecError> {
    let mut lines = fixture.lines();
    let metadata = lines
        .next()
        .ok_or_else(|| CodecError::BadFixture("empty fixture".into()))?
        .to_string();
    let mut bytes = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let decoded = hex::decode(line)
            .map_err(|e| CodecError::BadFixture(format!("bad hex line: {e}")))?;
        bytes.extend_from_slice(&decoded);
    }
    let message = Message::decode(&bytes)?;
    Ok((metadata, message))
}
