//! Frame format: a 4-byte big-endian payload length followed by the
//! payload, a term in canonical text notation encoded as UTF-8. A call
//! sends one request frame holding the goal and reads one response frame
//! holding the outcome.

use std::io::{self, ErrorKind, Read, Write};

use thiserror::Error;

use crate::term::{parse_term, to_text, Value};

pub const MAX_FRAME: usize = 16 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("frame of {0} bytes exceeds the limit")]
    TooLarge(usize),
    #[error("connection closed inside a frame")]
    Truncated,
    #[error("frame payload is not UTF-8")]
    BadUtf8,
    #[error("frame payload is not a term: {0}")]
    Syntax(String),
    #[error("unexpected message: {0}")]
    Unexpected(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl WireError {
    /// True when the stream position is still at a frame boundary, so the
    /// connection can carry further frames.
    pub fn is_recoverable(&self) -> bool {
        matches!(self, WireError::BadUtf8 | WireError::Syntax(_) | WireError::Unexpected(_))
    }
}

pub fn write_frame(w: &mut dyn Write, v: &Value) -> Result<(), WireError> {
    let payload = to_text(v);
    if payload.len() > MAX_FRAME {
        return Err(WireError::TooLarge(payload.len()));
    }
    let mut buf = Vec::with_capacity(4 + payload.len());
    buf.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    buf.extend_from_slice(payload.as_bytes());
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

/// Reads one frame. `Ok(None)` on a clean end of stream before the header.
pub fn read_frame(r: &mut dyn Read) -> Result<Option<Value>, WireError> {
    let mut header = [0u8; 4];
    let mut got = 0;
    while got < 4 {
        match r.read(&mut header[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(WireError::Truncated),
            Ok(n) => got += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    let len = u32::from_be_bytes(header) as usize;
    if len > MAX_FRAME {
        return Err(WireError::TooLarge(len));
    }
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => WireError::Truncated,
        _ => WireError::Io(e),
    })?;
    let text = String::from_utf8(payload).map_err(|_| WireError::BadUtf8)?;
    parse_term(&text)
        .map(Some)
        .map_err(|e| WireError::Syntax(e.to_string()))
}
