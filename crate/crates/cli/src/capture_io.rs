//! Session generation and the two on-disk formats: a diff-friendly hex
//! trace (one challenge/response per line) and a binary handshake capture
//! framed like the legacy wire protocol.

use std::fmt;
use std::fs;
use std::path::Path;

use descramble_core::{
    hash_password, random_challenge_text, scramble, verify, ChallengeResponsePair, Response,
    ScrambleParams, CHALLENGE_LENGTH,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Version string stamped into emitted greeting packets. The parser does
/// not interpret it beyond the terminating NUL.
pub const SERVER_VERSION: &str = "3.23.58";

/// One observed login: the server's challenge text and the client's
/// scrambled answer, both fixed at eight bytes by the protocol.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TraceRecord {
    pub challenge: [u8; CHALLENGE_LENGTH],
    pub response: [u8; CHALLENGE_LENGTH],
}

impl TraceRecord {
    pub fn to_pair(self) -> ChallengeResponsePair {
        ChallengeResponsePair::from_text(&self.challenge, Response(self.response.to_vec()))
    }

    /// Does the record match a password under the server's own check?
    pub fn verifies(&self, password: &[u8], params: &ScrambleParams) -> bool {
        verify(
            hash_password(password),
            &self.challenge,
            &self.response,
            params,
        )
        .unwrap_or(false)
    }
}

fn response_byte_ok(b: u8) -> bool {
    (64..96).contains(&b)
}

/// Simulates logins for one password: a fresh challenge per session and the
/// honestly scrambled answer. Deterministic in the seed.
pub fn generate_trace(
    password: &[u8],
    rng_seed: u64,
    count: usize,
    params: &ScrambleParams,
) -> Vec<TraceRecord> {
    assert_eq!(
        params.rounds, CHALLENGE_LENGTH,
        "trace records are fixed at eight response bytes"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let hash = hash_password(password);
    (0..count)
        .map(|_| {
            let challenge = random_challenge_text(&mut rng);
            let response = scramble(hash, hash_password(&challenge), params);
            let mut bytes = [0u8; CHALLENGE_LENGTH];
            bytes.copy_from_slice(response.as_bytes());
            TraceRecord {
                challenge,
                response: bytes,
            }
        })
        .collect()
}

/// First record of the seeded stream; `generate_trace` continues it.
pub fn generate_session(password: &[u8], rng_seed: u64, params: &ScrambleParams) -> TraceRecord {
    generate_trace(password, rng_seed, 1, params)[0]
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceError {
    /// 1-based line in the trace file.
    pub line: usize,
    pub kind: TraceErrorKind,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TraceErrorKind {
    MissingField,
    BadHex,
    BadFieldLength { field: &'static str, bytes: usize },
    ResponseByteRange { byte: u8 },
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trace line {}: ", self.line)?;
        match &self.kind {
            TraceErrorKind::MissingField => {
                write!(f, "expected two hex fields separated by one space")
            }
            TraceErrorKind::BadHex => write!(f, "field is not even-length lowercase hex"),
            TraceErrorKind::BadFieldLength { field, bytes } => {
                write!(f, "{field} is {bytes} bytes, want {CHALLENGE_LENGTH}")
            }
            TraceErrorKind::ResponseByteRange { byte } => {
                write!(f, "response byte {byte:#04x} outside [64,96)")
            }
        }
    }
}

impl std::error::Error for TraceError {}

pub fn write_trace_string(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 34);
    for r in records {
        out.push_str(&hex::encode(r.challenge));
        out.push(' ');
        out.push_str(&hex::encode(r.response));
        out.push('\n');
    }
    out
}

/// Parses the line-oriented trace format. Blank lines and lines starting
/// with '#' carry no record.
pub fn read_trace_str(text: &str) -> Result<Vec<TraceRecord>, TraceError> {
    let mut records = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim_end_matches('\r');
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (challenge_hex, response_hex) = trimmed
            .split_once(' ')
            .ok_or(TraceError {
                line,
                kind: TraceErrorKind::MissingField,
            })?;
        let challenge = decode_field(challenge_hex, "challenge", line)?;
        let response = decode_field(response_hex, "response", line)?;
        if let Some(&byte) = response.iter().find(|b| !response_byte_ok(**b)) {
            return Err(TraceError {
                line,
                kind: TraceErrorKind::ResponseByteRange { byte },
            });
        }
        records.push(TraceRecord {
            challenge,
            response,
        });
    }
    Ok(records)
}

fn decode_field(
    field: &str,
    name: &'static str,
    line: usize,
) -> Result<[u8; CHALLENGE_LENGTH], TraceError> {
    let bytes = hex::decode(field).map_err(|_| TraceError {
        line,
        kind: TraceErrorKind::BadHex,
    })?;
    bytes.as_slice().try_into().map_err(|_| TraceError {
        line,
        kind: TraceErrorKind::BadFieldLength {
            field: name,
            bytes: bytes.len(),
        },
    })
}

pub fn read_trace(path: &Path) -> anyhow::Result<Vec<TraceRecord>> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
    Ok(read_trace_str(&text)?)
}

pub fn write_trace(path: &Path, records: &[TraceRecord]) -> anyhow::Result<()> {
    crate::write_atomic(path, write_trace_string(records).as_bytes())
        .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CaptureError {
    /// Byte offset into the capture stream.
    pub offset: usize,
    pub kind: CaptureErrorKind,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CaptureErrorKind {
    Truncated { wanted: usize, left: usize },
    MissingNul { field: &'static str },
    UnsupportedProtocol { got: u8 },
    ResponseByteRange { byte: u8 },
}

impl fmt::Display for CaptureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "capture offset {}: ", self.offset)?;
        match &self.kind {
            CaptureErrorKind::Truncated { wanted, left } => {
                write!(f, "need {wanted} more bytes, found {left}")
            }
            CaptureErrorKind::MissingNul { field } => {
                write!(f, "{field} is missing its NUL terminator")
            }
            CaptureErrorKind::UnsupportedProtocol { got } => {
                write!(f, "protocol version {got}, expected 10")
            }
            CaptureErrorKind::ResponseByteRange { byte } => {
                write!(f, "response byte {byte:#04x} outside [64,96)")
            }
        }
    }
}

impl std::error::Error for CaptureError {}

fn push_packet(out: &mut Vec<u8>, sequence: u8, payload: &[u8]) {
    assert!(payload.len() < 1 << 24, "payload exceeds u24 framing");
    let len = (payload.len() as u32).to_le_bytes();
    out.extend_from_slice(&len[..3]);
    out.push(sequence);
    out.extend_from_slice(payload);
}

/// Frames each session as a greeting packet followed by an auth packet.
/// Usernames must be NUL-free; the framing cannot carry one otherwise.
pub fn emit_capture(sessions: &[(String, TraceRecord)]) -> Vec<u8> {
    let mut out = Vec::new();
    for (index, (username, record)) in sessions.iter().enumerate() {
        assert!(
            !username.as_bytes().contains(&0),
            "NUL in username breaks the framing"
        );
        let mut greeting = Vec::with_capacity(32);
        greeting.push(10u8);
        greeting.extend_from_slice(SERVER_VERSION.as_bytes());
        greeting.push(0);
        greeting.extend_from_slice(&(index as u32 + 1).to_le_bytes());
        greeting.extend_from_slice(&record.challenge);
        greeting.push(0);
        push_packet(&mut out, 0, &greeting);

        let mut auth = Vec::with_capacity(24 + username.len());
        auth.extend_from_slice(&1u16.to_le_bytes());
        auth.extend_from_slice(&(1u32 << 20).to_le_bytes()[..3]);
        auth.extend_from_slice(username.as_bytes());
        auth.push(0);
        auth.extend_from_slice(&record.response);
        auth.push(0);
        push_packet(&mut out, 1, &auth);
    }
    out
}

/// Cursor over one packet's payload that reports errors at stream offsets.
struct PayloadReader<'a> {
    payload: &'a [u8],
    /// Offset of `payload[pos]` within the whole capture.
    base: usize,
    pos: usize,
}

impl<'a> PayloadReader<'a> {
    fn offset(&self) -> usize {
        self.base + self.pos
    }

    fn take(&mut self, wanted: usize) -> Result<&'a [u8], CaptureError> {
        let left = self.payload.len() - self.pos;
        if left < wanted {
            return Err(CaptureError {
                offset: self.offset(),
                kind: CaptureErrorKind::Truncated { wanted, left },
            });
        }
        let slice = &self.payload[self.pos..self.pos + wanted];
        self.pos += wanted;
        Ok(slice)
    }

    fn take_until_nul(&mut self, field: &'static str) -> Result<&'a [u8], CaptureError> {
        let rest = &self.payload[self.pos..];
        match rest.iter().position(|&b| b == 0) {
            Some(nul) => {
                let slice = &rest[..nul];
                self.pos += nul + 1;
                Ok(slice)
            }
            None => Err(CaptureError {
                offset: self.offset(),
                kind: CaptureErrorKind::MissingNul { field },
            }),
        }
    }

    fn expect_nul(&mut self, field: &'static str) -> Result<(), CaptureError> {
        let offset = self.offset();
        match self.take(1) {
            Ok([0]) => Ok(()),
            _ => Err(CaptureError {
                offset,
                kind: CaptureErrorKind::MissingNul { field },
            }),
        }
    }
}

fn next_packet<'a>(
    bytes: &'a [u8],
    offset: &mut usize,
) -> Result<PayloadReader<'a>, CaptureError> {
    let header_left = bytes.len() - *offset;
    if header_left < 4 {
        return Err(CaptureError {
            offset: *offset,
            kind: CaptureErrorKind::Truncated {
                wanted: 4,
                left: header_left,
            },
        });
    }
    let len =
        u32::from_le_bytes([bytes[*offset], bytes[*offset + 1], bytes[*offset + 2], 0]) as usize;
    let base = *offset + 4;
    let left = bytes.len() - base;
    if left < len {
        return Err(CaptureError {
            offset: base,
            kind: CaptureErrorKind::Truncated { wanted: len, left },
        });
    }
    *offset = base + len;
    Ok(PayloadReader {
        payload: &bytes[base..base + len],
        base,
        pos: 0,
    })
}

/// Inverse of `emit_capture` over the fields the attack consumes; trailing
/// payload bytes in either packet are ignored.
pub fn parse_capture(bytes: &[u8]) -> Result<Vec<(String, TraceRecord)>, CaptureError> {
    let mut sessions = Vec::new();
    let mut offset = 0usize;
    while offset < bytes.len() {
        let mut greeting = next_packet(bytes, &mut offset)?;
        let proto_offset = greeting.offset();
        let proto = greeting.take(1)?[0];
        if proto != 10 {
            return Err(CaptureError {
                offset: proto_offset,
                kind: CaptureErrorKind::UnsupportedProtocol { got: proto },
            });
        }
        greeting.take_until_nul("server version")?;
        greeting.take(4)?;
        let mut challenge = [0u8; CHALLENGE_LENGTH];
        challenge.copy_from_slice(greeting.take(CHALLENGE_LENGTH)?);
        greeting.expect_nul("challenge")?;

        let mut auth = next_packet(bytes, &mut offset)?;
        auth.take(2)?;
        auth.take(3)?;
        let username = String::from_utf8_lossy(auth.take_until_nul("username")?).into_owned();
        let response_offset = auth.offset();
        let mut response = [0u8; CHALLENGE_LENGTH];
        response.copy_from_slice(auth.take(CHALLENGE_LENGTH)?);
        if let Some(bad) = response.iter().position(|&b| !response_byte_ok(b)) {
            return Err(CaptureError {
                offset: response_offset + bad,
                kind: CaptureErrorKind::ResponseByteRange {
                    byte: response[bad],
                },
            });
        }
        auth.expect_nul("response")?;

        sessions.push((
            username,
            TraceRecord {
                challenge,
                response,
            },
        ));
    }
    Ok(sessions)
}

pub fn read_capture(path: &Path) -> anyhow::Result<Vec<(String, TraceRecord)>> {
    let bytes =
        fs::read(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
    Ok(parse_capture(&bytes)?)
}

pub fn write_capture(path: &Path, sessions: &[(String, TraceRecord)]) -> anyhow::Result<()> {
    crate::write_atomic(path, &emit_capture(sessions))
        .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))
}
