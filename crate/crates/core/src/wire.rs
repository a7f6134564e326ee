//! Update-message codecs for plain BGP, conventional BGPsec and APVAS.
//!
//! All integers are big-endian. A message is laid out as
//!
//! ```text
//! suite tag        1   0x00 plain, 0x01 conventional, 0xA1 APVAS
//! path length      2   2 + 6 * segments (counts itself)
//! segments         6n  pcount(1) flags(1) AS number(4), most recent AS first
//! signature block      absent for plain
//!   conventional       suite id(1), n x { SKI(20) sig length(2) signature }
//!   APVAS              suite id(1), sig length(2) = 64, sigma(64), n x SKI(20)
//! NLRI             1+k prefix length, then ceil(length / 8) prefix bytes
//! ```
//!
//! Signature and SKI segments follow the Secure_Path order.

use std::fmt;
use std::net::Ipv4Addr;

use thiserror::Error;

pub const SEGMENT_LEN: usize = 6;
pub const SKI_LEN: usize = 20;
/// Per-hop signature length of the conventional suite.
pub const BASELINE_SIG_LEN: usize = 96;
pub const APVAS_SIGMA_LEN: usize = 64;
/// Bytes per hop in a conventional signature block.
pub const CONVENTIONAL_SEGMENT_LEN: usize = SKI_LEN + 2 + BASELINE_SIG_LEN;
/// Fixed part of an APVAS signature block: suite id, length, sigma.
pub const APVAS_BLOCK_FIXED: usize = 1 + 2 + APVAS_SIGMA_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Plain,
    Conventional,
    Apvas,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Plain, Suite::Conventional, Suite::Apvas];

    pub fn tag(self) -> u8 {
        match self {
            Suite::Plain => 0x00,
            Suite::Conventional => 0x01,
            Suite::Apvas => 0xA1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Suite> {
        match tag {
            0x00 => Some(Suite::Plain),
            0x01 => Some(Suite::Conventional),
            0xA1 => Some(Suite::Apvas),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Plain => "plain",
            Suite::Conventional => "conventional",
            Suite::Apvas => "apvas",
        }
    }

    /// Wire size of the signature block for a path of `path_len` segments.
    pub fn sig_block_len(self, path_len: usize) -> usize {
        match self {
            Suite::Plain => 0,
            Suite::Conventional => 1 + CONVENTIONAL_SEGMENT_LEN * path_len,
            Suite::Apvas => APVAS_BLOCK_FIXED + SKI_LEN * path_len,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" | "bgp" => Ok(Suite::Plain),
            "conventional" | "bgpsec" => Ok(Suite::Conventional),
            "apvas" => Ok(Suite::Apvas),
            other => Err(format!("unknown suite {other:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("cannot encode {field}: {reason}")]
    Encode { field: &'static str, reason: String },
    #[error("decode error at byte {offset}: {kind}")]
    Decode { offset: usize, kind: DecodeErrorKind },
    #[error("signer position {position} out of range for a path of {path_len}")]
    Position { position: usize, path_len: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeErrorKind {
    #[error("truncated {0}")]
    Truncated(&'static str),
    #[error("unknown suite id {0:#04x}")]
    UnknownSuite(u8),
    #[error("signature block suite id {found:#04x} does not match message suite {expected:#04x}")]
    SuiteMismatch { expected: u8, found: u8 },
    #[error("secure path length {0} is not 2 + 6n")]
    PathLength(u16),
    #[error("empty secure path")]
    EmptyPath,
    #[error("pcount must be at least 1")]
    ZeroPcount,
    #[error("APVAS signature length {0} (expected 64)")]
    SigmaLength(u16),
    #[error("prefix length {0} exceeds 32")]
    PrefixLength(u8),
    #[error("prefix has bits set beyond its length")]
    HostBits,
    #[error("{0} trailing bytes")]
    TrailingBytes(usize),
}

/// Subject Key Identifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ski(pub [u8; SKI_LEN]);

impl fmt::Debug for Ski {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ski({})", hex::encode(&self.0))
    }
}

impl fmt::Display for Ski {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(&self.0))
    }
}

/// IPv4 prefix with host bits cleared.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nlri {
    prefix: Ipv4Addr,
    len: u8,
}

impl Nlri {
    pub fn new(prefix: Ipv4Addr, len: u8) -> Result<Self, WireError> {
        if len > 32 {
            return Err(WireError::Encode { field: "nlri.prefix_len", reason: format!("{len} > 32") });
        }
        let bits = u32::from(prefix);
        if bits & !mask(len) != 0 {
            return Err(WireError::Encode { field: "nlri.prefix", reason: "bits set beyond prefix length".into() });
        }
        Ok(Nlri { prefix, len })
    }

    pub fn prefix(&self) -> Ipv4Addr {
        self.prefix
    }

    pub fn prefix_len(&self) -> u8 {
        self.len
    }

    pub fn encoded_len(&self) -> usize {
        1 + (self.len as usize).div_ceil(8)
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        out.push(self.len);
        out.extend_from_slice(&self.prefix.octets()[..(self.len as usize).div_ceil(8)]);
    }
}

impl fmt::Debug for Nlri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.prefix, self.len)
    }
}

impl fmt::Display for Nlri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.prefix, self.len)
    }
}

fn mask(len: u8) -> u32 {
    if len == 0 {
        0
    } else {
        u32::MAX << (32 - len as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SecurePathSegment {
    pub pcount: u8,
    pub flags: u8,
    pub as_number: u32,
}

impl SecurePathSegment {
    pub fn new(as_number: u32) -> Self {
        SecurePathSegment { pcount: 1, flags: 0, as_number }
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        out.push(self.pcount);
        out.push(self.flags);
        out.extend_from_slice(&self.as_number.to_be_bytes());
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureSegment {
    pub ski: Ski,
    pub signature: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConventionalBlock {
    pub segments: Vec<SignatureSegment>,
}

impl ConventionalBlock {
    pub fn encoded_len(&self) -> usize {
        1 + self.segments.iter().map(|s| SKI_LEN + 2 + s.signature.len()).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApvasBlock {
    pub sigma: [u8; APVAS_SIGMA_LEN],
    pub skis: Vec<Ski>,
}

impl ApvasBlock {
    pub fn encoded_len(&self) -> usize {
        APVAS_BLOCK_FIXED + SKI_LEN * self.skis.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignatureBlock {
    Conventional(ConventionalBlock),
    Apvas(ApvasBlock),
}

impl SignatureBlock {
    pub fn suite(&self) -> Suite {
        match self {
            SignatureBlock::Conventional(_) => Suite::Conventional,
            SignatureBlock::Apvas(_) => Suite::Apvas,
        }
    }

    pub fn encoded_len(&self) -> usize {
        match self {
            SignatureBlock::Conventional(b) => b.encoded_len(),
            SignatureBlock::Apvas(b) => b.encoded_len(),
        }
    }

    fn segment_count(&self) -> usize {
        match self {
            SignatureBlock::Conventional(b) => b.segments.len(),
            SignatureBlock::Apvas(b) => b.skis.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateMessage {
    pub nlri: Nlri,
    /// Most recent AS first; the origin is last.
    pub secure_path: Vec<SecurePathSegment>,
    pub sig_block: Option<SignatureBlock>,
}

impl UpdateMessage {
    pub fn suite(&self) -> Suite {
        self.sig_block.as_ref().map_or(Suite::Plain, SignatureBlock::suite)
    }

    pub fn path_len(&self) -> usize {
        self.secure_path.len()
    }

    pub fn origin_as(&self) -> Option<u32> {
        self.secure_path.last().map(|s| s.as_number)
    }

    /// AS numbers from the origin to the most recent hop.
    pub fn path_from_origin(&self) -> impl Iterator<Item = u32> + '_ {
        self.secure_path.iter().rev().map(|s| s.as_number)
    }

    pub fn sig_block_len(&self) -> usize {
        self.sig_block.as_ref().map_or(0, SignatureBlock::encoded_len)
    }

    fn check(&self) -> Result<(), WireError> {
        let enc = |field, reason: &str| Err(WireError::Encode { field, reason: reason.to_string() });
        if self.secure_path.iter().any(|s| s.pcount == 0) {
            return enc("secure_path.pcount", "must be at least 1");
        }
        if 2 + SEGMENT_LEN * self.secure_path.len() > u16::MAX as usize {
            return enc("secure_path", "too many segments");
        }
        if let Some(block) = &self.sig_block {
            if self.secure_path.is_empty() {
                return enc("secure_path", "origin segment required when signed");
            }
            if block.segment_count() != self.secure_path.len() {
                return enc("sig_block", "segment count differs from secure path");
            }
            if let SignatureBlock::Conventional(b) = block {
                if b.segments.iter().any(|s| s.signature.len() > u16::MAX as usize) {
                    return enc("sig_block.signature", "longer than 65535 bytes");
                }
            }
        }
        Ok(())
    }
}

/// Canonical encoding of an update message.
pub fn encode_update(msg: &UpdateMessage) -> Result<Vec<u8>, WireError> {
    msg.check()?;
    let mut out = Vec::with_capacity(3 + SEGMENT_LEN * msg.path_len() + msg.sig_block_len() + 5);
    out.push(msg.suite().tag());
    out.extend_from_slice(&((2 + SEGMENT_LEN * msg.secure_path.len()) as u16).to_be_bytes());
    for seg in &msg.secure_path {
        seg.encode_into(&mut out);
    }
    match &msg.sig_block {
        None => {}
        Some(SignatureBlock::Conventional(b)) => {
            out.push(Suite::Conventional.tag());
            for s in &b.segments {
                out.extend_from_slice(&s.ski.0);
                out.extend_from_slice(&(s.signature.len() as u16).to_be_bytes());
                out.extend_from_slice(&s.signature);
            }
        }
        Some(SignatureBlock::Apvas(b)) => {
            out.push(Suite::Apvas.tag());
            out.extend_from_slice(&(APVAS_SIGMA_LEN as u16).to_be_bytes());
            out.extend_from_slice(&b.sigma);
            for ski in &b.skis {
                out.extend_from_slice(&ski.0);
            }
        }
    }
    msg.nlri.encode_into(&mut out);
    Ok(out)
}

/// One decoded field and where it sits in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldView {
    pub offset: usize,
    pub len: usize,
    pub name: String,
    pub value: String,
}

struct Reader<'a, 't> {
    bytes: &'a [u8],
    pos: usize,
    trace: Option<&'t mut Vec<FieldView>>,
}

impl<'a> Reader<'a, '_> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], WireError> {
        if self.bytes.len() - self.pos < n {
            return Err(self.err(DecodeErrorKind::Truncated(what)));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8, WireError> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, WireError> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, WireError> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn err(&self, kind: DecodeErrorKind) -> WireError {
        WireError::Decode { offset: self.pos, kind }
    }

    fn err_at(&self, offset: usize, kind: DecodeErrorKind) -> WireError {
        WireError::Decode { offset, kind }
    }

    fn note(&mut self, start: usize, name: impl Into<String>, value: impl Into<String>) {
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(FieldView { offset: start, len: self.pos - start, name: name.into(), value: value.into() });
        }
    }
}

/// Exact inverse of [`encode_update`].
pub fn decode_update(bytes: &[u8]) -> Result<UpdateMessage, WireError> {
    decode_with(Reader { bytes, pos: 0, trace: None })
}

/// Decode and list every field with its byte offset.
pub fn describe_update(bytes: &[u8]) -> Result<(UpdateMessage, Vec<FieldView>), WireError> {
    let mut trace = Vec::new();
    let msg = decode_with(Reader { bytes, pos: 0, trace: Some(&mut trace) })?;
    Ok((msg, trace))
}

fn decode_with(mut r: Reader<'_, '_>) -> Result<UpdateMessage, WireError> {
    let tag = r.u8("suite tag")?;
    let suite = Suite::from_tag(tag).ok_or_else(|| r.err_at(0, DecodeErrorKind::UnknownSuite(tag)))?;
    r.note(0, "suite", format!("{suite} ({tag:#04x})"));

    let start = r.pos;
    let path_bytes = r.u16("secure path length")?;
    if path_bytes < 2 || (path_bytes - 2) as usize % SEGMENT_LEN != 0 {
        return Err(r.err_at(start, DecodeErrorKind::PathLength(path_bytes)));
    }
    r.note(start, "secure_path.length", path_bytes.to_string());
    let n = (path_bytes as usize - 2) / SEGMENT_LEN;
    if n == 0 && suite != Suite::Plain {
        return Err(r.err_at(start, DecodeErrorKind::EmptyPath));
    }

    let mut secure_path = Vec::with_capacity(n);
    for i in 0..n {
        let start = r.pos;
        let pcount = r.u8("pcount")?;
        if pcount == 0 {
            return Err(r.err_at(start, DecodeErrorKind::ZeroPcount));
        }
        let flags = r.u8("flags")?;
        let as_number = r.u32("AS number")?;
        r.note(start, format!("secure_path[{i}]"), format!("AS{as_number} pcount={pcount} flags={flags:#04x}"));
        secure_path.push(SecurePathSegment { pcount, flags, as_number });
    }

    let sig_block = match suite {
        Suite::Plain => None,
        Suite::Conventional | Suite::Apvas => {
            let start = r.pos;
            let id = r.u8("algorithm suite id")?;
            if id != tag {
                return Err(r.err_at(start, DecodeErrorKind::SuiteMismatch { expected: tag, found: id }));
            }
            r.note(start, "sig_block.suite_id", format!("{id:#04x}"));
            Some(if suite == Suite::Conventional {
                let mut segments = Vec::with_capacity(n);
                for i in 0..n {
                    let start = r.pos;
                    let ski = read_ski(&mut r)?;
                    let sig_len = r.u16("signature length")? as usize;
                    let signature = r.take(sig_len, "signature")?.to_vec();
                    r.note(start, format!("sig_block.segment[{i}]"), format!("ski={ski} sig_len={sig_len} sig={}", hex::encode(&signature)));
                    segments.push(SignatureSegment { ski, signature });
                }
                SignatureBlock::Conventional(ConventionalBlock { segments })
            } else {
                let start = r.pos;
                let sig_len = r.u16("signature length")?;
                if sig_len as usize != APVAS_SIGMA_LEN {
                    return Err(r.err_at(start, DecodeErrorKind::SigmaLength(sig_len)));
                }
                r.note(start, "sig_block.sig_len", sig_len.to_string());
                let start = r.pos;
                let mut sigma = [0u8; APVAS_SIGMA_LEN];
                sigma.copy_from_slice(r.take(APVAS_SIGMA_LEN, "sigma")?);
                r.note(start, "sig_block.sigma", hex::encode(&sigma));
                let mut skis = Vec::with_capacity(n);
                for i in 0..n {
                    let start = r.pos;
                    let ski = read_ski(&mut r)?;
                    r.note(start, format!("sig_block.ski[{i}]"), ski.to_string());
                    skis.push(ski);
                }
                SignatureBlock::Apvas(ApvasBlock { sigma, skis })
            })
        }
    };

    let start = r.pos;
    let prefix_len = r.u8("prefix length")?;
    if prefix_len > 32 {
        return Err(r.err_at(start, DecodeErrorKind::PrefixLength(prefix_len)));
    }
    let prefix_bytes = r.take((prefix_len as usize).div_ceil(8), "prefix")?;
    let mut octets = [0u8; 4];
    octets[..prefix_bytes.len()].copy_from_slice(prefix_bytes);
    let nlri = Nlri::new(Ipv4Addr::from(octets), prefix_len)
        .map_err(|_| r.err_at(start + 1, DecodeErrorKind::HostBits))?;
    r.note(start, "nlri", nlri.to_string());

    if r.pos != r.bytes.len() {
        return Err(r.err(DecodeErrorKind::TrailingBytes(r.bytes.len() - r.pos)));
    }
    Ok(UpdateMessage { nlri, secure_path, sig_block })
}

fn read_ski(r: &mut Reader<'_, '_>) -> Result<Ski, WireError> {
    let mut ski = [0u8; SKI_LEN];
    ski.copy_from_slice(r.take(SKI_LEN, "SKI")?);
    Ok(Ski(ski))
}

/// The octets a signer at `signer_position` (1 = origin) signs toward `target_as`.
///
/// `target_as || segments origin..=signer (origin first) || suite id || NLRI`.
/// No signature bytes are included, so the result is the same for any
/// signature content.
pub fn build_signed_octets(target_as: u32, msg: &UpdateMessage, signer_position: usize) -> Result<Vec<u8>, WireError> {
    signed_octets(target_as, &msg.secure_path, msg.suite(), &msg.nlri, signer_position)
}

/// [`build_signed_octets`] over the message's parts.
pub fn signed_octets(
    target_as: u32,
    secure_path: &[SecurePathSegment],
    suite: Suite,
    nlri: &Nlri,
    signer_position: usize,
) -> Result<Vec<u8>, WireError> {
    if signer_position == 0 || signer_position > secure_path.len() {
        return Err(WireError::Position { position: signer_position, path_len: secure_path.len() });
    }
    let mut out = Vec::with_capacity(4 + SEGMENT_LEN * signer_position + 1 + nlri.encoded_len());
    out.extend_from_slice(&target_as.to_be_bytes());
    for seg in secure_path.iter().rev().take(signer_position) {
        seg.encode_into(&mut out);
    }
    out.push(suite.tag());
    nlri.encode_into(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nlri24() -> Nlri {
        Nlri::new(Ipv4Addr::new(192, 0, 2, 0), 24).unwrap()
    }

    fn path(ases: &[u32]) -> Vec<SecurePathSegment> {
        ases.iter().copied().map(SecurePathSegment::new).collect()
    }

    fn apvas(len: usize) -> UpdateMessage {
        let ases: Vec<u32> = (0..len as u32).map(|i| 65001 + i).rev().collect();
        UpdateMessage {
            nlri: nlri24(),
            secure_path: path(&ases),
            sig_block: Some(SignatureBlock::Apvas(ApvasBlock {
                sigma: [7u8; 64],
                skis: (0..len).map(|i| Ski([i as u8; 20])).collect(),
            })),
        }
    }

    fn conventional(len: usize) -> UpdateMessage {
        let ases: Vec<u32> = (0..len as u32).map(|i| 65001 + i).rev().collect();
        UpdateMessage {
            nlri: nlri24(),
            secure_path: path(&ases),
            sig_block: Some(SignatureBlock::Conventional(ConventionalBlock {
                segments: (0..len)
                    .map(|i| SignatureSegment { ski: Ski([i as u8; 20]), signature: vec![i as u8; 96] })
                    .collect(),
            })),
        }
    }

    #[test]
    fn plain_message_layout() {
        let msg = UpdateMessage { nlri: nlri24(), secure_path: path(&[65001]), sig_block: None };
        let bytes = encode_update(&msg).unwrap();
        assert_eq!(bytes.len(), 3 + 6 + 4);
        assert_eq!(hex::encode(&bytes), "00000801000000fde918c00002");
        assert_eq!(decode_update(&bytes).unwrap(), msg);
    }

    #[test]
    fn signature_block_sizes() {
        assert_eq!(apvas(4).sig_block_len(), 147);
        assert_eq!(conventional(4).sig_block_len(), 473);
        for len in 1..=20 {
            assert_eq!(apvas(len).sig_block_len(), 67 + 20 * len);
            assert_eq!(Suite::Apvas.sig_block_len(len), 67 + 20 * len);
            assert_eq!(conventional(len).sig_block_len(), 1 + 118 * len);
            assert_eq!(Suite::Conventional.sig_block_len(len), 1 + 118 * len);
            let bytes = encode_update(&apvas(len)).unwrap();
            assert_eq!(bytes.len(), 3 + 6 * len + 67 + 20 * len + 4);
        }
    }

    #[test]
    fn truncation_and_trailing_bytes_are_errors() {
        let bytes = encode_update(&apvas(2)).unwrap();
        let err = decode_update(&bytes[..bytes.len() - 1]).unwrap_err();
        assert_eq!(err, WireError::Decode { offset: bytes.len() - 3, kind: DecodeErrorKind::Truncated("prefix") });
        let mut longer = bytes.clone();
        longer.push(0);
        assert_eq!(
            decode_update(&longer).unwrap_err(),
            WireError::Decode { offset: bytes.len(), kind: DecodeErrorKind::TrailingBytes(1) }
        );
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let mut bytes = encode_update(&apvas(1)).unwrap();
        bytes[0] = 0xFF;
        assert_eq!(
            decode_update(&bytes).unwrap_err(),
            WireError::Decode { offset: 0, kind: DecodeErrorKind::UnknownSuite(0xFF) }
        );
    }

    #[test]
    fn suite_mismatch_inside_block_is_rejected() {
        let mut bytes = encode_update(&apvas(1)).unwrap();
        bytes[9] = 0x01;
        assert!(matches!(
            decode_update(&bytes),
            Err(WireError::Decode { offset: 9, kind: DecodeErrorKind::SuiteMismatch { .. } })
        ));
    }

    #[test]
    fn encode_names_the_offending_field() {
        let mut msg = apvas(2);
        msg.secure_path[0].pcount = 0;
        assert!(matches!(encode_update(&msg), Err(WireError::Encode { field: "secure_path.pcount", .. })));
        let mut msg = apvas(2);
        msg.secure_path.pop();
        assert!(matches!(encode_update(&msg), Err(WireError::Encode { field: "sig_block", .. })));
        let mut msg = apvas(1);
        msg.secure_path.clear();
        assert!(matches!(encode_update(&msg), Err(WireError::Encode { field: "secure_path", .. })));
        assert!(Nlri::new(Ipv4Addr::new(192, 0, 2, 1), 24).is_err());
        assert!(Nlri::new(Ipv4Addr::new(192, 0, 2, 0), 33).is_err());
    }

    #[test]
    fn host_bits_are_rejected_on_decode() {
        let msg = UpdateMessage { nlri: Nlri::new(Ipv4Addr::new(10, 0, 0, 0), 7).unwrap(), secure_path: path(&[1]), sig_block: None };
        let mut bytes = encode_update(&msg).unwrap();
        *bytes.last_mut().unwrap() |= 1;
        assert!(matches!(decode_update(&bytes), Err(WireError::Decode { kind: DecodeErrorKind::HostBits, .. })));
    }

    #[test]
    fn origin_signed_octets() {
        let msg = apvas(1);
        let octets = build_signed_octets(65002, &msg, 1).unwrap();
        assert_eq!(octets.len(), 15);
        assert_eq!(hex::encode(&octets), "0000fdea01000000fde9a118c00002");
    }

    #[test]
    fn signed_octets_ignore_signatures_but_not_target() {
        let a = apvas(3);
        let mut b = a.clone();
        if let Some(SignatureBlock::Apvas(block)) = &mut b.sig_block {
            block.sigma[0] ^= 1;
        }
        for pos in 1..=3 {
            assert_eq!(build_signed_octets(9, &a, pos).unwrap(), build_signed_octets(9, &b, pos).unwrap());
        }
        assert_ne!(build_signed_octets(9, &a, 2).unwrap(), build_signed_octets(10, &a, 2).unwrap());
        assert!(build_signed_octets(9, &a, 0).is_err());
        assert!(build_signed_octets(9, &a, 4).is_err());
    }

    #[test]
    fn signed_octets_list_origin_first() {
        let msg = apvas(3);
        let octets = build_signed_octets(1, &msg, 2).unwrap();
        assert_eq!(&octets[6..10], &65001u32.to_be_bytes());
        assert_eq!(&octets[12..16], &65002u32.to_be_bytes());
    }

    #[test]
    fn describe_reports_offsets() {
        let bytes = encode_update(&apvas(2)).unwrap();
        let (_, fields) = describe_update(&bytes).unwrap();
        let sigma = fields.iter().find(|f| f.name == "sig_block.sigma").unwrap();
        assert_eq!((sigma.offset, sigma.len), (3 + 12 + 3, 64));
        let covered: usize = fields.iter().map(|f| f.len).sum();
        assert_eq!(covered, bytes.len());
    }
}
