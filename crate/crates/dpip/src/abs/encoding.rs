//! Fixed-order, length-prefixed binary encodings for keys and signatures.
//!
//! Every encoding starts with a one-byte type tag; variable-length fields
//! carry a big-endian `u32` length prefix; fixed-size fields are written
//! raw. Decoding is strict: unknown tags, truncated fields, or trailing
//! bytes are errors. The exact layouts are documented in
//! `docs/wire-format.md` and frozen by the tests below.

use thiserror::Error;

use super::keys::{AuthorityPublicKey, TrusteePublicKey};
use super::signature::AbsSignature;
use super::primitive::{self, PublicKey, Signature};

pub const TAG_TPK: u8 = 0x01;
pub const TAG_APK: u8 = 0x02;
pub const TAG_SIGNATURE: u8 = 0x03;
pub const TAG_SUBMISSION: u8 = 0x04;

/// Upper bound on leaf-token counts accepted from the wire.
pub const MAX_TOKENS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("unexpected end of input")]
    Truncated,
    #[error("wrong type tag: expected {expected:#04x}, got {got:#04x}")]
    WrongTag { expected: u8, got: u8 },
    #[error("trailing bytes after value")]
    TrailingBytes,
    #[error("{what} has wrong length: expected {expected}, got {got}")]
    BadLength { what: &'static str, expected: usize, got: usize },
    #[error("field exceeds size bound")]
    FieldTooLarge,
    #[error("not valid UTF-8")]
    BadUtf8,
    #[error("not a valid public key")]
    InvalidKey,
    #[error("unsupported signature scheme {0:?}")]
    UnsupportedScheme(String),
}

pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(tag: u8) -> Self {
        Self { buf: vec![tag] }
    }

    pub fn put_bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn put_str(&mut self, s: &str) -> &mut Self {
        self.put_bytes(s.as_bytes())
    }

    pub fn put_raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn put_u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    rest: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(input: &'a [u8], tag: u8) -> Result<Self, CodecError> {
        let (&got, rest) = input.split_first().ok_or(CodecError::Truncated)?;
        if got != tag {
            return Err(CodecError::WrongTag { expected: tag, got });
        }
        Ok(Self { rest })
    }

    pub fn take_raw(&mut self, len: usize) -> Result<&'a [u8], CodecError> {
        if self.rest.len() < len {
            return Err(CodecError::Truncated);
        }
        let (head, rest) = self.rest.split_at(len);
        self.rest = rest;
        Ok(head)
    }

    pub fn take_u32(&mut self) -> Result<u32, CodecError> {
        let raw = self.take_raw(4)?;
        Ok(u32::from_be_bytes(raw.try_into().expect("4 bytes")))
    }

    pub fn take_bytes(&mut self) -> Result<&'a [u8], CodecError> {
        let len = self.take_u32()? as usize;
        if len > 1 << 20 {
            return Err(CodecError::FieldTooLarge);
        }
        self.take_raw(len)
    }

    pub fn take_str(&mut self) -> Result<&'a str, CodecError> {
        std::str::from_utf8(self.take_bytes()?).map_err(|_| CodecError::BadUtf8)
    }

    pub fn finish(self) -> Result<(), CodecError> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(CodecError::TrailingBytes)
        }
    }
}

pub fn encode_tpk(tpk: &TrusteePublicKey) -> Vec<u8> {
    let mut w = Writer::new(TAG_TPK);
    w.put_str(tpk.federation_id());
    w.put_raw(tpk.salt());
    w.put_str(tpk.hash_id());
    w.finish()
}

pub fn decode_tpk(input: &[u8]) -> Result<TrusteePublicKey, CodecError> {
    let mut r = Reader::new(input, TAG_TPK)?;
    let federation_id = r.take_str()?.to_string();
    let salt: [u8; 32] = r
        .take_raw(32)?
        .try_into()
        .expect("fixed salt width");
    let hash_id = r.take_str()?.to_string();
    r.finish()?;
    TrusteePublicKey::from_parts(federation_id, salt, hash_id).map_err(|_| CodecError::BadUtf8)
}

pub fn encode_apk(apk: &AuthorityPublicKey) -> Vec<u8> {
    let mut w = Writer::new(TAG_APK);
    w.put_str(primitive::SCHEME_ID);
    w.put_bytes(&apk.as_primitive().to_bytes());
    w.finish()
}

pub fn decode_apk(input: &[u8]) -> Result<AuthorityPublicKey, CodecError> {
    let mut r = Reader::new(input, TAG_APK)?;
    let scheme = r.take_str()?;
    if scheme != primitive::SCHEME_ID {
        return Err(CodecError::UnsupportedScheme(scheme.to_string()));
    }
    let key = PublicKey::from_bytes(r.take_bytes()?)?;
    r.finish()?;
    Ok(AuthorityPublicKey::new(key))
}

pub fn encode_signature(sig: &AbsSignature) -> Vec<u8> {
    let mut w = Writer::new(TAG_SIGNATURE);
    w.put_bytes(&sig.upk().to_bytes());
    w.put_u32(sig.leaf_tokens().len() as u32);
    for token in sig.leaf_tokens() {
        w.put_bytes(&token.to_bytes());
    }
    w.put_bytes(&sig.binding().to_bytes());
    w.finish()
}

pub fn decode_signature(input: &[u8]) -> Result<AbsSignature, CodecError> {
    let mut r = Reader::new(input, TAG_SIGNATURE)?;
    let upk = PublicKey::from_bytes(r.take_bytes()?)?;
    let count = r.take_u32()? as usize;
    if count > MAX_TOKENS {
        return Err(CodecError::FieldTooLarge);
    }
    let mut tokens = Vec::with_capacity(count);
    for _ in 0..count {
        tokens.push(Signature::from_bytes(r.take_bytes()?)?);
    }
    let binding = Signature::from_bytes(r.take_bytes()?)?;
    r.finish()?;
    Ok(AbsSignature::from_parts(upk, tokens, binding))
}
