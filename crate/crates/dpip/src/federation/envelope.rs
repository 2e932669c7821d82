//! The serialized unit a requester submits for verification: the signature
//! together with the per-bundle authority key and its certificate under the
//! requester domain's pinned long-term key.

use crate::abs::encoding::{self, CodecError, Reader, Writer};
use crate::abs::{AbsSignature, AuthorityCertificate, AuthorityPublicKey};

#[derive(Debug, Clone)]
pub struct SignedSubmission {
    /// Requester domain claiming the signature.
    pub domain_id: String,
    /// Authority key the credential tokens verify under.
    pub authority_apk: AuthorityPublicKey,
    /// Endorsement of `authority_apk` by the domain's long-term key.
    pub certificate: AuthorityCertificate,
    pub signature: AbsSignature,
}

pub fn encode_submission(submission: &SignedSubmission) -> Vec<u8> {
    let mut w = Writer::new(encoding::TAG_SUBMISSION);
    w.put_str(&submission.domain_id);
    w.put_bytes(&encoding::encode_apk(&submission.authority_apk));
    w.put_bytes(&submission.certificate.to_bytes());
    w.put_bytes(&encoding::encode_signature(&submission.signature));
    w.finish()
}

pub fn decode_submission(input: &[u8]) -> Result<SignedSubmission, CodecError> {
    let mut r = Reader::new(input, encoding::TAG_SUBMISSION)?;
    let domain_id = r.take_str()?.to_string();
    let authority_apk = encoding::decode_apk(r.take_bytes()?)?;
    let certificate = AuthorityCertificate::from_bytes(r.take_bytes()?)?;
    let signature = encoding::decode_signature(r.take_bytes()?)?;
    r.finish()?;
    Ok(SignedSubmission { domain_id, authority_apk, certificate, signature })
}
