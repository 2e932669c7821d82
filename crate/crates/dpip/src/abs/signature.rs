//! Signing and verification over claim predicates.

use serde::{Deserialize, Serialize};

use crate::model::{AccessMessage, CanonicalBytes, ClaimPredicate};

use super::encoding;
use super::keys::{token_input, AuthorityPublicKey, SigningKey, TrusteePublicKey};
use super::primitive::{PublicKey, Signature};
use super::AbsError;

/// A signature attesting that one signing-key holder covers every leaf of a
/// claim predicate and endorses a message.
///
/// It carries the per-key user public key, one credential token per claim
/// leaf in leaf order, and a binding signature over the canonical predicate
/// and message. It contains no attribute beyond the predicate leaves and no
/// long-term user identifier; the user public key is a per-signing-key
/// pseudonym (see `docs/security-notes.md` for the linkability caveat).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsSignature {
    upk: PublicKey,
    leaf_tokens: Vec<Signature>,
    binding: Signature,
}

impl AbsSignature {
    /// Assemble a signature from its parts, e.g. when decoded by an external
    /// verifier. Verification decides validity; construction never does.
    pub fn from_parts(upk: PublicKey, leaf_tokens: Vec<Signature>, binding: Signature) -> Self {
        Self { upk, leaf_tokens, binding }
    }

    pub fn upk(&self) -> &PublicKey {
        &self.upk
    }

    pub fn leaf_tokens(&self) -> &[Signature] {
        &self.leaf_tokens
    }

    pub fn binding(&self) -> &Signature {
        &self.binding
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        encoding::encode_signature(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, encoding::CodecError> {
        encoding::decode_signature(bytes)
    }
}

/// Byte string the binding signature covers.
fn binding_input(tpk: &TrusteePublicKey, claim: &ClaimPredicate, message: &AccessMessage) -> Vec<u8> {
    let claim_bytes = claim.canonical_bytes();
    let message_bytes = message.canonical_bytes();
    let mut input = Vec::with_capacity(4 + 32 + claim_bytes.len() + message_bytes.len());
    input.extend_from_slice(b"BIND");
    input.extend_from_slice(tpk.salt());
    input.extend_from_slice(&claim_bytes);
    input.extend_from_slice(&message_bytes);
    input
}

/// Sign `message` under `claim` with a signing key that covers it.
///
/// Refuses with a predicate-unsatisfied error rather than producing an
/// invalid signature when any claim leaf is absent from, or valued
/// differently in, the signing key's attribute set. The authority public key
/// is part of the published signing interface; the reference construction
/// consults it only at verification time.
pub fn sign(
    tpk: &TrusteePublicKey,
    _apk: &AuthorityPublicKey,
    ska: &SigningKey,
    message: &AccessMessage,
    claim: &ClaimPredicate,
) -> Result<AbsSignature, AbsError> {
    ska.covers(claim)?;
    let leaf_tokens = claim
        .leaves()
        .iter()
        .map(|leaf| ska.token_for(leaf).expect("covers() checked every leaf").clone())
        .collect();
    let binding = ska.sign_with_user_key(&binding_input(tpk, claim, message));
    Ok(AbsSignature { upk: ska.upk().clone(), leaf_tokens, binding })
}

/// Verify a signature against a claim predicate and message.
///
/// Total: malformed or mismatched input yields `false`, never an error. The
/// parameter list carries no user identifier and no attributes beyond the
/// claim predicate the verifier constructed itself.
pub fn verify(
    tpk: &TrusteePublicKey,
    apk: &AuthorityPublicKey,
    message: &AccessMessage,
    claim: &ClaimPredicate,
    sig: &AbsSignature,
) -> bool {
    if sig.leaf_tokens.len() != claim.len() {
        return false;
    }
    for (leaf, token) in claim.leaves().iter().zip(&sig.leaf_tokens) {
        if !apk.verify(&token_input(tpk, leaf, &sig.upk), token) {
            return false;
        }
    }
    sig.upk.verify(&binding_input(tpk, claim, message), &sig.binding)
}

/// Verify a signature straight from its wire bytes; garbage decodes to `false`.
pub fn verify_encoded(
    tpk: &TrusteePublicKey,
    apk: &AuthorityPublicKey,
    message: &AccessMessage,
    claim: &ClaimPredicate,
    sig_bytes: &[u8],
) -> bool {
    match AbsSignature::from_bytes(sig_bytes) {
        Ok(sig) => verify(tpk, apk, message, claim, &sig),
        Err(_) => false,
    }
}
