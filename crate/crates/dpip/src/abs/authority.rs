//! A domain's long-term attribute authority.
//!
//! The long-term keypair is what a domain publishes at its federation
//! endpoint and what peers pin at registration. Per-request (or
//! per-predicate) authority keypairs are generated by [`issue_bundle`] and
//! carry a certificate under the long-term key, so verifiers can trust keys
//! they have never seen while the pinned key remains the only root of trust.
//!
//! [`issue_bundle`]: DomainAuthority::issue_bundle

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::fsutil;
use crate::model::{Attribute, ClaimPredicate};

use super::cache::{KeyBundle, KeygenTimings};
use super::encoding;
use super::keys::{a_setup, attr_gen, AttributeAuthorityKeys, AuthorityPublicKey, TrusteePublicKey};
use super::primitive::Signature;
use super::AbsError;

/// Signature by a long-term authority key over a subordinate authority
/// public key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorityCertificate(Signature);

impl AuthorityCertificate {
    pub fn to_bytes(&self) -> [u8; 64] {
        self.0.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, encoding::CodecError> {
        Signature::from_bytes(bytes).map(Self)
    }
}

fn certificate_input(tpk: &TrusteePublicKey, subject: &AuthorityPublicKey) -> Vec<u8> {
    let apk_bytes = encoding::encode_apk(subject);
    let mut input = Vec::with_capacity(4 + 32 + apk_bytes.len());
    input.extend_from_slice(b"AUTH");
    input.extend_from_slice(tpk.salt());
    input.extend_from_slice(&apk_bytes);
    input
}

/// True iff `certificate` is `issuer`'s endorsement of `subject`.
pub fn verify_authority_certificate(
    tpk: &TrusteePublicKey,
    issuer: &AuthorityPublicKey,
    subject: &AuthorityPublicKey,
    certificate: &AuthorityCertificate,
) -> bool {
    issuer.verify(&certificate_input(tpk, subject), &certificate.0)
}

/// The long-term attribute authority of one domain.
#[derive(Debug, Clone)]
pub struct DomainAuthority {
    tpk: TrusteePublicKey,
    keys: AttributeAuthorityKeys,
}

impl DomainAuthority {
    /// Fresh long-term keys for a domain.
    pub fn create(tpk: TrusteePublicKey, domain_id: &str) -> Result<Self, AbsError> {
        let keys = a_setup(&tpk, domain_id)?;
        Ok(Self { tpk, keys })
    }

    pub fn from_keys(tpk: TrusteePublicKey, keys: AttributeAuthorityKeys) -> Self {
        Self { tpk, keys }
    }

    /// Load the persisted authority for this domain, creating and saving one
    /// on first use.
    pub fn load_or_create(
        tpk: TrusteePublicKey,
        domain_id: &str,
        path: &Path,
    ) -> Result<Self, AbsError> {
        if let Some(keys) = fsutil::read_json_if_exists::<AttributeAuthorityKeys>(path)? {
            if !keys.is_consistent() {
                return Err(AbsError::Storage(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("corrupt authority key file {}", path.display()),
                )));
            }
            return Ok(Self::from_keys(tpk, keys));
        }
        let authority = Self::create(tpk, domain_id)?;
        fsutil::atomic_write_json(path, &authority.keys)?;
        Ok(authority)
    }

    pub fn tpk(&self) -> &TrusteePublicKey {
        &self.tpk
    }

    pub fn domain_id(&self) -> &str {
        self.keys.domain_id()
    }

    /// The published, pinnable public key.
    pub fn public_key(&self) -> &AuthorityPublicKey {
        self.keys.public_key()
    }

    pub fn certify(&self, subject: &AuthorityPublicKey) -> AuthorityCertificate {
        AuthorityCertificate(self.keys.sign(&certificate_input(&self.tpk, subject)))
    }

    /// Generate a complete key bundle for a claim predicate: a fresh
    /// subordinate authority keypair (certified by the long-term key) and a
    /// signing key over `attrs` issued under it. Returns wall-clock timings
    /// for the two key-generation phases.
    pub fn issue_bundle(
        &self,
        attrs: &[Attribute],
        claim: &ClaimPredicate,
    ) -> Result<(KeyBundle, KeygenTimings), AbsError> {
        ensure_claim_covered(attrs, claim)?;

        let started = Instant::now();
        let authority = a_setup(&self.tpk, self.domain_id())?;
        let certificate = self.certify(authority.public_key());
        let asetup_s = started.elapsed().as_secs_f64();

        let started = Instant::now();
        let ska = attr_gen(&authority, &self.tpk, attrs)?;
        let attrgen_s = started.elapsed().as_secs_f64();

        Ok((
            KeyBundle { authority, certificate, ska, cached_signature: None },
            KeygenTimings { asetup_s: Some(asetup_s), attrgen_s: Some(attrgen_s) },
        ))
    }
}

/// Every claim leaf must be present in `attrs` with an equal value.
pub(super) fn ensure_claim_covered(attrs: &[Attribute], claim: &ClaimPredicate) -> Result<(), AbsError> {
    let mut missing = Vec::new();
    let mut mismatched = Vec::new();
    for leaf in claim.leaves() {
        let identity_match = attrs
            .iter()
            .any(|a| a.category() == leaf.category && a.name() == leaf.name);
        let full_match = attrs.iter().any(|a| {
            a.category() == leaf.category && a.name() == leaf.name && a.value() == leaf.value
        });
        if full_match {
            continue;
        }
        if identity_match {
            mismatched.push(leaf.identity());
        } else {
            missing.push(leaf.identity());
        }
    }
    if missing.is_empty() && mismatched.is_empty() {
        Ok(())
    } else {
        Err(AbsError::PredicateUnsatisfied { missing, mismatched })
    }
}
