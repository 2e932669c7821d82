//! The attribute-based signature scheme.
//!
//! Five operations make up the contract: [`ts_setup`] (federation trustee
//! parameters), [`a_setup`] (attribute authority keypair), [`attr_gen`]
//! (per-user signing key over an attribute set), [`sign`], and [`verify`].
//! A signature proves that one key holder covers every leaf of a claim
//! predicate and endorses a message, without revealing any attribute beyond
//! the predicate or any user identity.
//!
//! The construction is a reference one built from a generic unforgeable
//! digital-signature primitive (Ed25519): credential tokens bind each
//! attribute to a per-key user public key under the authority's key, and a
//! binding signature ties the token set to the canonical claim predicate and
//! message. [`DomainAuthority`] adds the one-hop certificate chain that lets
//! federation peers verify per-request authority keys against a single
//! pinned long-term key, and [`KeyCache`] implements the two access methods
//! (fresh keys per request vs. bundles stored per canonical predicate).

mod authority;
mod cache;
pub mod encoding;
mod keys;
mod primitive;
mod signature;

pub use authority::{verify_authority_certificate, AuthorityCertificate, DomainAuthority};
pub use cache::{CacheMode, CachedSignature, KeyBundle, KeyCache, KeygenTimings};
pub use encoding::CodecError;
pub use keys::{
    a_setup, attr_gen, ts_setup, AttributeAuthorityKeys, AuthorityPublicKey, SigningKey,
    TrusteePublicKey, HASH_ID,
};
pub use primitive::{PublicKey, Signature};
pub use signature::{sign, verify, verify_encoded, AbsSignature};

use thiserror::Error;

use crate::model::{ModelError, RequiredLeaf};

#[derive(Debug, Error)]
pub enum AbsError {
    #[error("attribute set is empty")]
    EmptyAttributeSet,

    #[error("duplicate attribute {0}")]
    DuplicateAttribute(RequiredLeaf),

    /// The signing key (or attribute set) does not cover the claim
    /// predicate. Signing refuses outright in this case.
    #[error("claim predicate not satisfied: {} missing, {} mismatched", missing.len(), mismatched.len())]
    PredicateUnsatisfied {
        missing: Vec<RequiredLeaf>,
        mismatched: Vec<RequiredLeaf>,
    },

    #[error("no cached bundle for this predicate")]
    NoCachedBundle,

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Codec(#[from] CodecError),

    #[error("key store I/O failed: {0}")]
    Storage(#[from] std::io::Error),
}
