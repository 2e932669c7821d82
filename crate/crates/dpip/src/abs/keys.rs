//! Key material for the scheme: trustee parameters, attribute-authority
//! keypairs, and per-user signing keys over attribute sets.

use std::collections::BTreeMap;
use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::model::{canonical_claim_leaf, Attribute, ClaimLeaf, ClaimPredicate, RequiredLeaf};

use super::primitive::{self, PublicKey, SecretKey, Signature};
use super::AbsError;

/// Identifier of the collision-resistant hash the federation uses for
/// predicate digests (cache keys).
pub const HASH_ID: &str = "sha-256";

/// Federation-wide trustee parameters. Generated once per federation and
/// identical across all of its domains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrusteePublicKey {
    federation_id: String,
    #[serde(with = "salt_b64")]
    salt: [u8; 32],
    hash_id: String,
}

/// Run by the signature trustee: fresh random salt under a federation id.
pub fn ts_setup(federation_id: &str) -> Result<TrusteePublicKey, AbsError> {
    crate::model::validate_identifier("federation_id", federation_id)?;
    let mut salt = [0u8; 32];
    rand::rngs::OsRng.fill_bytes(&mut salt);
    Ok(TrusteePublicKey {
        federation_id: federation_id.to_string(),
        salt,
        hash_id: HASH_ID.to_string(),
    })
}

impl TrusteePublicKey {
    pub(crate) fn from_parts(
        federation_id: String,
        salt: [u8; 32],
        hash_id: String,
    ) -> Result<Self, AbsError> {
        crate::model::validate_identifier("federation_id", &federation_id)?;
        Ok(Self { federation_id, salt, hash_id })
    }

    pub fn federation_id(&self) -> &str {
        &self.federation_id
    }

    pub fn salt(&self) -> &[u8; 32] {
        &self.salt
    }

    pub fn hash_id(&self) -> &str {
        &self.hash_id
    }
}

mod salt_b64 {
    use base64::Engine as _;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(salt: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&base64::engine::general_purpose::STANDARD.encode(salt))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(text)
            .map_err(D::Error::custom)?;
        bytes.try_into().map_err(|_| D::Error::custom("salt must be 32 bytes"))
    }
}

/// Public half of an attribute authority keypair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorityPublicKey(PublicKey);

impl AuthorityPublicKey {
    pub(crate) fn new(key: PublicKey) -> Self {
        Self(key)
    }

    pub(crate) fn as_primitive(&self) -> &PublicKey {
        &self.0
    }

    pub fn verify(&self, message: &[u8], signature: &Signature) -> bool {
        self.0.verify(message, signature)
    }
}

/// An attribute authority keypair. The secret half signs credential tokens
/// and never leaves the issuing domain's process boundary except through the
/// domain's own key cache.
#[derive(Clone, Serialize, Deserialize)]
pub struct AttributeAuthorityKeys {
    domain_id: String,
    apk: AuthorityPublicKey,
    ask: SecretKey,
}

impl fmt::Debug for AttributeAuthorityKeys {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AttributeAuthorityKeys")
            .field("domain_id", &self.domain_id)
            .field("apk", &self.apk)
            .finish_non_exhaustive()
    }
}

/// Run by a domain's attribute authority: a fresh keypair of the underlying
/// primitive. The trustee parameters carry no entropy into authority setup in
/// this construction; the parameter keeps the five-operation interface
/// stable.
pub fn a_setup(_tpk: &TrusteePublicKey, domain_id: &str) -> Result<AttributeAuthorityKeys, AbsError> {
    crate::model::validate_identifier("domain_id", domain_id)?;
    let (ask, apk) = primitive::generate_keypair();
    Ok(AttributeAuthorityKeys {
        domain_id: domain_id.to_string(),
        apk: AuthorityPublicKey(apk),
        ask,
    })
}

impl AttributeAuthorityKeys {
    pub fn domain_id(&self) -> &str {
        &self.domain_id
    }

    pub fn public_key(&self) -> &AuthorityPublicKey {
        &self.apk
    }

    /// Integrity check for keys loaded from disk: the secret half must
    /// actually produce the advertised public key.
    pub fn is_consistent(&self) -> bool {
        self.ask.public_key() == *self.apk.as_primitive()
    }

    pub(crate) fn sign(&self, message: &[u8]) -> Signature {
        self.ask.sign(message)
    }
}

/// A per-user signing key (SKA): a fresh user keypair plus one credential
/// token per attribute, each binding the attribute to the user public key.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "RawSigningKey", try_from = "RawSigningKey")]
pub struct SigningKey {
    upk: PublicKey,
    usk: SecretKey,
    tokens: BTreeMap<ClaimLeaf, Signature>,
    attrs: Vec<Attribute>,
}

/// Persisted form: the token map flattened to `{leaf, token}` entries.
#[derive(Serialize, Deserialize)]
struct RawSigningKey {
    upk: PublicKey,
    usk: SecretKey,
    tokens: Vec<RawTokenEntry>,
    attrs: Vec<Attribute>,
}

#[derive(Serialize, Deserialize)]
struct RawTokenEntry {
    leaf: ClaimLeaf,
    token: Signature,
}

impl From<SigningKey> for RawSigningKey {
    fn from(key: SigningKey) -> Self {
        Self {
            upk: key.upk,
            usk: key.usk,
            tokens: key
                .tokens
                .into_iter()
                .map(|(leaf, token)| RawTokenEntry { leaf, token })
                .collect(),
            attrs: key.attrs,
        }
    }
}

impl TryFrom<RawSigningKey> for SigningKey {
    type Error = String;

    fn try_from(raw: RawSigningKey) -> Result<Self, Self::Error> {
        let mut tokens = BTreeMap::new();
        for entry in raw.tokens {
            if tokens.insert(entry.leaf.clone(), entry.token).is_some() {
                return Err(format!("duplicate token for leaf {}", entry.leaf));
            }
        }
        Ok(Self { upk: raw.upk, usk: raw.usk, tokens, attrs: raw.attrs })
    }
}

impl fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigningKey")
            .field("upk", &self.upk)
            .field("attrs", &self.attrs)
            .finish_non_exhaustive()
    }
}

/// Issue a signing key over `attrs` under an authority's secret key.
///
/// Each token is the authority's signature over
/// `"ATTR" || salt || canonical(leaf) || upk`, so tokens from one signing
/// key are useless under any other user public key.
pub fn attr_gen(
    authority: &AttributeAuthorityKeys,
    tpk: &TrusteePublicKey,
    attrs: &[Attribute],
) -> Result<SigningKey, AbsError> {
    if attrs.is_empty() {
        return Err(AbsError::EmptyAttributeSet);
    }
    for (i, attr) in attrs.iter().enumerate() {
        if attrs[..i]
            .iter()
            .any(|a| a.category() == attr.category() && a.name() == attr.name())
        {
            return Err(AbsError::DuplicateAttribute(ClaimLeaf::from(attr).identity()));
        }
    }
    let (usk, upk) = primitive::generate_keypair();
    let tokens = attrs
        .iter()
        .map(|attr| {
            let leaf = ClaimLeaf::from(attr);
            let token = authority.sign(&token_input(tpk, &leaf, &upk));
            (leaf, token)
        })
        .collect();
    Ok(SigningKey { upk, usk, tokens, attrs: attrs.to_vec() })
}

impl SigningKey {
    pub fn upk(&self) -> &PublicKey {
        &self.upk
    }

    pub fn attrs(&self) -> &[Attribute] {
        &self.attrs
    }

    pub fn token_for(&self, leaf: &ClaimLeaf) -> Option<&Signature> {
        self.tokens.get(leaf)
    }

    pub(crate) fn sign_with_user_key(&self, message: &[u8]) -> Signature {
        self.usk.sign(message)
    }

    /// Containment check: every claim leaf must appear in the covered
    /// attribute set with an equal value. Reports all shortfalls at once.
    pub fn covers(&self, claim: &ClaimPredicate) -> Result<(), AbsError> {
        let mut missing: Vec<RequiredLeaf> = Vec::new();
        let mut mismatched: Vec<RequiredLeaf> = Vec::new();
        for leaf in claim.leaves() {
            if self.tokens.contains_key(leaf) {
                continue;
            }
            let identity = leaf.identity();
            let name_known = self
                .attrs
                .iter()
                .any(|a| a.category() == identity.category && a.name() == identity.name);
            if name_known {
                mismatched.push(identity);
            } else {
                missing.push(identity);
            }
        }
        if missing.is_empty() && mismatched.is_empty() {
            Ok(())
        } else {
            Err(AbsError::PredicateUnsatisfied { missing, mismatched })
        }
    }
}

/// Byte string a credential token signs.
pub(crate) fn token_input(tpk: &TrusteePublicKey, leaf: &ClaimLeaf, upk: &PublicKey) -> Vec<u8> {
    let leaf_bytes = canonical_claim_leaf(leaf);
    let mut input = Vec::with_capacity(4 + 32 + leaf_bytes.len() + 32);
    input.extend_from_slice(b"ATTR");
    input.extend_from_slice(tpk.salt());
    input.extend_from_slice(&leaf_bytes);
    input.extend_from_slice(&upk.to_bytes());
    input
}
