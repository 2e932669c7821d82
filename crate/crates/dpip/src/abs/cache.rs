//! The predicate-keyed key cache backing the two access methods: generate
//! fresh keys per request, or store bundles under the canonical claim
//! predicate and reuse them.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fsutil;
use crate::model::{AccessMessage, Attribute, CanonicalBytes, ClaimPredicate};

use super::authority::{ensure_claim_covered, AuthorityCertificate, DomainAuthority};
use super::keys::AttributeAuthorityKeys;
use super::keys::SigningKey;
use super::signature::AbsSignature;
use super::AbsError;

/// The two access methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheMode {
    /// Generate new authority and signing keys on every request; the store
    /// is never read or written.
    Fresh,
    /// Keep at most one bundle per canonical claim predicate and reuse it.
    Cached,
}

impl std::fmt::Display for CacheMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CacheMode::Fresh => "fresh",
            CacheMode::Cached => "cached",
        })
    }
}

impl std::str::FromStr for CacheMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fresh" => Ok(CacheMode::Fresh),
            "cached" => Ok(CacheMode::Cached),
            other => Err(format!("unknown cache mode {other:?}: expected fresh|cached")),
        }
    }
}

/// A signature kept alongside a bundle for the replay-compatible access
/// method. Reusing it requires reusing the message it binds, so the wire
/// protocol never consumes it; only the benchmark harness does.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CachedSignature {
    pub message: AccessMessage,
    pub signature: AbsSignature,
}

/// Everything a requester needs to sign for one claim predicate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeyBundle {
    /// Per-bundle authority keypair (subordinate to the domain's long-term key).
    pub authority: AttributeAuthorityKeys,
    /// Endorsement of `authority` by the domain's long-term key.
    pub certificate: AuthorityCertificate,
    /// Signing key over the bundle's attribute set.
    pub ska: SigningKey,
    pub cached_signature: Option<CachedSignature>,
}

/// Wall-clock durations of the key-generation phases. Both are absent when
/// the bundle came from the cache.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeygenTimings {
    pub asetup_s: Option<f64>,
    pub attrgen_s: Option<f64>,
}

impl KeygenTimings {
    pub fn cache_hit(&self) -> bool {
        self.asetup_s.is_none() && self.attrgen_s.is_none()
    }
}

/// Per-domain bundle store. Lookups key on the SHA-256 digest of the claim
/// predicate's canonical bytes. First insertion per key is serialized, so
/// concurrent first-time requests observe exactly one stored bundle.
pub struct KeyCache {
    mode: CacheMode,
    path: Option<PathBuf>,
    store: Mutex<BTreeMap<String, Arc<KeyBundle>>>,
}

impl KeyCache {
    pub fn in_memory(mode: CacheMode) -> Self {
        Self { mode, path: None, store: Mutex::new(BTreeMap::new()) }
    }

    /// Open a disk-backed cache, loading any existing bundles.
    pub fn open(mode: CacheMode, path: PathBuf) -> Result<Self, AbsError> {
        let loaded: Option<BTreeMap<String, KeyBundle>> = fsutil::read_json_if_exists(&path)?;
        let store = loaded
            .unwrap_or_default()
            .into_iter()
            .map(|(k, v)| (k, Arc::new(v)))
            .collect();
        Ok(Self { mode, path: Some(path), store: Mutex::new(store) })
    }

    /// The domain's default access method.
    pub fn mode(&self) -> CacheMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.store.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cache key for a claim predicate.
    pub fn predicate_key(claim: &ClaimPredicate) -> String {
        hex::encode(Sha256::digest(claim.canonical_bytes()))
    }

    /// Fetch or create the bundle for `claim` using the cache's default mode.
    pub fn get_or_create(
        &self,
        issuer: &DomainAuthority,
        attrs: &[Attribute],
        claim: &ClaimPredicate,
    ) -> Result<(Arc<KeyBundle>, KeygenTimings), AbsError> {
        self.get_or_create_with(self.mode, issuer, attrs, claim)
    }

    /// Fetch or create the bundle for `claim` under an explicit mode.
    ///
    /// Fresh mode always generates and never touches the store. Cached mode
    /// returns the stored bundle for the canonical predicate, or creates,
    /// stores, and persists one atomically on first use.
    pub fn get_or_create_with(
        &self,
        mode: CacheMode,
        issuer: &DomainAuthority,
        attrs: &[Attribute],
        claim: &ClaimPredicate,
    ) -> Result<(Arc<KeyBundle>, KeygenTimings), AbsError> {
        ensure_claim_covered(attrs, claim)?;
        match mode {
            CacheMode::Fresh => {
                let (bundle, timings) = issuer.issue_bundle(attrs, claim)?;
                Ok((Arc::new(bundle), timings))
            }
            CacheMode::Cached => {
                let key = Self::predicate_key(claim);
                let mut store = self.store.lock().expect("cache lock");
                if let Some(bundle) = store.get(&key) {
                    return Ok((Arc::clone(bundle), KeygenTimings::default()));
                }
                let (bundle, timings) = issuer.issue_bundle(attrs, claim)?;
                let bundle = Arc::new(bundle);
                store.insert(key, Arc::clone(&bundle));
                self.persist_locked(&store)?;
                Ok((bundle, timings))
            }
        }
    }

    /// Attach a signature (and the message it binds) to the stored bundle
    /// for `claim`, for the replay-compatible access method.
    pub fn attach_signature(
        &self,
        claim: &ClaimPredicate,
        message: AccessMessage,
        signature: AbsSignature,
    ) -> Result<(), AbsError> {
        let key = Self::predicate_key(claim);
        let mut store = self.store.lock().expect("cache lock");
        let Some(existing) = store.get(&key) else {
            return Err(AbsError::NoCachedBundle);
        };
        let mut bundle = KeyBundle::clone(existing);
        bundle.cached_signature = Some(CachedSignature { message, signature });
        store.insert(key, Arc::new(bundle));
        self.persist_locked(&store)?;
        Ok(())
    }

    /// The stored bundle for `claim`, if any. Never creates.
    pub fn peek(&self, claim: &ClaimPredicate) -> Option<Arc<KeyBundle>> {
        let store = self.store.lock().expect("cache lock");
        store.get(&Self::predicate_key(claim)).cloned()
    }

    fn persist_locked(&self, store: &BTreeMap<String, Arc<KeyBundle>>) -> Result<(), AbsError> {
        if let Some(path) = &self.path {
            let plain: BTreeMap<&String, &KeyBundle> =
                store.iter().map(|(k, v)| (k, v.as_ref())).collect();
            fsutil::atomic_write_json(path, &plain)?;
        }
        Ok(())
    }
}
