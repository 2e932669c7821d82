//! Known federation peers: where to reach them, how their attribute names
//! map onto ours, and the pinned authority key that anchors verification of
//! their users' signatures.

use std::collections::BTreeMap;
use std::sync::RwLock;

use crate::abs::AuthorityPublicKey;
use crate::model::AliasMap;

#[derive(Debug, Clone)]
pub struct PeerEntry {
    pub domain_id: String,
    pub base_url: String,
    /// Remote attribute identities to local ones.
    pub aliases: AliasMap,
    /// Long-term authority key, pinned at registration. Must be present
    /// before any signature from this peer's users can verify.
    pub apk: Option<AuthorityPublicKey>,
}

/// Registry of configured and registered peers. Entries are swapped whole
/// under a write lock, so a request always observes one consistent entry.
#[derive(Default)]
pub struct PeerRegistry {
    inner: RwLock<BTreeMap<String, PeerEntry>>,
}

impl PeerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Seed or update a peer from configuration, keeping any pinned key.
    pub fn upsert_config(&self, domain_id: &str, base_url: &str, aliases: AliasMap) {
        let mut inner = self.inner.write().expect("peer lock");
        let apk = inner.get(domain_id).and_then(|e| e.apk.clone());
        inner.insert(
            domain_id.to_string(),
            PeerEntry {
                domain_id: domain_id.to_string(),
                base_url: base_url.trim_end_matches('/').to_string(),
                aliases,
                apk,
            },
        );
    }

    /// Record a fetched authority key (and the URL it came from) for a peer.
    /// Re-pinning is an idempotent update.
    pub fn pin(&self, domain_id: &str, base_url: &str, apk: AuthorityPublicKey) {
        let mut inner = self.inner.write().expect("peer lock");
        let aliases = inner
            .get(domain_id)
            .map(|e| e.aliases.clone())
            .unwrap_or_default();
        inner.insert(
            domain_id.to_string(),
            PeerEntry {
                domain_id: domain_id.to_string(),
                base_url: base_url.trim_end_matches('/').to_string(),
                aliases,
                apk: Some(apk),
            },
        );
    }

    pub fn get(&self, domain_id: &str) -> Option<PeerEntry> {
        self.inner.read().expect("peer lock").get(domain_id).cloned()
    }

    pub fn contains(&self, domain_id: &str) -> bool {
        self.inner.read().expect("peer lock").contains_key(domain_id)
    }

    pub fn pinned_apk(&self, domain_id: &str) -> Option<AuthorityPublicKey> {
        self.inner
            .read()
            .expect("peer lock")
            .get(domain_id)
            .and_then(|e| e.apk.clone())
    }

    pub fn peer_ids(&self) -> Vec<String> {
        self.inner.read().expect("peer lock").keys().cloned().collect()
    }
}
