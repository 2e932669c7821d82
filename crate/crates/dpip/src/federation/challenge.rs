//! Pending access sessions. A challenge binds a nonce-bearing message, the
//! required predicate, one resource, and one peer; it is single-use and dies
//! after its TTL.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Instant;

use crate::model::{AccessMessage, RequiredPredicate};

/// One pending access session on the verifier side.
#[derive(Debug, Clone)]
pub struct Challenge {
    pub challenge_id: String,
    pub message: AccessMessage,
    pub required: RequiredPredicate,
    pub resource_id: String,
    pub peer_domain: String,
    /// Monotonic deadline; wall-clock skew cannot shorten or extend a
    /// session's life.
    pub expires_at: Instant,
}

/// In-memory challenge table. Consumption is an atomic remove, so two racing
/// completions for one id observe at most one live challenge between them.
#[derive(Default)]
pub struct ChallengeStore {
    inner: Mutex<HashMap<String, Challenge>>,
    inserts: std::sync::atomic::AtomicUsize,
}

impl ChallengeStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&self, challenge: Challenge) {
        let mut inner = self.inner.lock().expect("challenge lock");
        // Amortized cleanup keeps abandoned sessions from accumulating
        // without rescanning on every insert.
        let count = self.inserts.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        if count.is_multiple_of(256) {
            let now = Instant::now();
            inner.retain(|_, c| c.expires_at > now);
        }
        inner.insert(challenge.challenge_id.clone(), challenge);
    }

    /// Remove and return the challenge iff it is still live. Expired entries
    /// are dropped and reported as absent.
    pub fn consume(&self, challenge_id: &str) -> Option<Challenge> {
        let mut inner = self.inner.lock().expect("challenge lock");
        let challenge = inner.remove(challenge_id)?;
        (challenge.expires_at > Instant::now()).then_some(challenge)
    }

    /// Peer owning a live challenge, without consuming it.
    pub fn peek_peer(&self, challenge_id: &str) -> Option<String> {
        let inner = self.inner.lock().expect("challenge lock");
        inner
            .get(challenge_id)
            .filter(|c| c.expires_at > Instant::now())
            .map(|c| c.peer_domain.clone())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("challenge lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// 128-bit random challenge identifier, hex encoded.
pub fn fresh_challenge_id() -> String {
    crate::model::fresh_nonce()
}
