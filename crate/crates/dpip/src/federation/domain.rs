//! One administrative domain: its stores, engines, key material, challenge
//! table, and peer registry, composed in process. The HTTP layer in
//! [`super::server`] is a thin shell over the operations here, so every flow
//! can also be driven directly in tests and benchmarks.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use tracing::{debug, info, warn};

use crate::abs::{
    self, sign, verify_authority_certificate, CacheMode, DomainAuthority, KeyCache,
    TrusteePublicKey,
};
use crate::model::{
    build_claim_predicate, policy_to_claim_predicate, policy_to_required_predicate, resolve_names,
    AccessMessage, Attribute, Decision, DenyReason, ModelError, Policy, RequiredPredicate,
};
use crate::services::{
    pdp_decide, AdminToken, Pap, Pip, ResourceName, ResourceRecord, UserRecord,
};

use super::challenge::{fresh_challenge_id, Challenge, ChallengeStore};
use super::envelope::{decode_submission, encode_submission, SignedSubmission};
use super::peers::PeerRegistry;
use super::FederationError;

/// Construction parameters for a [`Domain`].
pub struct DomainSetup {
    pub domain_id: String,
    pub tpk: TrusteePublicKey,
    pub admin_token: String,
    /// `None` keeps every store in memory (tests, benchmarks).
    pub data_dir: Option<PathBuf>,
    pub cache_mode: CacheMode,
    pub challenge_ttl: Duration,
}

impl DomainSetup {
    pub fn in_memory(domain_id: &str, tpk: TrusteePublicKey, admin_token: &str) -> Self {
        Self {
            domain_id: domain_id.to_string(),
            tpk,
            admin_token: admin_token.to_string(),
            data_dir: None,
            cache_mode: CacheMode::Fresh,
            challenge_ttl: Duration::from_secs(60),
        }
    }
}

/// Outcome of an initiate call on the verifier side.
#[derive(Debug)]
pub enum InitiateOutcome {
    /// Unprotected resource: content handed over immediately.
    Permit { content: Vec<u8> },
    /// Protected resource: a pending challenge the requester must answer.
    Challenge(ChallengeOffer),
}

/// What the requester receives to work with: never any attribute value.
#[derive(Debug, Clone)]
pub struct ChallengeOffer {
    pub challenge_id: String,
    pub required: RequiredPredicate,
    pub message: AccessMessage,
}

/// Outcome of a complete call on the verifier side. All failures are deny
/// decisions; the fine-grained cause is logged locally and only a coarse
/// reason crosses the wire.
#[derive(Debug)]
pub struct CompleteOutcome {
    pub decision: Decision,
    pub content: Option<Vec<u8>>,
    /// Wall-clock seconds spent in pure signature verification.
    pub verify_s: Option<f64>,
}

/// Client-side phase durations for one submission preparation.
#[derive(Debug, Clone, Copy, Default)]
pub struct SubmissionTimings {
    pub pip_s: f64,
    pub asetup_s: Option<f64>,
    pub attrgen_s: Option<f64>,
    pub sign_s: f64,
}

pub struct Domain {
    domain_id: String,
    tpk: TrusteePublicKey,
    pip: Pip,
    pap: Pap,
    authority: DomainAuthority,
    key_cache: KeyCache,
    challenges: ChallengeStore,
    peers: PeerRegistry,
    challenge_ttl: Duration,
    admin_token: AdminToken,
}

impl Domain {
    pub fn open(setup: DomainSetup) -> Result<Arc<Self>, FederationError> {
        let admin_token = AdminToken::new(setup.admin_token);
        let (pip, pap, authority, key_cache) = match &setup.data_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(crate::services::ServiceError::Storage)?;
                (
                    Pip::open(dir.join("users.json"))
                        .map_err(crate::services::ServiceError::Storage)?,
                    Pap::open(
                        dir.join("resources.json"),
                        dir.join("policies.json"),
                        admin_token.clone(),
                    )
                    .map_err(crate::services::ServiceError::Storage)?,
                    DomainAuthority::load_or_create(
                        setup.tpk.clone(),
                        &setup.domain_id,
                        &dir.join("authority.json"),
                    )?,
                    KeyCache::open(setup.cache_mode, dir.join("keycache.json"))?,
                )
            }
            None => (
                Pip::in_memory(),
                Pap::in_memory(admin_token.clone()),
                DomainAuthority::create(setup.tpk.clone(), &setup.domain_id)?,
                KeyCache::in_memory(setup.cache_mode),
            ),
        };
        Ok(Arc::new(Self {
            domain_id: setup.domain_id,
            tpk: setup.tpk,
            pip,
            pap,
            authority,
            key_cache,
            challenges: ChallengeStore::new(),
            peers: PeerRegistry::new(),
            challenge_ttl: setup.challenge_ttl,
            admin_token,
        }))
    }

    pub fn domain_id(&self) -> &str {
        &self.domain_id
    }

    pub fn tpk(&self) -> &TrusteePublicKey {
        &self.tpk
    }

    pub fn authority(&self) -> &DomainAuthority {
        &self.authority
    }

    pub fn key_cache(&self) -> &KeyCache {
        &self.key_cache
    }

    pub fn peers(&self) -> &PeerRegistry {
        &self.peers
    }

    pub fn pip(&self) -> &Pip {
        &self.pip
    }

    pub fn pap(&self) -> &Pap {
        &self.pap
    }

    pub fn challenges(&self) -> &ChallengeStore {
        &self.challenges
    }

    // ---- admin surface (bearer-gated) ----

    fn authorize_admin(&self, token: &str) -> Result<(), FederationError> {
        if self.admin_token.matches(token) {
            Ok(())
        } else {
            Err(crate::services::ServiceError::AuthFailure.into())
        }
    }

    pub fn admin_put_user(&self, token: &str, record: UserRecord) -> Result<(), FederationError> {
        self.authorize_admin(token)?;
        self.pip.put_user(record)?;
        Ok(())
    }

    pub fn admin_put_resource(
        &self,
        token: &str,
        record: ResourceRecord,
    ) -> Result<String, FederationError> {
        Ok(self.pap.put_resource(token, record)?)
    }

    pub fn admin_put_policy(&self, token: &str, policy: Policy) -> Result<(), FederationError> {
        Ok(self.pap.put_policy(token, policy)?)
    }

    // ---- intra-domain decision flow ----

    pub fn pdp_decide(
        &self,
        request_attrs: &[Attribute],
        user_id: &str,
        resource_id: &str,
    ) -> Decision {
        pdp_decide(&self.pap, &self.pip, request_attrs, user_id, resource_id)
    }

    // ---- verifier side of the cross-domain protocol ----

    pub fn list_resource_names(&self) -> Vec<ResourceName> {
        self.pap.list_resource_names()
    }

    /// Answer a peer's request for a resource: hand over unprotected content
    /// immediately, or issue a challenge carrying the required predicate and
    /// the message to be signed. Nothing is stored on error paths.
    pub fn initiate_access(
        &self,
        resource_id: &str,
        requester_domain: &str,
    ) -> Result<InitiateOutcome, FederationError> {
        if !self.peers.contains(requester_domain) {
            return Err(FederationError::UnknownPeer(requester_domain.to_string()));
        }
        let Some(resource) = self.pap.get_resource(resource_id) else {
            return Err(FederationError::UnknownResource(resource_id.to_string()));
        };
        let Some(policy) = self.pap.get_policy(resource_id) else {
            debug!(resource_id, requester_domain, "unprotected resource, immediate permit");
            return Ok(InitiateOutcome::Permit { content: resource.content().to_vec() });
        };

        let required = policy_to_required_predicate(&policy);
        let message = AccessMessage::issue(resource_id, requester_domain, &self.domain_id)?;
        let challenge = Challenge {
            challenge_id: fresh_challenge_id(),
            message: message.clone(),
            required: required.clone(),
            resource_id: resource_id.to_string(),
            peer_domain: requester_domain.to_string(),
            expires_at: Instant::now() + self.challenge_ttl,
        };
        let offer = ChallengeOffer {
            challenge_id: challenge.challenge_id.clone(),
            required,
            message,
        };
        self.challenges.insert(challenge);
        debug!(resource_id, requester_domain, challenge_id = %offer.challenge_id, "challenge issued");
        Ok(InitiateOutcome::Challenge(offer))
    }

    /// Verify a submission against a live challenge. The challenge is
    /// consumed whatever the outcome; replays and expirations deny with
    /// expired-challenge, every verification failure denies with
    /// bad-signature.
    pub fn complete_access(&self, challenge_id: &str, submission_bytes: &[u8]) -> CompleteOutcome {
        info!(challenge_id, "complete_access");
        let Some(challenge) = self.challenges.consume(challenge_id) else {
            debug!(challenge_id, "challenge absent, used, or expired");
            return CompleteOutcome {
                decision: Decision::Deny(DenyReason::ExpiredChallenge),
                content: None,
                verify_s: None,
            };
        };

        let deny = |cause: &str| {
            warn!(challenge_id, cause, "submission rejected");
            CompleteOutcome {
                decision: Decision::Deny(DenyReason::BadSignature),
                content: None,
                verify_s: None,
            }
        };

        let submission = match decode_submission(submission_bytes) {
            Ok(s) => s,
            Err(e) => return deny(&format!("undecodable submission: {e}")),
        };
        if submission.domain_id != challenge.peer_domain {
            return deny("submission domain does not match the challenged peer");
        }
        let Some(pinned_apk) = self.peers.pinned_apk(&challenge.peer_domain) else {
            return deny("no pinned authority key for peer");
        };

        // The policy as it stands now; protection may have been lifted while
        // the challenge was pending.
        let Some(resource) = self.pap.get_resource(&challenge.resource_id) else {
            warn!(challenge_id, "resource vanished while challenge was pending");
            return CompleteOutcome {
                decision: Decision::Deny(DenyReason::UnknownResource),
                content: None,
                verify_s: None,
            };
        };
        let Some(policy) = self.pap.get_policy(&challenge.resource_id) else {
            return CompleteOutcome {
                decision: Decision::Permit,
                content: Some(resource.content().to_vec()),
                verify_s: None,
            };
        };
        let expected_claim = policy_to_claim_predicate(&policy);

        let started = Instant::now();
        let cert_ok = verify_authority_certificate(
            &self.tpk,
            &pinned_apk,
            &submission.authority_apk,
            &submission.certificate,
        );
        let sig_ok = cert_ok
            && abs::verify(
                &self.tpk,
                &submission.authority_apk,
                &challenge.message,
                &expected_claim,
                &submission.signature,
            );
        let verify_s = started.elapsed().as_secs_f64();

        if !cert_ok {
            let mut outcome = deny("authority certificate does not verify under the pinned key");
            outcome.verify_s = Some(verify_s);
            return outcome;
        }
        if !sig_ok {
            let mut outcome = deny("signature does not verify against the expected claim");
            outcome.verify_s = Some(verify_s);
            return outcome;
        }

        info!(challenge_id, resource_id = %challenge.resource_id, peer = %challenge.peer_domain, "access granted");
        CompleteOutcome {
            decision: Decision::Permit,
            content: Some(resource.content().to_vec()),
            verify_s: Some(verify_s),
        }
    }

    // ---- requester side of the cross-domain protocol ----

    /// Build the signed submission answering a challenge from `peer_id`.
    ///
    /// Resolves the peer's attribute names into local ones, queries the
    /// local information point for exactly those names, restores the peer's
    /// names on the filled claim, obtains keys per the cache mode, and
    /// signs. Fails with missing-attribute before any signature work when
    /// the information point cannot satisfy the predicate.
    pub fn prepare_submission(
        &self,
        peer_id: &str,
        offer: &ChallengeOffer,
        user_id: &str,
        mode: Option<CacheMode>,
    ) -> Result<(Vec<u8>, SubmissionTimings), FederationError> {
        let Some(peer) = self.peers.get(peer_id) else {
            return Err(FederationError::UnknownPeer(peer_id.to_string()));
        };
        if offer.message.verifier_domain() != peer_id
            || offer.message.requester_domain() != self.domain_id
        {
            return Err(FederationError::Protocol {
                phase: "initiate",
                detail: "challenge message does not name this requester/verifier pair".to_string(),
            });
        }

        let (localized, reverse) = resolve_names(&offer.required, &peer.aliases)?;

        let started = Instant::now();
        let attrs = match self.pip.query(user_id, localized.leaves()) {
            Ok(attrs) => attrs,
            Err(crate::services::ServiceError::UnknownUser(_)) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let pip_s = started.elapsed().as_secs_f64();

        let local_claim = match build_claim_predicate(&localized, &attrs) {
            Ok(claim) => claim,
            Err(ModelError::MissingAttributes(leaves)) => {
                return Err(FederationError::MissingAttributes(leaves))
            }
            Err(e) => return Err(e.into()),
        };
        // Back into the verifier's vocabulary; tokens are issued over these
        // leaves so the verifier's reconstruction matches byte for byte.
        let claim = reverse.apply_claim(&local_claim)?;
        let claim_attrs: Vec<Attribute> = claim
            .leaves()
            .iter()
            .map(|l| Attribute::new(l.category, l.name.clone(), l.value.clone()))
            .collect::<Result<_, _>>()?;

        let mode = mode.unwrap_or(self.key_cache.mode());
        let (bundle, keygen) =
            self.key_cache
                .get_or_create_with(mode, &self.authority, &claim_attrs, &claim)?;

        let started = Instant::now();
        let signature = sign(
            &self.tpk,
            bundle.authority.public_key(),
            &bundle.ska,
            &offer.message,
            &claim,
        )?;
        let sign_s = started.elapsed().as_secs_f64();

        let submission = SignedSubmission {
            domain_id: self.domain_id.clone(),
            authority_apk: bundle.authority.public_key().clone(),
            certificate: bundle.certificate.clone(),
            signature,
        };
        Ok((
            encode_submission(&submission),
            SubmissionTimings {
                pip_s,
                asetup_s: keygen.asetup_s,
                attrgen_s: keygen.attrgen_s,
                sign_s,
            },
        ))
    }

    /// Claim leaves the named user can currently attest for a predicate, in
    /// the verifier's vocabulary. Convenience used by the benchmark harness.
    pub fn resolved_claim_for(
        &self,
        peer_id: &str,
        required: &RequiredPredicate,
        user_id: &str,
    ) -> Result<crate::model::ClaimPredicate, FederationError> {
        let Some(peer) = self.peers.get(peer_id) else {
            return Err(FederationError::UnknownPeer(peer_id.to_string()));
        };
        let (localized, reverse) = resolve_names(required, &peer.aliases)?;
        let attrs = self.pip.query(user_id, localized.leaves())?;
        let local_claim = build_claim_predicate(&localized, &attrs).map_err(|e| match e {
            ModelError::MissingAttributes(leaves) => FederationError::MissingAttributes(leaves),
            other => other.into(),
        })?;
        Ok(reverse.apply_claim(&local_claim)?)
    }
}
