//! Requester-side orchestration: peer registration and the full
//! challenge-answer-verify round trip against a remote domain.

use std::sync::Arc;
use std::time::Instant;

use reqwest::StatusCode;
use tracing::debug;

use crate::abs::{encoding, AuthorityPublicKey, CacheMode, TrusteePublicKey};
use crate::model::{Decision, DenyReason};
use crate::services::ResourceName;

use super::domain::{ChallengeOffer, Domain};
use super::wire::{
    b64_decode, b64_encode, ApkResponse, CompleteRequest, CompleteResponse, InitiateRequest,
    InitiateResponse, TpkResponse, DECISION_PERMIT,
};
use super::FederationError;

/// Wall-clock phase durations for one remote access. Phases that did not run
/// (cache hits, unprotected resources, aborts) are absent.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimings {
    /// Initiate HTTP round trip.
    pub initiate_s: Option<f64>,
    /// Local attribute lookup.
    pub pip_s: Option<f64>,
    /// Authority key generation and certification.
    pub asetup_s: Option<f64>,
    /// Signing-key (credential token) generation.
    pub attrgen_s: Option<f64>,
    /// Signature production.
    pub sign_s: Option<f64>,
    /// Complete HTTP round trip (submission plus verification).
    pub complete_s: Option<f64>,
    /// Verifier-reported pure verification time.
    pub verify_s: Option<f64>,
    /// End-to-end wall clock.
    pub total_s: f64,
}

impl PhaseTimings {
    /// Time spent on the wire and in request framing: both round trips minus
    /// the verifier-reported verification work.
    pub fn transfer_s(&self) -> Option<f64> {
        match (self.initiate_s, self.complete_s) {
            (Some(i), Some(c)) => Some((i + c - self.verify_s.unwrap_or(0.0)).max(0.0)),
            (Some(i), None) => Some(i),
            _ => None,
        }
    }
}

/// Final result of one remote access attempt.
#[derive(Debug)]
pub struct AccessOutcome {
    pub decision: Decision,
    pub content: Option<Vec<u8>>,
    pub timings: PhaseTimings,
}

fn transport(phase: &'static str, err: impl std::fmt::Display) -> FederationError {
    FederationError::Transport { phase, detail: err.to_string() }
}

fn protocol(phase: &'static str, detail: impl Into<String>) -> FederationError {
    FederationError::Protocol { phase, detail: detail.into() }
}

pub async fn fetch_tpk(
    http: &reqwest::Client,
    base_url: &str,
) -> Result<TrusteePublicKey, FederationError> {
    let body: TpkResponse = http
        .get(format!("{base_url}/v1/federation/tpk"))
        .send()
        .await
        .map_err(|e| transport("fetch-tpk", e))?
        .json()
        .await
        .map_err(|e| transport("fetch-tpk", e))?;
    let bytes = b64_decode(&body.tpk_b64).map_err(|e| protocol("fetch-tpk", e.to_string()))?;
    Ok(encoding::decode_tpk(&bytes)?)
}

pub async fn fetch_apk(
    http: &reqwest::Client,
    base_url: &str,
) -> Result<(String, AuthorityPublicKey), FederationError> {
    let body: ApkResponse = http
        .get(format!("{base_url}/v1/federation/apk"))
        .send()
        .await
        .map_err(|e| transport("fetch-apk", e))?
        .json()
        .await
        .map_err(|e| transport("fetch-apk", e))?;
    let bytes = b64_decode(&body.apk_b64).map_err(|e| protocol("fetch-apk", e.to_string()))?;
    Ok((body.domain_id, encoding::decode_apk(&bytes)?))
}

/// Fetch and pin a peer's trustee parameters and authority key.
///
/// The peer must serve the same federation TPK byte for byte; a mismatch
/// leaves the registry untouched.
pub async fn register_peer(
    http: &reqwest::Client,
    domain: &Domain,
    peer_id: &str,
    base_url: &str,
) -> Result<(), FederationError> {
    let peer_tpk = fetch_tpk(http, base_url).await?;
    if encoding::encode_tpk(&peer_tpk) != encoding::encode_tpk(domain.tpk()) {
        return Err(FederationError::TpkMismatch { peer: peer_id.to_string() });
    }
    let (served_id, apk) = fetch_apk(http, base_url).await?;
    if served_id != peer_id {
        return Err(protocol(
            "register-peer",
            format!("peer at {base_url} identifies as {served_id:?}, expected {peer_id:?}"),
        ));
    }
    domain.peers().pin(peer_id, base_url, apk);
    debug!(peer_id, base_url, "peer registered");
    Ok(())
}

/// Ensure the peer's authority key is pinned, fetching it from the
/// configured base URL on first use.
pub async fn ensure_peer_pinned(
    http: &reqwest::Client,
    domain: &Domain,
    peer_id: &str,
) -> Result<(), FederationError> {
    let Some(entry) = domain.peers().get(peer_id) else {
        return Err(FederationError::UnknownPeer(peer_id.to_string()));
    };
    if entry.apk.is_some() {
        return Ok(());
    }
    register_peer(http, domain, peer_id, &entry.base_url).await
}

pub async fn list_remote_resources(
    http: &reqwest::Client,
    base_url: &str,
) -> Result<Vec<ResourceName>, FederationError> {
    http.get(format!("{base_url}/v1/resources"))
        .send()
        .await
        .map_err(|e| transport("list", e))?
        .json()
        .await
        .map_err(|e| transport("list", e))
}

/// The full requester orchestration against one peer: initiate, resolve and
/// fill the predicate from the local information point, obtain keys per the
/// cache mode, sign, and submit for verification.
///
/// Returns the final decision with content on permit and a per-phase timing
/// breakdown. Fails with missing-attribute before anything is sent after the
/// initiate call when the local information point cannot satisfy the
/// predicate; transport failures carry the phase that failed.
pub async fn request_remote_resource(
    http: &reqwest::Client,
    domain: &Arc<Domain>,
    peer_id: &str,
    resource_id: &str,
    user_id: &str,
    mode: Option<CacheMode>,
) -> Result<AccessOutcome, FederationError> {
    let started = Instant::now();
    let mut timings = PhaseTimings::default();

    let Some(peer) = domain.peers().get(peer_id) else {
        return Err(FederationError::UnknownPeer(peer_id.to_string()));
    };

    let t = Instant::now();
    let response = http
        .post(format!("{}/v1/access/initiate", peer.base_url))
        .json(&InitiateRequest {
            resource_id: resource_id.to_string(),
            requester_domain: domain.domain_id().to_string(),
        })
        .send()
        .await
        .map_err(|e| transport("initiate", e))?;
    let status = response.status();
    let body = response.bytes().await.map_err(|e| transport("initiate", e))?;
    timings.initiate_s = Some(t.elapsed().as_secs_f64());

    if let Some(decision) = deny_for_status(status) {
        timings.total_s = started.elapsed().as_secs_f64();
        return Ok(AccessOutcome { decision, content: None, timings });
    }
    if !status.is_success() {
        return Err(protocol("initiate", format!("unexpected status {status}")));
    }

    let initiate: InitiateResponse =
        serde_json::from_slice(&body).map_err(|e| protocol("initiate", e.to_string()))?;

    let offer = match initiate {
        InitiateResponse::Permit { content_b64, .. } => {
            let content =
                b64_decode(&content_b64).map_err(|e| protocol("initiate", e.to_string()))?;
            timings.total_s = started.elapsed().as_secs_f64();
            return Ok(AccessOutcome {
                decision: Decision::Permit,
                content: Some(content),
                timings,
            });
        }
        InitiateResponse::Challenge { challenge_id, required, message } => ChallengeOffer {
            challenge_id,
            required: crate::model::RequiredPredicate::new(required)
                .map_err(|e| protocol("initiate", e.to_string()))?,
            message,
        },
    };

    // Local pipeline; aborts before any signature work reaches the peer.
    let (submission, prep) = domain.prepare_submission(peer_id, &offer, user_id, mode)?;
    timings.pip_s = Some(prep.pip_s);
    timings.asetup_s = prep.asetup_s;
    timings.attrgen_s = prep.attrgen_s;
    timings.sign_s = Some(prep.sign_s);

    let t = Instant::now();
    let response = http
        .post(format!("{}/v1/access/complete", peer.base_url))
        .json(&CompleteRequest {
            challenge_id: offer.challenge_id.clone(),
            signature_b64: b64_encode(&submission),
        })
        .send()
        .await
        .map_err(|e| transport("complete", e))?;
    let status = response.status();
    let complete: CompleteResponse =
        response.json().await.map_err(|e| transport("complete", e))?;
    timings.complete_s = Some(t.elapsed().as_secs_f64());
    timings.verify_s = complete.verify_s;
    timings.total_s = started.elapsed().as_secs_f64();

    if status != StatusCode::OK && status != StatusCode::GONE {
        return Err(protocol("complete", format!("unexpected status {status}")));
    }

    if complete.decision == DECISION_PERMIT {
        let content = complete
            .content_b64
            .as_deref()
            .map(b64_decode)
            .transpose()
            .map_err(|e| protocol("complete", e.to_string()))?;
        Ok(AccessOutcome { decision: Decision::Permit, content, timings })
    } else {
        let reason = complete.reason.unwrap_or(DenyReason::BadSignature);
        Ok(AccessOutcome { decision: Decision::Deny(reason), content: None, timings })
    }
}

/// Protocol-level error statuses that are final decisions, not faults.
fn deny_for_status(status: StatusCode) -> Option<Decision> {
    match status {
        StatusCode::NOT_FOUND => Some(Decision::Deny(DenyReason::UnknownResource)),
        StatusCode::CONFLICT => Some(Decision::Deny(DenyReason::UnknownPeer)),
        StatusCode::GONE => Some(Decision::Deny(DenyReason::ExpiredChallenge)),
        _ => None,
    }
}
