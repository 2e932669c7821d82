//! The HTTP face of a domain: axum routes over the in-process [`Domain`]
//! operations. One daemon per domain hosts the resource listing, the
//! challenge protocol, the federation key endpoints, and the bearer-gated
//! admin endpoints.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tracing::{info, warn};

use crate::abs::encoding;
use crate::model::{Decision, DenyReason, Policy};
use crate::services::{ResourceRecord, UserRecord};

use super::client::ensure_peer_pinned;
use super::domain::{Domain, InitiateOutcome};
use super::wire::{
    b64_decode, b64_encode, AdminResourceRequest, ApkResponse, CompleteRequest, CompleteResponse,
    ErrorBody, InitiateRequest, InitiateResponse, PutOk, TpkResponse, DECISION_DENY,
    DECISION_PERMIT,
};
use super::FederationError;

#[derive(Clone)]
pub struct DaemonState {
    pub domain: Arc<Domain>,
    http: reqwest::Client,
}

pub fn router(domain: Arc<Domain>) -> Router {
    let state = DaemonState { domain, http: reqwest::Client::new() };
    Router::new()
        .route("/v1/resources", get(list_resources))
        .route("/v1/access/initiate", post(initiate))
        .route("/v1/access/complete", post(complete))
        .route("/v1/federation/tpk", get(federation_tpk))
        .route("/v1/federation/apk", get(federation_apk))
        .route("/v1/admin/users", post(admin_users))
        .route("/v1/admin/resources", post(admin_resources))
        .route("/v1/admin/policies", post(admin_policies))
        .with_state(state)
}

/// Bind and serve until the task is dropped or the process exits. Returns
/// the bound address (useful with port 0) and the join handle.
pub async fn spawn(
    domain: Arc<Domain>,
    addr: SocketAddr,
) -> std::io::Result<(SocketAddr, tokio::task::JoinHandle<()>)> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let bound = listener.local_addr()?;
    let app = router(domain);
    let handle = tokio::spawn(async move {
        if let Err(e) = axum::serve(listener, app).await {
            warn!("daemon exited: {e}");
        }
    });
    info!(%bound, "daemon listening");
    Ok((bound, handle))
}

fn error_response(status: StatusCode, code: &str, detail: Option<String>) -> Response {
    (status, Json(ErrorBody { error: code.to_string(), detail })).into_response()
}

/// Map operation errors onto the documented status codes.
fn federation_error_response(err: FederationError) -> Response {
    use crate::services::ServiceError;
    match &err {
        FederationError::UnknownResource(_) => {
            error_response(StatusCode::NOT_FOUND, "unknown-resource", Some(err.to_string()))
        }
        FederationError::UnknownPeer(_) => {
            error_response(StatusCode::CONFLICT, "unknown-peer", Some(err.to_string()))
        }
        FederationError::Service(ServiceError::AuthFailure) => {
            error_response(StatusCode::FORBIDDEN, "auth-failure", None)
        }
        FederationError::Service(ServiceError::UnknownResource(_)) => {
            error_response(StatusCode::NOT_FOUND, "unknown-resource", Some(err.to_string()))
        }
        FederationError::Service(ServiceError::UnknownUser(_)) => {
            error_response(StatusCode::NOT_FOUND, "unknown-user", Some(err.to_string()))
        }
        FederationError::Model(_) => {
            error_response(StatusCode::BAD_REQUEST, "bad-request", Some(err.to_string()))
        }
        _ => {
            warn!("internal error: {err}");
            error_response(StatusCode::INTERNAL_SERVER_ERROR, "internal", Some(err.to_string()))
        }
    }
}

async fn list_resources(State(state): State<DaemonState>) -> Response {
    Json(state.domain.list_resource_names()).into_response()
}

async fn initiate(
    State(state): State<DaemonState>,
    Json(req): Json<InitiateRequest>,
) -> Response {
    match state.domain.initiate_access(&req.resource_id, &req.requester_domain) {
        Ok(InitiateOutcome::Permit { content }) => Json(InitiateResponse::Permit {
            decision: DECISION_PERMIT.to_string(),
            content_b64: b64_encode(&content),
        })
        .into_response(),
        Ok(InitiateOutcome::Challenge(offer)) => Json(InitiateResponse::Challenge {
            challenge_id: offer.challenge_id,
            required: offer.required.leaves().to_vec(),
            message: offer.message,
        })
        .into_response(),
        Err(e) => federation_error_response(e),
    }
}

async fn complete(
    State(state): State<DaemonState>,
    Json(req): Json<CompleteRequest>,
) -> Response {
    let Ok(submission) = b64_decode(&req.signature_b64) else {
        return error_response(StatusCode::BAD_REQUEST, "bad-request", Some("signature_b64 is not base64".into()));
    };

    // Pin the challenged peer's authority key on first use, so daemon
    // startup order between federated domains does not matter.
    if let Some(peer_id) = state.domain.challenges().peek_peer(&req.challenge_id) {
        if let Err(e) = ensure_peer_pinned(&state.http, &state.domain, &peer_id).await {
            warn!(peer_id, "could not pin peer authority key: {e}");
        }
    }

    let outcome = state.domain.complete_access(&req.challenge_id, &submission);
    match outcome.decision {
        Decision::Permit => Json(CompleteResponse {
            decision: DECISION_PERMIT.to_string(),
            reason: None,
            content_b64: outcome.content.as_deref().map(b64_encode),
            verify_s: outcome.verify_s,
        })
        .into_response(),
        Decision::Deny(DenyReason::ExpiredChallenge) => (
            StatusCode::GONE,
            Json(CompleteResponse {
                decision: DECISION_DENY.to_string(),
                reason: Some(DenyReason::ExpiredChallenge),
                content_b64: None,
                verify_s: outcome.verify_s,
            }),
        )
            .into_response(),
        Decision::Deny(reason) => Json(CompleteResponse {
            decision: DECISION_DENY.to_string(),
            reason: Some(reason),
            content_b64: None,
            verify_s: outcome.verify_s,
        })
        .into_response(),
    }
}

async fn federation_tpk(State(state): State<DaemonState>) -> Response {
    Json(TpkResponse { tpk_b64: b64_encode(&encoding::encode_tpk(state.domain.tpk())) })
        .into_response()
}

async fn federation_apk(State(state): State<DaemonState>) -> Response {
    Json(ApkResponse {
        domain_id: state.domain.domain_id().to_string(),
        apk_b64: b64_encode(&encoding::encode_apk(state.domain.authority().public_key())),
    })
    .into_response()
}

fn bearer_token(headers: &HeaderMap) -> Option<&str> {
    headers
        .get(axum::http::header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
}

async fn admin_users(
    State(state): State<DaemonState>,
    headers: HeaderMap,
    Json(record): Json<UserRecord>,
) -> Response {
    let Some(token) = bearer_token(&headers) else {
        return error_response(StatusCode::FORBIDDEN, "auth-failure", None);
    };
    match state.domain.admin_put_user(token, record) {
        Ok(()) => Json(PutOk { ok: true }).into_response(),
        Err(e) => federation_error_response(e),
    }
}

async fn admin_resources(
    State(state): State<DaemonState>,
    headers: HeaderMap,
    Json(req): Json<AdminResourceRequest>,
) -> Response {
    let Some(token) = bearer_token(&headers) else {
        return error_response(StatusCode::FORBIDDEN, "auth-failure", None);
    };
    let Ok(content) = b64_decode(&req.content_b64) else {
        return error_response(StatusCode::BAD_REQUEST, "bad-request", Some("content_b64 is not base64".into()));
    };
    let record = match ResourceRecord::new(req.resource_id, req.display_name, content) {
        Ok(r) => r,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, "bad-request", Some(e.to_string())),
    };
    match state.domain.admin_put_resource(token, record) {
        Ok(_) => Json(PutOk { ok: true }).into_response(),
        Err(e) => federation_error_response(e),
    }
}

async fn admin_policies(
    State(state): State<DaemonState>,
    headers: HeaderMap,
    Json(policy): Json<Policy>,
) -> Response {
    let Some(token) = bearer_token(&headers) else {
        return error_response(StatusCode::FORBIDDEN, "auth-failure", None);
    };
    match state.domain.admin_put_policy(token, policy) {
        Ok(()) => Json(PutOk { ok: true }).into_response(),
        Err(e) => federation_error_response(e),
    }
}
