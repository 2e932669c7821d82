//! The enforcement-point gateway and the cross-domain wire protocol:
//! resource listing, challenge issuance, signature submission and
//! verification, peer key pinning, and the requester-side orchestration
//! client.
//!
//! All four architecture entities of a domain run in one daemon process and
//! talk through in-process interfaces; the module boundaries keep them
//! separable, and the HTTP layer is a thin shell over [`Domain`].

mod challenge;
mod client;
mod domain;
mod envelope;
mod peers;
mod server;
mod wire;

pub use challenge::{Challenge, ChallengeStore};
pub use client::{
    ensure_peer_pinned, fetch_apk, fetch_tpk, list_remote_resources, register_peer,
    request_remote_resource, AccessOutcome, PhaseTimings,
};
pub use domain::{
    ChallengeOffer, CompleteOutcome, Domain, DomainSetup, InitiateOutcome, SubmissionTimings,
};
pub use envelope::{decode_submission, encode_submission, SignedSubmission};
pub use peers::{PeerEntry, PeerRegistry};
pub use server::{router, spawn, DaemonState};
pub use wire::{
    AdminResourceRequest, ApkResponse, CompleteRequest, CompleteResponse, ErrorBody,
    InitiateRequest, InitiateResponse, PutOk, TpkResponse,
};

use thiserror::Error;

use crate::abs::AbsError;
use crate::model::{ModelError, RequiredLeaf};
use crate::services::ServiceError;

#[derive(Debug, Error)]
pub enum FederationError {
    #[error("unknown peer domain {0:?}")]
    UnknownPeer(String),

    #[error("unknown resource {0:?}")]
    UnknownResource(String),

    #[error("peer {peer:?} serves a trustee key from another federation")]
    TpkMismatch { peer: String },

    /// The local information point cannot satisfy the predicate; nothing is
    /// signed or sent.
    #[error("missing attributes: {}", .0.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "))]
    MissingAttributes(Vec<RequiredLeaf>),

    #[error("transport failure in phase {phase}: {detail}")]
    Transport { phase: &'static str, detail: String },

    #[error("protocol violation in phase {phase}: {detail}")]
    Protocol { phase: &'static str, detail: String },

    #[error(transparent)]
    Abs(#[from] AbsError),

    #[error(transparent)]
    Service(#[from] ServiceError),

    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<crate::abs::CodecError> for FederationError {
    fn from(e: crate::abs::CodecError) -> Self {
        FederationError::Abs(AbsError::Codec(e))
    }
}

impl FederationError {
    /// Machine-readable code for CLI and logs.
    pub fn code(&self) -> &'static str {
        match self {
            FederationError::UnknownPeer(_) => "unknown-peer",
            FederationError::UnknownResource(_) => "unknown-resource",
            FederationError::TpkMismatch { .. } => "tpk-mismatch",
            FederationError::MissingAttributes(_) => "missing-attribute",
            FederationError::Transport { .. } => "transport",
            FederationError::Protocol { .. } => "protocol",
            FederationError::Abs(_) => "signature",
            FederationError::Service(ServiceError::AuthFailure) => "auth-failure",
            FederationError::Service(ServiceError::UnknownResource(_)) => "unknown-resource",
            FederationError::Service(ServiceError::UnknownUser(_)) => "unknown-user",
            FederationError::Service(_) => "storage",
            FederationError::Model(_) => "bad-request",
        }
    }
}
