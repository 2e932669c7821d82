//! Per-domain stores and engines: the policy information point (attribute
//! store and query), policy administration point (resources and policies),
//! and policy decision point (the decision flow with its missing-attribute
//! callback).
//!
//! Persistence is one JSON document per entity type under the domain's data
//! directory: `users.json`, `resources.json`, `policies.json` (plus
//! `authority.json` and `keycache.json` owned by the key layer). Formats are
//! documented in `docs/data-dir.md`.

mod pap;
mod pdp;
mod pip;
mod store;

pub use pap::{AdminToken, Pap, ResourceName, ResourceRecord};
pub use pdp::pdp_decide;
pub use pip::{AttributeSource, Pip, UserRecord};
pub use store::DocumentStore;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown user {0:?}")]
    UnknownUser(String),

    #[error("unknown resource {0:?}")]
    UnknownResource(String),

    #[error("admin authentication failed")]
    AuthFailure,

    #[error(transparent)]
    Model(#[from] crate::model::ModelError),

    #[error("store I/O failed: {0}")]
    Storage(#[from] std::io::Error),
}
