//! Federated attribute-based access control for multi-domain environments.
//!
//! Each administrative domain runs its own policy information point (PIP,
//! attribute store), policy administration point (PAP, resources and
//! policies), policy decision point (PDP, evaluation), and policy enforcement
//! point (PEP, the HTTP gateway). Domains grant each other access to
//! protected resources through a challenge-response protocol: the verifier
//! answers a resource request with the attribute names its policy demands,
//! the requester fills them from its local PIP and returns an
//! attribute-based signature over a one-time message, and the verifier
//! checks the signature against the claim predicate reconstructed from its
//! own policy. No attribute values or user identities cross the wire before
//! verification succeeds.
//!
//! The crate is organized by entity:
//!
//! - [`model`]: attributes, policies, predicates, decisions, and the
//!   canonical byte serialization everything signs and caches against.
//! - [`abs`]: the five-operation attribute-based signature scheme
//!   (trustee setup, authority setup, credential issuance, sign, verify)
//!   plus the predicate-keyed key cache backing the fresh and cached access
//!   methods.
//! - [`services`]: per-domain stores and engines: PIP, PAP, and the PDP
//!   decision flow with its missing-attribute PIP callback.
//! - [`federation`]: the PEP gateway, challenge lifecycle, peer registry,
//!   HTTP wire protocol, and the requester-side orchestration client.
//! - [`bench`]: the latency harness comparing fresh-key and stored-key
//!   access over two in-process domains.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability; `examples/two_domain_federation.rs` is the end-to-end tour.

pub mod abs;
pub mod bench;
pub mod config;
pub mod federation;
pub mod harness;
pub mod model;
pub mod services;

pub(crate) mod fsutil;

pub use model::{
    build_claim_predicate, evaluate_policy, policy_to_claim_predicate,
    policy_to_required_predicate, resolve_names, satisfies, AccessMessage, AliasMap, Attribute,
    CanonicalBytes, Category, ClaimLeaf, ClaimPredicate, Decision, DenyReason, ModelError, Policy,
    RequiredLeaf, RequiredPredicate,
};
