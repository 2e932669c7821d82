//! Domain vocabulary: attributes, policies, predicates, decisions, and the
//! pure transformations between them.
//!
//! Everything here is immutable after construction and free of I/O. The
//! canonical byte serialization in [`canonical`] is the single source of
//! signing inputs and cache keys for the rest of the crate.

mod alias;
mod attribute;
mod canonical;
mod decision;
mod error;
mod message;
mod policy;
mod predicate;

pub use alias::{resolve_names, AliasEntry, AliasMap};
pub use attribute::{Attribute, Category};
pub(crate) use attribute::validate_identifier;
pub use canonical::{canonical_claim_leaf, CanonicalBytes, FIELD_SEP, RECORD_SEP};
pub use decision::{Decision, DenyReason};
pub use error::ModelError;
pub use message::AccessMessage;
pub(crate) use message::fresh_nonce;
pub use policy::{evaluate_policy, policy_to_claim_predicate, policy_to_required_predicate, satisfies, Policy};
pub use predicate::{build_claim_predicate, ClaimLeaf, ClaimPredicate, RequiredLeaf, RequiredPredicate};
