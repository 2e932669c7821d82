use thiserror::Error;

use super::predicate::RequiredLeaf;

/// Validation and transformation failures for the core vocabulary types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    /// Attribute or leaf name outside `[A-Za-z0-9_.-]+`.
    #[error("invalid attribute name {0:?}: must be non-empty and match [A-Za-z0-9_.-]+")]
    InvalidName(String),

    /// Attribute value empty or containing control characters.
    #[error("invalid value for attribute {0:?}: must be non-empty and free of control characters")]
    InvalidValue(String),

    /// Identifier (resource, domain, user) empty or containing control characters.
    #[error("invalid {field} {value:?}: must be non-empty and free of control characters")]
    InvalidIdentifier { field: &'static str, value: String },

    /// Nonce not a 32-character lowercase hex string.
    #[error("invalid nonce {0:?}: expected 32 lowercase hex characters")]
    InvalidNonce(String),

    /// Two entries share the same (category, name) identity.
    #[error("duplicate entry for {0}")]
    DuplicateEntry(RequiredLeaf),

    /// Leaves a claim predicate could not fill from the available attributes.
    #[error("missing attributes for leaves: {}", format_leaves(.0))]
    MissingAttributes(Vec<RequiredLeaf>),

    /// Two distinct remote leaves map to the same local leaf.
    #[error("alias collision: multiple leaves map to {0}")]
    AliasCollision(RequiredLeaf),
}

fn format_leaves(leaves: &[RequiredLeaf]) -> String {
    leaves.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
}
