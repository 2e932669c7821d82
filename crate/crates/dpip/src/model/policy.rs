use serde::{Deserialize, Serialize};

use super::attribute::validate_identifier;
use super::predicate::{ClaimLeaf, ClaimPredicate, RequiredPredicate};
use super::{Attribute, Decision, DenyReason, ModelError};

/// Per-resource conjunction of required attributes, stored as name-value
/// pairs. An empty entry list means the resource is unprotected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPolicy")]
pub struct Policy {
    resource_id: String,
    entries: Vec<Attribute>,
}

#[derive(Deserialize)]
struct RawPolicy {
    resource_id: String,
    entries: Vec<Attribute>,
}

impl TryFrom<RawPolicy> for Policy {
    type Error = ModelError;

    fn try_from(raw: RawPolicy) -> Result<Self, Self::Error> {
        Policy::new(raw.resource_id, raw.entries)
    }
}

impl Policy {
    pub fn new(resource_id: impl Into<String>, entries: Vec<Attribute>) -> Result<Self, ModelError> {
        let resource_id = resource_id.into();
        validate_identifier("resource_id", &resource_id)?;
        for (i, entry) in entries.iter().enumerate() {
            let dup = entries[..i]
                .iter()
                .any(|e| e.category() == entry.category() && e.name() == entry.name());
            if dup {
                return Err(ModelError::DuplicateEntry(ClaimLeaf::from(entry).identity()));
            }
        }
        Ok(Self { resource_id, entries })
    }

    pub fn resource_id(&self) -> &str {
        &self.resource_id
    }

    pub fn entries(&self) -> &[Attribute] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Project a policy to the attribute names a requester must prove, dropping
/// all values.
pub fn policy_to_required_predicate(policy: &Policy) -> RequiredPredicate {
    let leaves = policy.entries().iter().map(|e| ClaimLeaf::from(e).identity()).collect();
    RequiredPredicate::new(leaves).expect("policy entries have unique identities")
}

/// The claim predicate a verifier expects a conforming signature to attest:
/// every policy entry as a sorted `(category, name, value)` leaf.
pub fn policy_to_claim_predicate(policy: &Policy) -> ClaimPredicate {
    let leaves = policy.entries().iter().map(ClaimLeaf::from).collect();
    ClaimPredicate::new(leaves).expect("policy entries have unique identities")
}

/// Conjunction semantics: a claim satisfies a policy iff its leaves equal the
/// policy's expected claim predicate exactly. This is the plaintext oracle
/// signature verification outcomes are tested against.
pub fn satisfies(claim: &ClaimPredicate, policy: &Policy) -> bool {
    *claim == policy_to_claim_predicate(policy)
}

/// Decide a request against a policy.
///
/// Permit iff every policy entry is matched by a request attribute with equal
/// `(category, name, value)`. A missing name outranks a value mismatch so the
/// outcome never reveals whether a guessed value was close.
pub fn evaluate_policy(request_attrs: &[Attribute], policy: &Policy) -> Decision {
    let mut mismatch = false;
    for entry in policy.entries() {
        let name_present = request_attrs
            .iter()
            .any(|a| a.category() == entry.category() && a.name() == entry.name());
        if !name_present {
            return Decision::Deny(DenyReason::MissingAttribute);
        }
        if !request_attrs.iter().any(|a| a == entry) {
            mismatch = true;
        }
    }
    if mismatch {
        Decision::Deny(DenyReason::ValueMismatch)
    } else {
        Decision::Permit
    }
}
