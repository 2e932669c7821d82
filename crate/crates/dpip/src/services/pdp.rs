//! The policy decision point: the intra-domain decision flow, including the
//! callback that fetches missing attributes from the information point.

use crate::model::{evaluate_policy, Attribute, ClaimLeaf, Decision, DenyReason, RequiredLeaf};

use super::pap::Pap;
use super::pip::AttributeSource;

/// Decide an access request against the stores.
///
/// The policy comes from the administration point: an absent resource denies
/// with unknown-resource, an unprotected one permits outright. When the
/// supplied attributes lack names the policy needs, exactly those names are
/// fetched from the information point (minimal disclosure) and merged before
/// evaluation. Every failure maps to a deny decision, never an error.
pub fn pdp_decide(
    pap: &Pap,
    pip: &dyn AttributeSource,
    request_attrs: &[Attribute],
    user_id: &str,
    resource_id: &str,
) -> Decision {
    if !pap.has_resource(resource_id) {
        return Decision::Deny(DenyReason::UnknownResource);
    }
    let Some(policy) = pap.get_policy(resource_id) else {
        return Decision::Permit;
    };

    let missing: Vec<RequiredLeaf> = policy
        .entries()
        .iter()
        .filter(|entry| {
            !request_attrs
                .iter()
                .any(|a| a.category() == entry.category() && a.name() == entry.name())
        })
        .map(|entry| ClaimLeaf::from(entry).identity())
        .collect();

    let mut merged = request_attrs.to_vec();
    if !missing.is_empty() {
        // An unknown user simply contributes nothing; evaluation then denies
        // with missing-attribute.
        if let Ok(fetched) = pip.query(user_id, &missing) {
            merged.extend(fetched);
        }
    }
    evaluate_policy(&merged, &policy)
}
