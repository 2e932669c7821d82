//! Policies, predicates, and the intra-domain decision flow.
//!
//! Builds the cardiologist policy, shows both predicate projections, and
//! runs the decision point against partially supplied attributes so the
//! information point has to fill the gaps.
//!
//! ```bash
//! cargo run --example policy_decision
//! ```

use dpip::model::{
    build_claim_predicate, evaluate_policy, policy_to_claim_predicate,
    policy_to_required_predicate, satisfies, Attribute, Category, Policy,
};
use dpip::services::{pdp_decide, AdminToken, Pap, Pip, ResourceRecord, UserRecord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let attrs = vec![
        Attribute::new(Category::Subject, "first_name", "Alice")?,
        Attribute::new(Category::Subject, "position", "cardiologist")?,
        Attribute::new(Category::Subject, "hospital", "Box Hill")?,
        Attribute::new(Category::Environment, "city", "Melbourne")?,
    ];
    let policy = Policy::new("resource1", attrs.clone())?;

    // The verifier sends only names; values stay home.
    let required = policy_to_required_predicate(&policy);
    println!("required predicate (what a requester is told):");
    for leaf in required.leaves() {
        println!("  {leaf}");
    }

    // The verifier reconstructs the expected claim from its own policy.
    let expected = policy_to_claim_predicate(&policy);
    println!("\nexpected claim predicate (what a signature must attest):");
    for leaf in expected.leaves() {
        println!("  {leaf}");
    }

    // A requester fills the required names from its own attributes.
    let claim = build_claim_predicate(&required, &attrs)?;
    println!("\nclaim built from Alice's attributes satisfies the policy: {}", satisfies(&claim, &policy));

    let mut wrong = attrs.clone();
    wrong[1] = Attribute::new(Category::Subject, "position", "dermatologist")?;
    let wrong_claim = build_claim_predicate(&required, &wrong)?;
    println!("claim with position=dermatologist satisfies: {}", satisfies(&wrong_claim, &policy));

    println!("\ndirect evaluation: {}", evaluate_policy(&attrs, &policy));

    // The decision point pulls missing attributes from the information
    // point, and only the missing ones.
    let pap = Pap::in_memory(AdminToken::new("admin"));
    pap.put_resource("admin", ResourceRecord::new("resource1", "Patient record", b"data".to_vec())?)?;
    pap.put_policy("admin", policy)?;
    let pip = Pip::in_memory();
    pip.put_user(UserRecord::new("alice", attrs.clone())?)?;

    let supplied = &attrs[..2];
    let decision = pdp_decide(&pap, &pip, supplied, "alice", "resource1");
    println!(
        "\ndecision with only {} of {} attributes supplied (PIP fills the rest): {decision}",
        supplied.len(),
        attrs.len()
    );
    Ok(())
}
