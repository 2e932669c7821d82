//! The full cross-domain scenario over real loopback HTTP: domain 1 holds a
//! protected resource, domain 2's user Alice holds the matching attributes,
//! and the challenge protocol decides access without an attribute value or
//! user identity ever crossing the wire in the clear.
//!
//! ```bash
//! cargo run --example two_domain_federation
//! ```

use dpip::harness::{HarnessOptions, TwoDomainHarness};
use dpip::model::{Attribute, Category};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let harness = TwoDomainHarness::spawn(HarnessOptions::default())?;
    println!("domain1 (verifier)  at {}", harness.verifier_url);
    println!("domain2 (requester) at {}", harness.requester_url);

    // Bob, the administrator of domain 1, protects a resource.
    let policy = vec![
        Attribute::new(Category::Subject, "first_name", "Alice")?,
        Attribute::new(Category::Subject, "position", "cardiologist")?,
        Attribute::new(Category::Subject, "hospital", "Box Hill")?,
        Attribute::new(Category::Environment, "city", "Melbourne")?,
    ];
    harness.put_resource(
        "resource1",
        "Patient record",
        b"the confidential record body",
        Some(policy.clone()),
    )?;
    harness.put_resource("readme", "Public notes", b"nothing sensitive here", None)?;

    // Domain 2 stores its users' attributes in its own information point.
    harness.put_user("alice", policy)?;
    harness.put_user(
        "bob",
        vec![Attribute::new(Category::Subject, "first_name", "Bob")?],
    )?;

    // Anyone may list resource names; content stays hidden.
    let names = harness.block_on(dpip::federation::list_remote_resources(
        &harness.http,
        &harness.verifier_url,
    ))?;
    println!("\nresources visible to peers:");
    for name in names {
        println!("  {} ({})", name.resource_id, name.display_name);
    }

    // Alice fetches the protected resource: initiate -> predicate -> PIP ->
    // sign -> verify, all behind one call.
    let outcome = harness.request("resource1", "alice", None)?;
    println!("\nalice fetching resource1: {}", outcome.decision);
    println!("  content: {:?}", String::from_utf8_lossy(&outcome.content.unwrap_or_default()));
    let t = outcome.timings;
    println!(
        "  phases: initiate {:.1?} pip {:.1?} keygen {:.1?} sign {:.1?} verify {:.1?} total {:.1?}",
        secs(t.initiate_s),
        secs(t.pip_s),
        secs(t.asetup_s.map(|a| a + t.attrgen_s.unwrap_or(0.0))),
        secs(t.sign_s),
        secs(t.verify_s),
        std::time::Duration::from_secs_f64(t.total_s),
    );

    // The unprotected resource needs no challenge at all.
    let outcome = harness.request("readme", "alice", None)?;
    println!("\nalice fetching the unprotected resource: {}", outcome.decision);

    // Bob lacks the attributes; his daemon refuses before contacting anyone.
    match harness.request("resource1", "bob", None) {
        Err(e) => println!("bob fetching resource1 aborts locally: {e}"),
        Ok(outcome) => println!("bob fetching resource1: {}", outcome.decision),
    }
    Ok(())
}

fn secs(value: Option<f64>) -> std::time::Duration {
    std::time::Duration::from_secs_f64(value.unwrap_or(0.0))
}
