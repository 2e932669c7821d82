//! Challenges are single-use and short-lived: the same signature replayed
//! against a consumed challenge is refused, and pending challenges die when
//! their TTL passes.
//!
//! ```bash
//! cargo run --example challenge_lifecycle
//! ```

use std::time::Duration;

use dpip::federation::InitiateOutcome;
use dpip::harness::{HarnessOptions, TwoDomainHarness};
use dpip::model::{Attribute, Category};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let harness = TwoDomainHarness::spawn(HarnessOptions {
        challenge_ttl: Duration::from_millis(300),
        ..HarnessOptions::default()
    })?;
    let attrs = vec![Attribute::new(Category::Subject, "role", "auditor")?];
    harness.put_resource("ledger", "Audit ledger", b"entries...", Some(attrs.clone()))?;
    harness.put_user("ana", attrs)?;

    // Run one access by hand so we can reuse the submission.
    let offer = match harness.verifier.initiate_access("ledger", "domain2")? {
        InitiateOutcome::Challenge(offer) => offer,
        InitiateOutcome::Permit { .. } => unreachable!("ledger is protected"),
    };
    println!("challenge issued: {}", offer.challenge_id);
    println!("  nonce {}, ttl 300ms", offer.message.nonce());

    let (submission, _) = harness.requester.prepare_submission("domain1", &offer, "ana", None)?;
    let first = harness.verifier.complete_access(&offer.challenge_id, &submission);
    println!("first completion:  {}", first.decision);

    let replay = harness.verifier.complete_access(&offer.challenge_id, &submission);
    println!("replayed completion: {} (challenge consumed)", replay.decision);

    // A fresh challenge left past its TTL is just as dead.
    let offer = match harness.verifier.initiate_access("ledger", "domain2")? {
        InitiateOutcome::Challenge(offer) => offer,
        InitiateOutcome::Permit { .. } => unreachable!(),
    };
    let (submission, _) = harness.requester.prepare_submission("domain1", &offer, "ana", None)?;
    println!("\nsecond challenge issued: {}; sleeping past the TTL...", offer.challenge_id);
    std::thread::sleep(Duration::from_millis(400));
    let expired = harness.verifier.complete_access(&offer.challenge_id, &submission);
    println!("late completion: {}", expired.decision);
    Ok(())
}
