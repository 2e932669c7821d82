//! Attribute names differ between domains: `first_name` at the verifier may
//! be `fname` in the requester's stores. The alias map localizes a peer's
//! required predicate and restores the peer's names on the filled claim.
//!
//! ```bash
//! cargo run --example name_aliasing
//! ```

use dpip::harness::{HarnessOptions, TwoDomainHarness};
use dpip::model::{resolve_names, AliasMap, Attribute, Category, RequiredLeaf, RequiredPredicate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Pure renaming first.
    let aliases = AliasMap::new([(
        RequiredLeaf::new(Category::Subject, "first_name")?,
        RequiredLeaf::new(Category::Subject, "fname")?,
    )])?;
    let required = RequiredPredicate::new(vec![
        RequiredLeaf::new(Category::Subject, "first_name")?,
        RequiredLeaf::new(Category::Environment, "city")?,
    ])?;

    let (localized, reverse) = resolve_names(&required, &aliases)?;
    println!("peer asks for:        {}", show(&required));
    println!("localized for lookup: {}", show(&localized));
    println!(
        "reverse map restores: {}",
        show(&RequiredPredicate::new(
            localized.leaves().iter().map(|l| reverse.apply(l)).collect()
        )?)
    );

    // Now through the whole protocol: the requester's store only knows
    // `fname`, the verifier's policy only knows `first_name`.
    let harness = TwoDomainHarness::spawn(HarnessOptions {
        requester_aliases: aliases,
        ..HarnessOptions::default()
    })?;
    harness.put_resource(
        "resource1",
        "Record",
        b"aliased access works",
        Some(vec![
            Attribute::new(Category::Subject, "first_name", "Alice")?,
            Attribute::new(Category::Environment, "city", "Melbourne")?,
        ]),
    )?;
    harness.put_user(
        "alice",
        vec![
            Attribute::new(Category::Subject, "fname", "Alice")?,
            Attribute::new(Category::Environment, "city", "Melbourne")?,
        ],
    )?;

    let outcome = harness.request("resource1", "alice", None)?;
    println!("\ncross-domain fetch with renamed attributes: {}", outcome.decision);
    Ok(())
}

fn show(p: &RequiredPredicate) -> String {
    p.leaves().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" AND ")
}
