//! The five signature operations end to end: trustee setup, authority
//! setup, credential issuance, signing, and verification, plus what happens
//! when each piece is tampered with.
//!
//! ```bash
//! cargo run --example abs_roundtrip
//! ```

use dpip::abs::{a_setup, attr_gen, sign, ts_setup, verify, AbsSignature};
use dpip::model::{AccessMessage, Attribute, Category, ClaimLeaf, ClaimPredicate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // One trustee per federation; every domain shares its parameters.
    let tpk = ts_setup("fed1")?;
    println!("trustee parameters for federation {:?}", tpk.federation_id());

    // Each domain runs an attribute authority.
    let authority = a_setup(&tpk, "domain2")?;
    let other_domain = a_setup(&tpk, "domain3")?;

    // The authority issues Alice a signing key over her attributes.
    let attrs = vec![
        Attribute::new(Category::Subject, "first_name", "Alice")?,
        Attribute::new(Category::Subject, "position", "cardiologist")?,
        Attribute::new(Category::Subject, "hospital", "Box Hill")?,
        Attribute::new(Category::Environment, "city", "Melbourne")?,
    ];
    let ska = attr_gen(&authority, &tpk, &attrs)?;
    println!("signing key issued over {} attributes", ska.attrs().len());

    // Sign a one-time message under the full claim predicate.
    let claim = ClaimPredicate::new(attrs.iter().map(ClaimLeaf::from).collect())?;
    let message = AccessMessage::issue("resource1", "domain2", "domain1")?;
    let signature = sign(&tpk, authority.public_key(), &ska, &message, &claim)?;
    println!(
        "signature: {} leaf tokens + binding, {} bytes on the wire",
        signature.leaf_tokens().len(),
        signature.to_bytes().len()
    );

    println!("\nverify(correct inputs)          = {}", verify(&tpk, authority.public_key(), &message, &claim, &signature));

    // The verifier reconstructs the claim from its policy; a different value
    // means a different canonical form, so verification fails.
    let mut leaves = claim.leaves().to_vec();
    leaves[2].value = "dermatologist".to_string();
    let tampered_claim = ClaimPredicate::new(leaves)?;
    println!("verify(substituted claim value) = {}", verify(&tpk, authority.public_key(), &message, &tampered_claim, &signature));

    // A different message breaks the binding.
    let other_message = AccessMessage::issue("resource1", "domain2", "domain1")?;
    println!("verify(different message)      = {}", verify(&tpk, authority.public_key(), &other_message, &claim, &signature));

    // Another domain's key verifies nothing of ours.
    println!("verify(foreign authority key)  = {}", verify(&tpk, other_domain.public_key(), &message, &claim, &signature));

    // Reordered tokens no longer line up with the sorted claim leaves.
    let mut tokens = signature.leaf_tokens().to_vec();
    tokens.swap(0, 1);
    let reordered = AbsSignature::from_parts(signature.upk().clone(), tokens, signature.binding().clone());
    println!("verify(reordered tokens)       = {}", verify(&tpk, authority.public_key(), &message, &claim, &reordered));

    // Signing refuses outright when the key does not cover the claim.
    let uncovered = ClaimPredicate::new(vec![ClaimLeaf::new(Category::Subject, "position", "dermatologist")?])?;
    match sign(&tpk, authority.public_key(), &ska, &message, &uncovered) {
        Err(e) => println!("\nsigning an uncovered claim refuses: {e}"),
        Ok(_) => unreachable!("sign must refuse"),
    }
    Ok(())
}
