//! The two access methods side by side: fresh keys on every request versus
//! bundles stored under the canonical claim predicate.
//!
//! ```bash
//! cargo run --release --example key_cache_modes
//! ```

use std::time::Instant;

use dpip::abs::{ts_setup, CacheMode, DomainAuthority, KeyCache};
use dpip::model::{Attribute, Category, ClaimLeaf, ClaimPredicate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tpk = ts_setup("fed1")?;
    let authority = DomainAuthority::create(tpk, "domain2")?;

    let attrs: Vec<Attribute> = (0..8)
        .map(|i| Attribute::new(Category::Subject, format!("attr{i}"), format!("value{i}")))
        .collect::<Result<_, _>>()?;
    let claim = ClaimPredicate::new(attrs.iter().map(ClaimLeaf::from).collect())?;

    let fresh = KeyCache::in_memory(CacheMode::Fresh);
    let cached = KeyCache::in_memory(CacheMode::Cached);

    println!("8-attribute predicate, 5 requests per method\n");
    println!("fresh keys per request:");
    for i in 0..5 {
        let started = Instant::now();
        let (bundle, timings) = fresh.get_or_create(&authority, &attrs, &claim)?;
        println!(
            "  request {i}: {:>9.1?}  asetup {:?} attrgen {:?}  apk {:?}",
            started.elapsed(),
            timings.asetup_s.map(ms),
            timings.attrgen_s.map(ms),
            bundle.authority.public_key(),
        );
    }

    println!("\nstored keys per predicate:");
    for i in 0..5 {
        let started = Instant::now();
        let (bundle, timings) = cached.get_or_create(&authority, &attrs, &claim)?;
        println!(
            "  request {i}: {:>9.1?}  asetup {:?} attrgen {:?}  apk {:?}",
            started.elapsed(),
            timings.asetup_s.map(ms),
            timings.attrgen_s.map(ms),
            bundle.authority.public_key(),
        );
    }
    println!("\nfresh mode mints a new authority key every time; cached mode returns");
    println!("the same bundle after the first request and skips key generation.");
    Ok(())
}

fn ms(seconds: f64) -> String {
    format!("{:.3}ms", seconds * 1e3)
}
