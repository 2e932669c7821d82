use super::predicate::{ClaimLeaf, ClaimPredicate, RequiredPredicate};
use super::AccessMessage;

/// Field separator inside one record.
pub const FIELD_SEP: u8 = 0x1f;
/// Record terminator; also closes the type header.
pub const RECORD_SEP: u8 = 0x1e;

/// Deterministic byte form used as signing input and cache key.
///
/// Layout: one type-tag byte and a record separator, then one record per
/// leaf (or field group) with fields joined by `0x1f` and terminated by
/// `0x1e`. Leaves are emitted in their sorted order, all text as UTF-8, no
/// whitespace added. Since names exclude separators by charset and values,
/// identifiers, and nonces exclude control characters, the encoding is
/// injective per type. The full layout is documented in `docs/wire-format.md`.
pub trait CanonicalBytes {
    /// Type tag, first byte of the encoding.
    const TYPE_TAG: u8;

    fn canonical_bytes(&self) -> Vec<u8>;
}

fn header(tag: u8, capacity: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(capacity + 2);
    out.push(tag);
    out.push(RECORD_SEP);
    out
}

fn push_record<'a>(out: &mut Vec<u8>, fields: impl IntoIterator<Item = &'a str>) {
    for (i, field) in fields.into_iter().enumerate() {
        if i > 0 {
            out.push(FIELD_SEP);
        }
        out.extend_from_slice(field.as_bytes());
    }
    out.push(RECORD_SEP);
}

impl CanonicalBytes for RequiredPredicate {
    const TYPE_TAG: u8 = b'R';

    fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = header(Self::TYPE_TAG, self.leaves.len() * 24);
        for leaf in &self.leaves {
            push_record(&mut out, [leaf.category.canonical_token(), leaf.name.as_str()]);
        }
        out
    }
}

impl CanonicalBytes for ClaimPredicate {
    const TYPE_TAG: u8 = b'C';

    fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = header(Self::TYPE_TAG, self.leaves.len() * 32);
        for leaf in &self.leaves {
            out.extend_from_slice(&canonical_claim_leaf(leaf));
        }
        out
    }
}

impl CanonicalBytes for AccessMessage {
    const TYPE_TAG: u8 = b'M';

    fn canonical_bytes(&self) -> Vec<u8> {
        let issued = self.issued_at().to_string();
        let mut out = header(Self::TYPE_TAG, 64);
        push_record(
            &mut out,
            [
                self.resource_id(),
                self.requester_domain(),
                self.verifier_domain(),
                self.nonce(),
                issued.as_str(),
            ],
        );
        out
    }
}

/// Canonical record of a single claim leaf: `category 0x1f name 0x1f value 0x1e`.
/// This is the per-attribute unit credential tokens are computed over.
pub fn canonical_claim_leaf(leaf: &ClaimLeaf) -> Vec<u8> {
    let mut out = Vec::with_capacity(
        leaf.category.canonical_token().len() + leaf.name.len() + leaf.value.len() + 3,
    );
    push_record(
        &mut out,
        [leaf.category.canonical_token(), leaf.name.as_str(), leaf.value.as_str()],
    );
    out
}
