use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::predicate::{ClaimLeaf, ClaimPredicate, RequiredLeaf, RequiredPredicate};
use super::ModelError;

/// Injective mapping from a peer domain's attribute identities to local ones.
/// Unmapped identities pass through unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<AliasEntry>", into = "Vec<AliasEntry>")]
pub struct AliasMap {
    mapping: BTreeMap<RequiredLeaf, RequiredLeaf>,
}

/// Serialized form: one `{from, to}` pair per renamed identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AliasEntry {
    pub from: RequiredLeaf,
    pub to: RequiredLeaf,
}

impl TryFrom<Vec<AliasEntry>> for AliasMap {
    type Error = ModelError;

    fn try_from(entries: Vec<AliasEntry>) -> Result<Self, Self::Error> {
        AliasMap::new(entries.into_iter().map(|e| (e.from, e.to)))
    }
}

impl From<AliasMap> for Vec<AliasEntry> {
    fn from(map: AliasMap) -> Self {
        map.mapping
            .into_iter()
            .map(|(from, to)| AliasEntry { from, to })
            .collect()
    }
}

impl AliasMap {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build a map, rejecting duplicate sources and non-injective targets.
    pub fn new(pairs: impl IntoIterator<Item = (RequiredLeaf, RequiredLeaf)>) -> Result<Self, ModelError> {
        let mut mapping = BTreeMap::new();
        let mut targets = BTreeMap::new();
        for (from, to) in pairs {
            if targets.insert(to.clone(), ()).is_some() {
                return Err(ModelError::AliasCollision(to));
            }
            if mapping.insert(from.clone(), to).is_some() {
                return Err(ModelError::DuplicateEntry(from));
            }
        }
        Ok(Self { mapping })
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Rename one identity; identity function when unmapped.
    pub fn apply(&self, leaf: &RequiredLeaf) -> RequiredLeaf {
        self.mapping.get(leaf).cloned().unwrap_or_else(|| leaf.clone())
    }

    /// Rename every leaf of a claim predicate, preserving values.
    /// Fails if two renamed leaves collide on one identity.
    pub fn apply_claim(&self, claim: &ClaimPredicate) -> Result<ClaimPredicate, ModelError> {
        let leaves = claim
            .leaves()
            .iter()
            .map(|l| {
                let id = self.apply(&l.identity());
                ClaimLeaf { category: id.category, name: id.name, value: l.value.clone() }
            })
            .collect();
        ClaimPredicate::new(leaves).map_err(|e| match e {
            ModelError::DuplicateEntry(leaf) => ModelError::AliasCollision(leaf),
            other => other,
        })
    }
}

/// Localize a peer's required predicate and return the reverse map that
/// restores the peer's names on the way back.
///
/// The reverse map covers exactly the leaves that were renamed, so applying
/// it to the claim predicate built from local attributes yields leaves in the
/// verifier's vocabulary.
pub fn resolve_names(
    required: &RequiredPredicate,
    aliases: &AliasMap,
) -> Result<(RequiredPredicate, AliasMap), ModelError> {
    let mut localized = Vec::with_capacity(required.len());
    let mut reverse_pairs = Vec::new();
    for leaf in required.leaves() {
        let local = aliases.apply(leaf);
        if &local != leaf {
            reverse_pairs.push((local.clone(), leaf.clone()));
        }
        localized.push(local);
    }
    let localized = RequiredPredicate::new(localized).map_err(|e| match e {
        ModelError::DuplicateEntry(leaf) => ModelError::AliasCollision(leaf),
        other => other,
    })?;
    let reverse = AliasMap::new(reverse_pairs)?;
    Ok((localized, reverse))
}
