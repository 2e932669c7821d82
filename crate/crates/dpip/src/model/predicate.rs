use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::attribute::validate_name;
use super::{Attribute, Category, ModelError};

/// One conjunct of a required predicate: an attribute identity without a value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRequiredLeaf")]
pub struct RequiredLeaf {
    pub category: Category,
    pub name: String,
}

#[derive(Deserialize)]
struct RawRequiredLeaf {
    category: Category,
    name: String,
}

impl TryFrom<RawRequiredLeaf> for RequiredLeaf {
    type Error = ModelError;

    fn try_from(raw: RawRequiredLeaf) -> Result<Self, Self::Error> {
        RequiredLeaf::new(raw.category, raw.name)
    }
}

impl RequiredLeaf {
    pub fn new(category: Category, name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        validate_name(&name)?;
        Ok(Self { category, name })
    }
}

impl fmt::Display for RequiredLeaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.category, self.name)
    }
}

/// One conjunct of a claim predicate: an attribute identity plus the value
/// the signature attests.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawClaimLeaf")]
pub struct ClaimLeaf {
    pub category: Category,
    pub name: String,
    pub value: String,
}

#[derive(Deserialize)]
struct RawClaimLeaf {
    category: Category,
    name: String,
    value: String,
}

impl TryFrom<RawClaimLeaf> for ClaimLeaf {
    type Error = ModelError;

    fn try_from(raw: RawClaimLeaf) -> Result<Self, Self::Error> {
        ClaimLeaf::new(raw.category, raw.name, raw.value)
    }
}

impl ClaimLeaf {
    pub fn new(
        category: Category,
        name: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let attr = Attribute::new(category, name, value)?;
        Ok(Self::from(&attr))
    }

    pub fn identity(&self) -> RequiredLeaf {
        RequiredLeaf { category: self.category, name: self.name.clone() }
    }
}

impl From<&Attribute> for ClaimLeaf {
    fn from(attr: &Attribute) -> Self {
        Self {
            category: attr.category(),
            name: attr.name().to_string(),
            value: attr.value().to_string(),
        }
    }
}

impl fmt::Display for ClaimLeaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}={}", self.category, self.name, self.value)
    }
}

/// Conjunction of attribute names a verifier demands. Leaves are kept sorted
/// by `(category, name)` and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RequiredPredicate {
    pub(super) leaves: Vec<RequiredLeaf>,
}

impl RequiredPredicate {
    pub fn new(mut leaves: Vec<RequiredLeaf>) -> Result<Self, ModelError> {
        leaves.sort();
        if let Some(dup) = adjacent_duplicate(&leaves, |l| l.clone()) {
            return Err(ModelError::DuplicateEntry(dup));
        }
        Ok(Self { leaves })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn leaves(&self) -> &[RequiredLeaf] {
        &self.leaves
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }
}

/// Conjunction of attribute name-value pairs a signature attests. Leaves are
/// kept sorted by `(category, name)` with unique identities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ClaimPredicate {
    pub(super) leaves: Vec<ClaimLeaf>,
}

impl ClaimPredicate {
    pub fn new(mut leaves: Vec<ClaimLeaf>) -> Result<Self, ModelError> {
        leaves.sort_by(|a, b| (a.category, a.name.as_str()).cmp(&(b.category, b.name.as_str())));
        if let Some(dup) = adjacent_duplicate(&leaves, ClaimLeaf::identity) {
            return Err(ModelError::DuplicateEntry(dup));
        }
        Ok(Self { leaves })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn leaves(&self) -> &[ClaimLeaf] {
        &self.leaves
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    /// The identities of all leaves, i.e. the claim with values dropped.
    pub fn identities(&self) -> RequiredPredicate {
        // Sorted and unique already; reuse the invariant.
        RequiredPredicate { leaves: self.leaves.iter().map(ClaimLeaf::identity).collect() }
    }
}

fn adjacent_duplicate<T, K: PartialEq>(
    sorted: &[T],
    key: impl Fn(&T) -> K,
) -> Option<K> {
    sorted.windows(2).find_map(|w| {
        let (a, b) = (key(&w[0]), key(&w[1]));
        (a == b).then_some(a)
    })
}

/// Fill a required predicate with values drawn from `attrs`.
///
/// Every leaf must be matched by an attribute with the same `(category,
/// name)`; the first match in list order supplies the value. Unfilled leaves
/// are reported together so the caller can fetch or surface all of them at
/// once.
pub fn build_claim_predicate(
    required: &RequiredPredicate,
    attrs: &[Attribute],
) -> Result<ClaimPredicate, ModelError> {
    let mut leaves = Vec::with_capacity(required.len());
    let mut missing = Vec::new();
    for leaf in required.leaves() {
        match attrs
            .iter()
            .find(|a| a.category() == leaf.category && a.name() == leaf.name)
        {
            Some(attr) => leaves.push(ClaimLeaf::from(attr)),
            None => missing.push(leaf.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(ModelError::MissingAttributes(missing));
    }
    Ok(ClaimPredicate { leaves })
}

// Predicates serialize as bare leaf arrays; construction re-validates.

impl Serialize for RequiredPredicate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.leaves.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RequiredPredicate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let leaves = Vec::<RequiredLeaf>::deserialize(deserializer)?;
        RequiredPredicate::new(leaves).map_err(D::Error::custom)
    }
}

impl Serialize for ClaimPredicate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.leaves.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClaimPredicate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let leaves = Vec::<ClaimLeaf>::deserialize(deserializer)?;
        ClaimPredicate::new(leaves).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(category: Category, name: &str) -> RequiredLeaf {
        RequiredLeaf::new(category, name).unwrap()
    }

    #[test]
    fn required_predicate_sorts_and_rejects_duplicates() {
        let p = RequiredPredicate::new(vec![
            leaf(Category::Environment, "city"),
            leaf(Category::Subject, "position"),
            leaf(Category::Subject, "first_name"),
        ])
        .unwrap();
        let names: Vec<_> = p.leaves().iter().map(|l| (l.category, l.name.as_str())).collect();
        assert_eq!(
            names,
            vec![
                (Category::Subject, "first_name"),
                (Category::Subject, "position"),
                (Category::Environment, "city"),
            ]
        );

        let dup = RequiredPredicate::new(vec![
            leaf(Category::Subject, "city"),
            leaf(Category::Subject, "city"),
        ]);
        assert!(matches!(dup, Err(ModelError::DuplicateEntry(_))));
    }

    #[test]
    fn same_name_in_two_categories_is_two_leaves() {
        let p = RequiredPredicate::new(vec![
            leaf(Category::Subject, "name"),
            leaf(Category::Resource, "name"),
        ])
        .unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn claim_predicate_rejects_duplicate_identity_even_with_distinct_values() {
        let dup = ClaimPredicate::new(vec![
            ClaimLeaf::new(Category::Subject, "n", "a").unwrap(),
            ClaimLeaf::new(Category::Subject, "n", "b").unwrap(),
        ]);
        assert!(matches!(dup, Err(ModelError::DuplicateEntry(_))));
    }

    #[test]
    fn build_fills_values_in_required_order() {
        let required = RequiredPredicate::new(vec![
            leaf(Category::Subject, "first_name"),
            leaf(Category::Environment, "city"),
        ])
        .unwrap();
        let attrs = vec![
            Attribute::new(Category::Environment, "city", "Melbourne").unwrap(),
            Attribute::new(Category::Subject, "first_name", "Alice").unwrap(),
        ];
        let claim = build_claim_predicate(&required, &attrs).unwrap();
        assert_eq!(claim.leaves()[0].value, "Alice");
        assert_eq!(claim.leaves()[1].value, "Melbourne");
    }

    #[test]
    fn build_reports_every_unfilled_leaf() {
        let required = RequiredPredicate::new(vec![
            leaf(Category::Subject, "a"),
            leaf(Category::Subject, "b"),
            leaf(Category::Subject, "c"),
        ])
        .unwrap();
        let attrs = vec![
            Attribute::new(Category::Subject, "a", "1").unwrap(),
            Attribute::new(Category::Subject, "c", "3").unwrap(),
        ];
        // Independent oracle: the set difference of identities.
        let expected_missing = vec![leaf(Category::Subject, "b")];
        match build_claim_predicate(&required, &attrs) {
            Err(ModelError::MissingAttributes(missing)) => assert_eq!(missing, expected_missing),
            other => panic!("expected missing-attribute error, got {other:?}"),
        }
    }

    #[test]
    fn build_on_empty_required_ignores_attrs() {
        let claim = build_claim_predicate(
            &RequiredPredicate::empty(),
            &[Attribute::new(Category::Subject, "x", "y").unwrap()],
        )
        .unwrap();
        assert!(claim.is_empty());
    }

    #[test]
    fn wire_shape_is_a_bare_leaf_array() {
        let p = RequiredPredicate::new(vec![leaf(Category::Subject, "first_name")]).unwrap();
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"[{"category":"subject","name":"first_name"}]"#
        );
        // Deserialization re-sorts and re-validates.
        let back: RequiredPredicate =
            serde_json::from_str(r#"[{"category":"environment","name":"z"},{"category":"subject","name":"a"}]"#)
                .unwrap();
        assert_eq!(back.leaves()[0].name, "a");
        let dup: Result<RequiredPredicate, _> =
            serde_json::from_str(r#"[{"category":"subject","name":"a"},{"category":"subject","name":"a"}]"#);
        assert!(dup.is_err());
    }
}
