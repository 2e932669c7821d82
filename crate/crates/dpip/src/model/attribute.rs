use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// The four attribute categories. Ordering follows the declaration order and
/// fixes the leaf sort used by predicates and canonical serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Subject,
    Action,
    Resource,
    Environment,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Subject,
        Category::Action,
        Category::Resource,
        Category::Environment,
    ];

    /// Token used in the canonical byte form.
    pub fn canonical_token(&self) -> &'static str {
        match self {
            Category::Subject => "subject",
            Category::Action => "action",
            Category::Resource => "resource",
            Category::Environment => "environment",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_token())
    }
}

/// A categorized name-value fact about a user, action, resource, or
/// environment. `(category, name)` is the identity; values are opaque.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAttribute")]
pub struct Attribute {
    category: Category,
    name: String,
    value: String,
}

#[derive(Deserialize)]
struct RawAttribute {
    category: Category,
    name: String,
    value: String,
}

impl TryFrom<RawAttribute> for Attribute {
    type Error = ModelError;

    fn try_from(raw: RawAttribute) -> Result<Self, Self::Error> {
        Attribute::new(raw.category, raw.name, raw.value)
    }
}

impl Attribute {
    pub fn new(
        category: Category,
        name: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        let value = value.into();
        validate_name(&name)?;
        if value.is_empty() || value.chars().any(char::is_control) {
            return Err(ModelError::InvalidValue(name));
        }
        Ok(Self { category, name, value })
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self) -> &str {
        &self.value
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}={}", self.category, self.name, self.value)
    }
}

/// Names must be usable as map keys and inside the canonical byte form.
pub(super) fn validate_name(name: &str) -> Result<(), ModelError> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'));
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidName(name.to_string()))
    }
}

/// Opaque identifiers (resources, domains, users) share the value rules:
/// non-empty, no control characters, so they embed safely in canonical bytes.
pub(crate) fn validate_identifier(field: &'static str, value: &str) -> Result<(), ModelError> {
    if value.is_empty() || value.chars().any(char::is_control) {
        return Err(ModelError::InvalidIdentifier { field, value: value.to_string() });
    }
    Ok(())
}
