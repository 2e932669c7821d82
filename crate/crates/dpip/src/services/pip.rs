//! The policy information point: per-domain attribute store and query
//! service. Each domain runs its own; queries are scoped to a single user,
//! which is what keeps attribute pooling across users impossible.

use std::collections::BTreeMap;
use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::model::{validate_identifier, Attribute, ClaimLeaf, RequiredLeaf};

use super::store::DocumentStore;
use super::ServiceError;

/// One user's stored attributes. No two attributes share an identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawUserRecord")]
pub struct UserRecord {
    user_id: String,
    attributes: Vec<Attribute>,
}

#[derive(Deserialize)]
struct RawUserRecord {
    user_id: String,
    attributes: Vec<Attribute>,
}

impl TryFrom<RawUserRecord> for UserRecord {
    type Error = crate::model::ModelError;

    fn try_from(raw: RawUserRecord) -> Result<Self, Self::Error> {
        UserRecord::new(raw.user_id, raw.attributes)
    }
}

impl UserRecord {
    pub fn new(
        user_id: impl Into<String>,
        attributes: Vec<Attribute>,
    ) -> Result<Self, crate::model::ModelError> {
        let user_id = user_id.into();
        validate_identifier("user_id", &user_id)?;
        for (i, attr) in attributes.iter().enumerate() {
            if attributes[..i]
                .iter()
                .any(|a| a.category() == attr.category() && a.name() == attr.name())
            {
                return Err(crate::model::ModelError::DuplicateEntry(
                    ClaimLeaf::from(attr).identity(),
                ));
            }
        }
        Ok(Self { user_id, attributes })
    }

    pub fn user_id(&self) -> &str {
        &self.user_id
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }
}

/// Anything the decision point can fetch missing attributes from.
pub trait AttributeSource: Send + Sync {
    fn query(&self, user_id: &str, wanted: &[RequiredLeaf]) -> Result<Vec<Attribute>, ServiceError>;
}

pub struct Pip {
    users: DocumentStore<BTreeMap<String, UserRecord>>,
}

impl Pip {
    pub fn in_memory() -> Self {
        Self { users: DocumentStore::in_memory() }
    }

    pub fn open(path: PathBuf) -> io::Result<Self> {
        Ok(Self { users: DocumentStore::open(path)? })
    }

    /// Upsert one user's record.
    pub fn put_user(&self, record: UserRecord) -> Result<(), ServiceError> {
        self.users.write(|users| {
            users.insert(record.user_id().to_string(), record);
        })?;
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.users.read(|users| users.len())
    }

    /// The requesting user's attributes whose identities appear in `wanted`,
    /// sorted by identity. Never draws on any other user's record.
    pub fn query(
        &self,
        user_id: &str,
        wanted: &[RequiredLeaf],
    ) -> Result<Vec<Attribute>, ServiceError> {
        self.users.read(|users| {
            let record = users
                .get(user_id)
                .ok_or_else(|| ServiceError::UnknownUser(user_id.to_string()))?;
            let mut found: Vec<Attribute> = record
                .attributes()
                .iter()
                .filter(|a| {
                    wanted
                        .iter()
                        .any(|w| w.category == a.category() && w.name == a.name())
                })
                .cloned()
                .collect();
            found.sort_by(|a, b| {
                (a.category(), a.name()).cmp(&(b.category(), b.name()))
            });
            Ok(found)
        })
    }
}

impl AttributeSource for Pip {
    fn query(&self, user_id: &str, wanted: &[RequiredLeaf]) -> Result<Vec<Attribute>, ServiceError> {
        Pip::query(self, user_id, wanted)
    }
}
