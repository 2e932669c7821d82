//! The policy administration point: resource records, their policies, and
//! the admin gate in front of every mutation.

use std::collections::BTreeMap;
use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{validate_identifier, ModelError, Policy};

use super::store::DocumentStore;
use super::ServiceError;

/// A stored resource. `protected` is derived: true iff a non-empty policy is
/// on file for the resource.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawResourceRecord")]
pub struct ResourceRecord {
    resource_id: String,
    display_name: String,
    #[serde(with = "content_b64")]
    content: Vec<u8>,
    protected: bool,
}

#[derive(Deserialize)]
struct RawResourceRecord {
    resource_id: String,
    display_name: String,
    #[serde(with = "content_b64")]
    content: Vec<u8>,
    #[serde(default)]
    protected: bool,
}

impl TryFrom<RawResourceRecord> for ResourceRecord {
    type Error = ModelError;

    fn try_from(raw: RawResourceRecord) -> Result<Self, Self::Error> {
        let mut record = ResourceRecord::new(raw.resource_id, raw.display_name, raw.content)?;
        record.protected = raw.protected;
        Ok(record)
    }
}

mod content_b64 {
    use base64::Engine as _;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&base64::engine::general_purpose::STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        base64::engine::general_purpose::STANDARD.decode(text).map_err(D::Error::custom)
    }
}

impl ResourceRecord {
    pub fn new(
        resource_id: impl Into<String>,
        display_name: impl Into<String>,
        content: Vec<u8>,
    ) -> Result<Self, ModelError> {
        let resource_id = resource_id.into();
        let display_name = display_name.into();
        validate_identifier("resource_id", &resource_id)?;
        validate_identifier("display_name", &display_name)?;
        Ok(Self { resource_id, display_name, content, protected: false })
    }

    pub fn resource_id(&self) -> &str {
        &self.resource_id
    }

    pub fn display_name(&self) -> &str {
        &self.display_name
    }

    pub fn content(&self) -> &[u8] {
        &self.content
    }

    pub fn protected(&self) -> bool {
        self.protected
    }
}

/// Listing row: names and ids only, never content or policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceName {
    pub resource_id: String,
    pub display_name: String,
}

/// Bearer secret gating every mutating administration operation.
#[derive(Clone)]
pub struct AdminToken(String);

impl AdminToken {
    pub fn new(secret: impl Into<String>) -> Self {
        Self(secret.into())
    }

    /// Digest comparison so equality cost does not depend on where the
    /// candidate diverges.
    pub fn matches(&self, candidate: &str) -> bool {
        Sha256::digest(self.0.as_bytes()) == Sha256::digest(candidate.as_bytes())
    }
}

impl std::fmt::Debug for AdminToken {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("AdminToken(redacted)")
    }
}

pub struct Pap {
    resources: DocumentStore<BTreeMap<String, ResourceRecord>>,
    policies: DocumentStore<BTreeMap<String, Policy>>,
    admin: AdminToken,
}

impl Pap {
    pub fn in_memory(admin: AdminToken) -> Self {
        Self {
            resources: DocumentStore::in_memory(),
            policies: DocumentStore::in_memory(),
            admin,
        }
    }

    pub fn open(resources: PathBuf, policies: PathBuf, admin: AdminToken) -> io::Result<Self> {
        Ok(Self {
            resources: DocumentStore::open(resources)?,
            policies: DocumentStore::open(policies)?,
            admin,
        })
    }

    fn authorize(&self, token: &str) -> Result<(), ServiceError> {
        if self.admin.matches(token) {
            Ok(())
        } else {
            Err(ServiceError::AuthFailure)
        }
    }

    /// Upsert a resource. The protected flag is recomputed from the policy
    /// store, never taken from the caller.
    pub fn put_resource(&self, token: &str, record: ResourceRecord) -> Result<String, ServiceError> {
        self.authorize(token)?;
        let id = record.resource_id().to_string();
        let protected = self
            .policies
            .read(|p| p.get(&id).map(|policy| !policy.is_empty()).unwrap_or(false));
        self.resources.write(|resources| {
            let mut record = record;
            record.protected = protected;
            resources.insert(id.clone(), record);
        })?;
        Ok(id)
    }

    /// Upsert the policy for an existing resource. An empty policy removes
    /// protection, matching the rule that an empty entry list means the
    /// resource is unprotected.
    pub fn put_policy(&self, token: &str, policy: Policy) -> Result<(), ServiceError> {
        self.authorize(token)?;
        let id = policy.resource_id().to_string();
        let exists = self.resources.read(|r| r.contains_key(&id));
        if !exists {
            return Err(ServiceError::UnknownResource(id));
        }
        let protect = !policy.is_empty();
        self.policies.write(|policies| {
            if protect {
                policies.insert(id.clone(), policy);
            } else {
                policies.remove(&id);
            }
        })?;
        self.resources.write(|resources| {
            if let Some(record) = resources.get_mut(&id) {
                record.protected = protect;
            }
        })?;
        Ok(())
    }

    /// The policy protecting a resource; `None` when the resource is
    /// unprotected.
    pub fn get_policy(&self, resource_id: &str) -> Option<Policy> {
        self.policies.read(|p| p.get(resource_id).cloned())
    }

    pub fn get_resource(&self, resource_id: &str) -> Option<ResourceRecord> {
        self.resources.read(|r| r.get(resource_id).cloned())
    }

    pub fn has_resource(&self, resource_id: &str) -> bool {
        self.resources.read(|r| r.contains_key(resource_id))
    }

    /// Names and ids only; content and policies never leave this store
    /// through the listing.
    pub fn list_resource_names(&self) -> Vec<ResourceName> {
        self.resources.read(|resources| {
            resources
                .values()
                .map(|r| ResourceName {
                    resource_id: r.resource_id().to_string(),
                    display_name: r.display_name().to_string(),
                })
                .collect()
        })
    }

    /// Every policy value string in the store; used by leakage scans.
    pub fn all_policy_values(&self) -> Vec<String> {
        self.policies.read(|policies| {
            policies
                .values()
                .flat_map(|p| p.entries().iter().map(|e| e.value().to_string()))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::model::{Attribute, Category};

    use super::*;

    const TOKEN: &str = "secret";

    fn pap() -> Pap {
        Pap::in_memory(AdminToken::new(TOKEN))
    }

    fn policy(resource_id: &str) -> Policy {
        Policy::new(
            resource_id,
            vec![Attribute::new(Category::Subject, "role", "doctor").unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn put_then_get_policy_round_trips() {
        let pap = pap();
        pap.put_resource(TOKEN, ResourceRecord::new("r1", "Resource 1", b"data".to_vec()).unwrap())
            .unwrap();
        pap.put_policy(TOKEN, policy("r1")).unwrap();
        assert_eq!(pap.get_policy("r1").unwrap(), policy("r1"));
        assert!(pap.get_resource("r1").unwrap().protected());
    }

    #[test]
    fn bad_token_is_rejected_and_stores_stay_untouched() {
        let dir = tempfile::tempdir().unwrap();
        let (res_path, pol_path) = (dir.path().join("resources.json"), dir.path().join("policies.json"));
        let pap = Pap::open(res_path.clone(), pol_path.clone(), AdminToken::new(TOKEN)).unwrap();
        pap.put_resource(TOKEN, ResourceRecord::new("r1", "Resource 1", vec![]).unwrap())
            .unwrap();
        let before_res = std::fs::read(&res_path).unwrap();
        let before_pol = std::fs::read(&pol_path).ok();

        assert!(matches!(
            pap.put_resource("wrong", ResourceRecord::new("r2", "R2", vec![]).unwrap()),
            Err(ServiceError::AuthFailure)
        ));
        assert!(matches!(
            pap.put_policy("wrong", policy("r1")),
            Err(ServiceError::AuthFailure)
        ));

        assert_eq!(std::fs::read(&res_path).unwrap(), before_res);
        assert_eq!(std::fs::read(&pol_path).ok(), before_pol);
        assert!(pap.get_resource("r2").is_none());
    }

    #[test]
    fn policy_for_missing_resource_is_unknown_resource() {
        let pap = pap();
        assert!(matches!(
            pap.put_policy(TOKEN, policy("ghost")),
            Err(ServiceError::UnknownResource(_))
        ));
    }

    #[test]
    fn resource_without_policy_is_unprotected() {
        let pap = pap();
        pap.put_resource(TOKEN, ResourceRecord::new("r1", "Resource 1", vec![1]).unwrap())
            .unwrap();
        assert!(pap.get_policy("r1").is_none());
        assert!(!pap.get_resource("r1").unwrap().protected());
    }

    #[test]
    fn empty_policy_drops_protection() {
        let pap = pap();
        pap.put_resource(TOKEN, ResourceRecord::new("r1", "Resource 1", vec![]).unwrap())
            .unwrap();
        pap.put_policy(TOKEN, policy("r1")).unwrap();
        assert!(pap.get_resource("r1").unwrap().protected());

        pap.put_policy(TOKEN, Policy::new("r1", vec![]).unwrap()).unwrap();
        assert!(pap.get_policy("r1").is_none());
        assert!(!pap.get_resource("r1").unwrap().protected());
    }

    #[test]
    fn reupserting_a_resource_keeps_its_protection() {
        let pap = pap();
        pap.put_resource(TOKEN, ResourceRecord::new("r1", "Resource 1", vec![]).unwrap())
            .unwrap();
        pap.put_policy(TOKEN, policy("r1")).unwrap();
        pap.put_resource(TOKEN, ResourceRecord::new("r1", "Renamed", vec![9]).unwrap())
            .unwrap();
        assert!(pap.get_resource("r1").unwrap().protected());
    }

    #[test]
    fn listing_has_names_only_and_ignores_policies() {
        let pap = pap();
        for (id, name, content) in [
            ("r1", "One", b"alpha".to_vec()),
            ("r2", "Two", b"beta".to_vec()),
            ("r3", "Three", b"gamma".to_vec()),
        ] {
            pap.put_resource(TOKEN, ResourceRecord::new(id, name, content).unwrap()).unwrap();
        }
        let before = pap.list_resource_names();
        assert_eq!(before.len(), 3);

        // Serialized listing carries no content bytes.
        let json = serde_json::to_string(&before).unwrap();
        for secret in ["alpha", "beta", "gamma"] {
            assert!(!json.contains(secret));
        }

        // Adding a policy changes nothing in the listing.
        pap.put_policy(TOKEN, policy("r2")).unwrap();
        assert_eq!(pap.list_resource_names(), before);
    }

    #[test]
    fn empty_store_lists_nothing() {
        assert!(pap().list_resource_names().is_empty());
    }
}
