use std::time::{SystemTime, UNIX_EPOCH};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::attribute::validate_identifier;
use super::ModelError;

/// The message a requester signs for one access attempt. It binds the
/// signature to one resource, one peer pair, and one challenge nonce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAccessMessage")]
pub struct AccessMessage {
    resource_id: String,
    requester_domain: String,
    verifier_domain: String,
    /// 128-bit random value, 32 lowercase hex characters.
    nonce: String,
    /// UTC timestamp, seconds precision.
    issued_at: u64,
}

#[derive(Deserialize)]
struct RawAccessMessage {
    resource_id: String,
    requester_domain: String,
    verifier_domain: String,
    nonce: String,
    issued_at: u64,
}

impl TryFrom<RawAccessMessage> for AccessMessage {
    type Error = ModelError;

    fn try_from(raw: RawAccessMessage) -> Result<Self, Self::Error> {
        AccessMessage::new(
            raw.resource_id,
            raw.requester_domain,
            raw.verifier_domain,
            raw.nonce,
            raw.issued_at,
        )
    }
}

impl AccessMessage {
    pub fn new(
        resource_id: impl Into<String>,
        requester_domain: impl Into<String>,
        verifier_domain: impl Into<String>,
        nonce: impl Into<String>,
        issued_at: u64,
    ) -> Result<Self, ModelError> {
        let resource_id = resource_id.into();
        let requester_domain = requester_domain.into();
        let verifier_domain = verifier_domain.into();
        let nonce = nonce.into();
        validate_identifier("resource_id", &resource_id)?;
        validate_identifier("requester_domain", &requester_domain)?;
        validate_identifier("verifier_domain", &verifier_domain)?;
        let nonce_ok = nonce.len() == 32
            && nonce.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase());
        if !nonce_ok {
            return Err(ModelError::InvalidNonce(nonce));
        }
        Ok(Self { resource_id, requester_domain, verifier_domain, nonce, issued_at })
    }

    /// Build a message with a fresh random nonce and the current time.
    pub fn issue(
        resource_id: impl Into<String>,
        requester_domain: impl Into<String>,
        verifier_domain: impl Into<String>,
    ) -> Result<Self, ModelError> {
        Self::new(resource_id, requester_domain, verifier_domain, fresh_nonce(), unix_now())
    }

    pub fn resource_id(&self) -> &str {
        &self.resource_id
    }

    pub fn requester_domain(&self) -> &str {
        &self.requester_domain
    }

    pub fn verifier_domain(&self) -> &str {
        &self.verifier_domain
    }

    pub fn nonce(&self) -> &str {
        &self.nonce
    }

    pub fn issued_at(&self) -> u64 {
        self.issued_at
    }
}

/// 128 bits of OS randomness as lowercase hex.
pub(crate) fn fresh_nonce() -> String {
    let mut bytes = [0u8; 16];
    rand::rngs::OsRng.fill_bytes(&mut bytes);
    hex::encode(bytes)
}

pub(crate) fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .expect("system clock before 1970")
        .as_secs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn issue_produces_unique_valid_nonces() {
        let a = AccessMessage::issue("r", "d2", "d1").unwrap();
        let b = AccessMessage::issue("r", "d2", "d1").unwrap();
        assert_ne!(a.nonce(), b.nonce());
        assert_eq!(a.nonce().len(), 32);
    }

    #[test]
    fn rejects_malformed_nonces() {
        for nonce in ["", "abc", "ZZfa0c2e9b1d4f60a7b8c9d0e1f2a3b4", "fa0c2e9b1d4f60a7b8c9d0e1f2a3b4"] {
            assert!(AccessMessage::new("r", "d2", "d1", nonce, 0).is_err());
        }
        assert!(AccessMessage::new("r", "d2", "d1", "fa0c2e9b1d4f60a7b8c9d0e1f2a3b455", 0).is_ok());
    }

    #[test]
    fn serde_round_trip() {
        let m = AccessMessage::issue("resource1", "domain2", "domain1").unwrap();
        let back: AccessMessage = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(m, back);
    }
}
