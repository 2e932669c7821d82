//! JSON bodies of the wire protocol. Shapes here are the compatibility
//! surface; see `docs/wire-format.md`.

use serde::{Deserialize, Serialize};

use crate::model::{AccessMessage, DenyReason, RequiredLeaf};

pub const DECISION_PERMIT: &str = "permit";
pub const DECISION_DENY: &str = "deny";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitiateRequest {
    pub resource_id: String,
    pub requester_domain: String,
}

/// Either an immediate permit with content, or a challenge. The two shapes
/// share no required fields, so the untagged representation is unambiguous.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitiateResponse {
    Permit {
        decision: String,
        content_b64: String,
    },
    Challenge {
        challenge_id: String,
        required: Vec<RequiredLeaf>,
        message: AccessMessage,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompleteRequest {
    pub challenge_id: String,
    /// Base64 of the binary submission encoding.
    pub signature_b64: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompleteResponse {
    pub decision: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<DenyReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub content_b64: Option<String>,
    /// Verifier-reported seconds spent in pure signature verification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TpkResponse {
    pub tpk_b64: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApkResponse {
    pub domain_id: String,
    pub apk_b64: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdminResourceRequest {
    pub resource_id: String,
    pub display_name: String,
    pub content_b64: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PutOk {
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

pub(crate) fn b64_encode(bytes: &[u8]) -> String {
    use base64::Engine as _;
    base64::engine::general_purpose::STANDARD.encode(bytes)
}

pub(crate) fn b64_decode(text: &str) -> Result<Vec<u8>, base64::DecodeError> {
    use base64::Engine as _;
    base64::engine::general_purpose::STANDARD.decode(text)
}

#[cfg(test)]
mod tests {
    use crate::model::Category;

    use super::*;

    #[test]
    fn initiate_response_shapes_are_distinguishable() {
        let permit = serde_json::to_string(&InitiateResponse::Permit {
            decision: DECISION_PERMIT.to_string(),
            content_b64: b64_encode(b"data"),
        })
        .unwrap();
        assert!(matches!(
            serde_json::from_str::<InitiateResponse>(&permit).unwrap(),
            InitiateResponse::Permit { .. }
        ));

        let challenge = serde_json::to_string(&InitiateResponse::Challenge {
            challenge_id: "c".repeat(32),
            required: vec![RequiredLeaf::new(Category::Subject, "first_name").unwrap()],
            message: AccessMessage::issue("r1", "domain2", "domain1").unwrap(),
        })
        .unwrap();
        assert!(matches!(
            serde_json::from_str::<InitiateResponse>(&challenge).unwrap(),
            InitiateResponse::Challenge { .. }
        ));
    }

    #[test]
    fn deny_reason_serializes_as_code() {
        let body = CompleteResponse {
            decision: DECISION_DENY.to_string(),
            reason: Some(DenyReason::BadSignature),
            content_b64: None,
            verify_s: None,
        };
        assert_eq!(
            serde_json::to_string(&body).unwrap(),
            r#"{"decision":"deny","reason":"bad-signature"}"#
        );
    }
}
