use std::fmt;

use serde::{Deserialize, Serialize};

/// Machine-readable denial codes. The set is closed; wire formats and logs
/// carry the kebab-case code string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenyReason {
    MissingAttribute,
    ValueMismatch,
    BadSignature,
    ExpiredChallenge,
    UnknownResource,
    UnknownPeer,
}

impl DenyReason {
    pub fn code(&self) -> &'static str {
        match self {
            DenyReason::MissingAttribute => "missing-attribute",
            DenyReason::ValueMismatch => "value-mismatch",
            DenyReason::BadSignature => "bad-signature",
            DenyReason::ExpiredChallenge => "expired-challenge",
            DenyReason::UnknownResource => "unknown-resource",
            DenyReason::UnknownPeer => "unknown-peer",
        }
    }
}

impl fmt::Display for DenyReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Outcome of an access decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Permit,
    Deny(DenyReason),
}

impl Decision {
    pub fn is_permit(&self) -> bool {
        matches!(self, Decision::Permit)
    }

    /// `"ok"` for permits, the denial code otherwise.
    pub fn reason_code(&self) -> &'static str {
        match self {
            Decision::Permit => "ok",
            Decision::Deny(reason) => reason.code(),
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Permit => f.write_str("permit"),
            Decision::Deny(reason) => write!(f, "deny ({reason})"),
        }
    }
}
