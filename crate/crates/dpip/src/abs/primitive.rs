//! The underlying digital-signature primitive (Ed25519) behind small
//! newtypes, so the rest of the scheme never touches curve internals.

use std::fmt;

use ed25519_dalek::{Signer as _, Verifier as _};
use rand::rngs::OsRng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::encoding::CodecError;

pub const PUBLIC_KEY_LEN: usize = 32;
pub const SIGNATURE_LEN: usize = 64;
/// Scheme identifier embedded in key encodings.
pub const SCHEME_ID: &str = "ed25519";

/// Public verification key.
#[derive(Clone, PartialEq, Eq)]
pub struct PublicKey(ed25519_dalek::VerifyingKey);

/// Secret signing key. Never serialized implicitly; the key cache persists
/// it deliberately via [`SecretKey::to_bytes`].
#[derive(Clone)]
pub struct SecretKey(ed25519_dalek::SigningKey);

/// Detached signature.
#[derive(Clone, PartialEq, Eq)]
pub struct Signature(ed25519_dalek::Signature);

/// Fresh keypair from OS randomness.
pub fn generate_keypair() -> (SecretKey, PublicKey) {
    let signing = ed25519_dalek::SigningKey::generate(&mut OsRng);
    let public = PublicKey(signing.verifying_key());
    (SecretKey(signing), public)
}

impl SecretKey {
    pub fn sign(&self, message: &[u8]) -> Signature {
        Signature(self.0.sign(message))
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey(self.0.verifying_key())
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let arr: [u8; 32] = bytes.try_into().map_err(|_| CodecError::BadLength {
            what: "secret key",
            expected: 32,
            got: bytes.len(),
        })?;
        Ok(Self(ed25519_dalek::SigningKey::from_bytes(&arr)))
    }
}

impl PublicKey {
    /// True iff `signature` is valid for `message` under this key.
    pub fn verify(&self, message: &[u8], signature: &Signature) -> bool {
        self.0.verify(message, &signature.0).is_ok()
    }

    pub fn to_bytes(&self) -> [u8; PUBLIC_KEY_LEN] {
        self.0.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let arr: [u8; PUBLIC_KEY_LEN] = bytes.try_into().map_err(|_| CodecError::BadLength {
            what: "public key",
            expected: PUBLIC_KEY_LEN,
            got: bytes.len(),
        })?;
        let key = ed25519_dalek::VerifyingKey::from_bytes(&arr)
            .map_err(|_| CodecError::InvalidKey)?;
        Ok(Self(key))
    }
}

impl Signature {
    pub fn to_bytes(&self) -> [u8; SIGNATURE_LEN] {
        self.0.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let arr: [u8; SIGNATURE_LEN] = bytes.try_into().map_err(|_| CodecError::BadLength {
            what: "signature",
            expected: SIGNATURE_LEN,
            got: bytes.len(),
        })?;
        Ok(Self(ed25519_dalek::Signature::from_bytes(&arr)))
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({})", hex::encode(&self.to_bytes()[..8]))
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(redacted)")
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({})", hex::encode(&self.to_bytes()[..8]))
    }
}

// Keys and signatures serialize as base64 text inside JSON documents.

fn serialize_b64<S: Serializer>(bytes: &[u8], serializer: S) -> Result<S::Ok, S::Error> {
    use base64::Engine as _;
    serializer.serialize_str(&base64::engine::general_purpose::STANDARD.encode(bytes))
}

fn deserialize_b64<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<u8>, D::Error> {
    use base64::Engine as _;
    use serde::de::Error as _;
    let text = String::deserialize(deserializer)?;
    base64::engine::general_purpose::STANDARD
        .decode(text)
        .map_err(D::Error::custom)
}

macro_rules! b64_serde {
    ($ty:ty, $what:literal) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serialize_b64(&self.to_bytes(), serializer)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                use serde::de::Error as _;
                let bytes = deserialize_b64(deserializer)?;
                <$ty>::from_bytes(&bytes).map_err(D::Error::custom)
            }
        }
    };
}

b64_serde!(PublicKey, "public key");
b64_serde!(SecretKey, "secret key");
b64_serde!(Signature, "signature");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_verify_self_test() {
        let (sk, pk) = generate_keypair();
        let sig = sk.sign(b"message");
        assert!(pk.verify(b"message", &sig));
        assert!(!pk.verify(b"other", &sig));
    }

    #[test]
    fn distinct_keypairs() {
        let (_, a) = generate_keypair();
        let (_, b) = generate_keypair();
        assert_ne!(a, b);
    }

    #[test]
    fn byte_round_trips() {
        let (sk, pk) = generate_keypair();
        let sig = sk.sign(b"x");
        assert_eq!(PublicKey::from_bytes(&pk.to_bytes()).unwrap(), pk);
        assert_eq!(Signature::from_bytes(&sig.to_bytes()).unwrap(), sig);
        let sk2 = SecretKey::from_bytes(&sk.to_bytes()).unwrap();
        assert_eq!(sk2.public_key(), pk);
    }

    #[test]
    fn serde_is_base64_text() {
        let (_, pk) = generate_keypair();
        let json = serde_json::to_string(&pk).unwrap();
        assert!(json.starts_with('"'));
        let back: PublicKey = serde_json::from_str(&json).unwrap();
        assert_eq!(back, pk);
    }
}
