//! Domain configuration: one TOML file per domain, plus the federation
//! trustee-key file it points at. Relative paths resolve against the config
//! file's directory. The admin token can be overridden with the
//! `DPIP_ADMIN_TOKEN` environment variable.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abs::{encoding, CacheMode, TrusteePublicKey};
use crate::federation::{Domain, DomainSetup, FederationError};
use crate::model::{AliasEntry, AliasMap};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },

    #[error("invalid configuration: {0}")]
    Invalid(String),

    #[error(transparent)]
    Federation(#[from] FederationError),
}

#[derive(Debug, Clone, Deserialize)]
pub struct DomainConfig {
    pub domain_id: String,
    /// Listen address, e.g. `127.0.0.1:7001`.
    pub listen: String,
    pub data_dir: PathBuf,
    pub admin_token: String,
    /// Path to the federation trustee-key file written by `trustee-init`.
    pub tpk_path: PathBuf,
    #[serde(default)]
    pub peers: Vec<PeerConfig>,
    #[serde(default = "default_cache_mode")]
    pub cache_mode: CacheMode,
    #[serde(default = "default_challenge_ttl")]
    pub challenge_ttl_secs: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PeerConfig {
    pub domain_id: String,
    pub base_url: String,
    /// The peer's attribute identities mapped onto local ones.
    #[serde(default)]
    pub aliases: Vec<AliasEntry>,
}

fn default_cache_mode() -> CacheMode {
    CacheMode::Fresh
}

fn default_challenge_ttl() -> u64 {
    60
}

impl DomainConfig {
    /// Load, resolve paths, apply the environment token override, validate.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut config: DomainConfig = toml::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })?;

        if let Ok(token) = std::env::var("DPIP_ADMIN_TOKEN") {
            if !token.is_empty() {
                config.admin_token = token;
            }
        }
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.data_dir = resolve(base, &config.data_dir);
        config.tpk_path = resolve(base, &config.tpk_path);
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.domain_id.is_empty() {
            return Err(ConfigError::Invalid("domain_id must be non-empty".into()));
        }
        self.listen_addr()?;
        if self.admin_token.is_empty() {
            return Err(ConfigError::Invalid("admin_token must be non-empty".into()));
        }
        for peer in &self.peers {
            if peer.domain_id.is_empty() || peer.base_url.is_empty() {
                return Err(ConfigError::Invalid("peer entries need domain_id and base_url".into()));
            }
            AliasMap::try_from(peer.aliases.clone())
                .map_err(|e| ConfigError::Invalid(format!("peer {}: {e}", peer.domain_id)))?;
        }
        Ok(())
    }

    pub fn listen_addr(&self) -> Result<SocketAddr, ConfigError> {
        self.listen
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("listen address {:?} is invalid", self.listen)))
    }

    /// Base URL of this domain's own daemon, for the admin client.
    pub fn own_base_url(&self) -> String {
        format!("http://{}", self.listen)
    }

    pub fn challenge_ttl(&self) -> Duration {
        Duration::from_secs(self.challenge_ttl_secs)
    }

    /// Open the domain this config describes: loads the trustee key, opens
    /// the data directory stores, and seeds the peer registry.
    pub fn build_domain(&self) -> Result<Arc<Domain>, ConfigError> {
        let tpk = load_tpk_file(&self.tpk_path)
            .map_err(|e| ConfigError::Invalid(format!("trustee key: {e}")))?;
        let domain = Domain::open(DomainSetup {
            domain_id: self.domain_id.clone(),
            tpk,
            admin_token: self.admin_token.clone(),
            data_dir: Some(self.data_dir.clone()),
            cache_mode: self.cache_mode,
            challenge_ttl: self.challenge_ttl(),
        })?;
        for peer in &self.peers {
            let aliases = AliasMap::try_from(peer.aliases.clone())
                .expect("validated at load time");
            domain.peers().upsert_config(&peer.domain_id, &peer.base_url, aliases);
        }
        Ok(domain)
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// On-disk form of the federation trustee key.
#[derive(Debug, Serialize, Deserialize)]
pub struct TpkFile {
    pub federation_id: String,
    /// Base64 of the canonical binary encoding.
    pub tpk_b64: String,
}

pub fn write_tpk_file(path: &Path, tpk: &TrusteePublicKey) -> std::io::Result<()> {
    use base64::Engine as _;
    let file = TpkFile {
        federation_id: tpk.federation_id().to_string(),
        tpk_b64: base64::engine::general_purpose::STANDARD.encode(encoding::encode_tpk(tpk)),
    };
    crate::fsutil::atomic_write_json(path, &file)
}

pub fn load_tpk_file(path: &Path) -> Result<TrusteePublicKey, String> {
    use base64::Engine as _;
    let file: TpkFile = crate::fsutil::read_json_if_exists(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?
        .ok_or_else(|| format!("trustee key file {} does not exist", path.display()))?;
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(&file.tpk_b64)
        .map_err(|e| format!("tpk_b64 is not base64: {e}"))?;
    let tpk = encoding::decode_tpk(&bytes).map_err(|e| format!("tpk_b64 is malformed: {e}"))?;
    if tpk.federation_id() != file.federation_id {
        return Err(format!(
            "federation_id {:?} does not match the encoded key ({:?})",
            file.federation_id,
            tpk.federation_id()
        ));
    }
    Ok(tpk)
}
