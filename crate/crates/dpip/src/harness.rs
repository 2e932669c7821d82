//! An in-process federation pair: two domains with their daemons on
//! loopback ports, wired to each other over the real HTTP protocol. This is
//! what the benchmark runs on, what the acceptance suite drives, and the
//! quickest way to play with the crate from an example.

use std::sync::Arc;
use std::time::Duration;

use tokio::runtime::Runtime;
use tokio::task::JoinHandle;

use crate::abs::{ts_setup, CacheMode, TrusteePublicKey};
use crate::federation::{
    register_peer, request_remote_resource, AccessOutcome, Domain, DomainSetup, FederationError,
};
use crate::model::{AliasMap, Attribute, Policy};
use crate::services::{ResourceRecord, UserRecord};

pub struct HarnessOptions {
    pub federation_id: String,
    /// Domain holding resources and verifying signatures.
    pub verifier_id: String,
    /// Domain holding users and requesting access.
    pub requester_id: String,
    pub admin_token: String,
    pub challenge_ttl: Duration,
    /// How the verifier's attribute names read in the requester's stores
    /// (remote identity to local identity, from the requester's view).
    pub requester_aliases: AliasMap,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            federation_id: "fed1".to_string(),
            verifier_id: "domain1".to_string(),
            requester_id: "domain2".to_string(),
            admin_token: "admin-secret".to_string(),
            challenge_ttl: Duration::from_secs(60),
            requester_aliases: AliasMap::empty(),
        }
    }
}

pub struct TwoDomainHarness {
    runtime: Runtime,
    pub verifier: Arc<Domain>,
    pub requester: Arc<Domain>,
    pub verifier_url: String,
    pub requester_url: String,
    pub http: reqwest::Client,
    admin_token: String,
    server_handles: Vec<JoinHandle<()>>,
}

impl TwoDomainHarness {
    pub fn spawn(options: HarnessOptions) -> Result<Self, FederationError> {
        let runtime = Runtime::new().map_err(|e| FederationError::Transport {
            phase: "harness",
            detail: e.to_string(),
        })?;
        let tpk = ts_setup(&options.federation_id)?;
        let parts = runtime.block_on(Self::spawn_inner(options, tpk))?;
        Ok(Self {
            runtime,
            verifier: parts.verifier,
            requester: parts.requester,
            verifier_url: parts.verifier_url,
            requester_url: parts.requester_url,
            http: parts.http,
            admin_token: parts.admin_token,
            server_handles: parts.server_handles,
        })
    }

    async fn spawn_inner(
        options: HarnessOptions,
        tpk: TrusteePublicKey,
    ) -> Result<TwoDomainHarnessParts, FederationError> {
        let mut verifier_setup =
            DomainSetup::in_memory(&options.verifier_id, tpk.clone(), &options.admin_token);
        verifier_setup.challenge_ttl = options.challenge_ttl;
        let verifier = Domain::open(verifier_setup)?;

        let mut requester_setup =
            DomainSetup::in_memory(&options.requester_id, tpk, &options.admin_token);
        requester_setup.challenge_ttl = options.challenge_ttl;
        let requester = Domain::open(requester_setup)?;

        let any = "127.0.0.1:0".parse().expect("loopback addr");
        let (verifier_addr, verifier_handle) = crate::federation::spawn(Arc::clone(&verifier), any)
            .await
            .map_err(|e| FederationError::Transport { phase: "harness", detail: e.to_string() })?;
        let (requester_addr, requester_handle) =
            crate::federation::spawn(Arc::clone(&requester), any)
                .await
                .map_err(|e| FederationError::Transport { phase: "harness", detail: e.to_string() })?;
        let verifier_url = format!("http://{verifier_addr}");
        let requester_url = format!("http://{requester_addr}");

        verifier
            .peers()
            .upsert_config(requester.domain_id(), &requester_url, AliasMap::empty());
        requester.peers().upsert_config(
            verifier.domain_id(),
            &verifier_url,
            options.requester_aliases.clone(),
        );

        let http = reqwest::Client::new();
        register_peer(&http, &verifier, requester.domain_id(), &requester_url).await?;
        register_peer(&http, &requester, verifier.domain_id(), &verifier_url).await?;

        Ok(TwoDomainHarnessParts {
            verifier,
            requester,
            verifier_url,
            requester_url,
            http,
            admin_token: options.admin_token,
            server_handles: vec![verifier_handle, requester_handle],
        })
    }

    pub fn admin_token(&self) -> &str {
        &self.admin_token
    }

    pub fn block_on<F: std::future::Future>(&self, future: F) -> F::Output {
        self.runtime.block_on(future)
    }

    /// Store a resource (and optionally a protecting policy) on the verifier.
    pub fn put_resource(
        &self,
        resource_id: &str,
        display_name: &str,
        content: &[u8],
        policy_entries: Option<Vec<Attribute>>,
    ) -> Result<(), FederationError> {
        self.verifier.admin_put_resource(
            &self.admin_token,
            ResourceRecord::new(resource_id, display_name, content.to_vec())?,
        )?;
        if let Some(entries) = policy_entries {
            self.verifier
                .admin_put_policy(&self.admin_token, Policy::new(resource_id, entries)?)?;
        }
        Ok(())
    }

    /// Store a user record on the requester.
    pub fn put_user(&self, user_id: &str, attrs: Vec<Attribute>) -> Result<(), FederationError> {
        self.requester
            .admin_put_user(&self.admin_token, UserRecord::new(user_id, attrs)?)?;
        Ok(())
    }

    /// One full remote access, requester against verifier, over the wire.
    pub fn request(
        &self,
        resource_id: &str,
        user_id: &str,
        mode: Option<CacheMode>,
    ) -> Result<AccessOutcome, FederationError> {
        self.runtime.block_on(request_remote_resource(
            &self.http,
            &self.requester,
            self.verifier.domain_id(),
            resource_id,
            user_id,
            mode,
        ))
    }
}

impl Drop for TwoDomainHarness {
    fn drop(&mut self) {
        for handle in &self.server_handles {
            handle.abort();
        }
    }
}

// Struct-update helper so spawn() can build in async context and attach the
// runtime afterwards.
struct TwoDomainHarnessParts {
    verifier: Arc<Domain>,
    requester: Arc<Domain>,
    verifier_url: String,
    requester_url: String,
    http: reqwest::Client,
    admin_token: String,
    server_handles: Vec<JoinHandle<()>>,
}
