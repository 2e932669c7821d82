//! Timing harness: users with growing attribute counts fetch protected
//! resources across two in-process domains over the real wire protocol, once
//! generating keys per request and once reusing bundles stored per
//! predicate, with per-phase wall-clock rows and ordinal trend checks.

mod report;

pub use report::{emit_report, SummaryRow, TrendVerdicts};

use std::time::Instant;

use rand::distributions::Alphanumeric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abs::{verify_authority_certificate, CacheMode};
use crate::federation::FederationError;
use crate::harness::{HarnessOptions, TwoDomainHarness};
use crate::model::{policy_to_required_predicate, AccessMessage, Attribute, Category, Policy};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    InvalidConfig(String),

    /// The benchmark measures the permit path only; any deny aborts loudly.
    #[error("benchmark aborted: {series} user{user_index} rep {rep} was denied: {detail}")]
    Denied { series: Series, user_index: usize, rep: usize, detail: String },

    #[error(transparent)]
    Federation(#[from] FederationError),

    #[error("report I/O failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Benchmark series. `Fresh` and `Cached` run over the wire protocol;
/// `CachedReplay` additionally reuses a stored signature, which forces
/// message reuse, so it runs the crypto pipeline in process and reports no
/// transfer time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Series {
    Fresh,
    Cached,
    CachedReplay,
}

impl Series {
    pub fn label(&self) -> &'static str {
        match self {
            Series::Fresh => "fresh",
            Series::Cached => "cached",
            Series::CachedReplay => "cached-replay",
        }
    }
}

impl std::fmt::Display for Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Attribute count per modeled user; strictly increasing.
    pub user_attr_counts: Vec<usize>,
    /// Requests per (user, series), including warmup.
    pub repetitions: usize,
    /// Which access methods to run over the wire.
    pub modes: Vec<CacheMode>,
    /// Leading repetitions excluded from medians.
    pub warmup: usize,
    /// Seed for deterministic user/policy generation.
    pub seed: u64,
    /// Also run the signature-reuse series (in process, clearly labeled).
    pub include_replay_series: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            user_attr_counts: vec![2, 4, 6, 8, 10],
            repetitions: 20,
            modes: vec![CacheMode::Fresh, CacheMode::Cached],
            warmup: 3,
            seed: 1,
            include_replay_series: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.user_attr_counts.is_empty() {
            return Err(BenchError::InvalidConfig("user_attr_counts is empty".into()));
        }
        if self.user_attr_counts.contains(&0) {
            return Err(BenchError::InvalidConfig("attribute counts must be positive".into()));
        }
        if !self.user_attr_counts.windows(2).all(|w| w[0] < w[1]) {
            return Err(BenchError::InvalidConfig(
                "user_attr_counts must be strictly increasing".into(),
            ));
        }
        if self.repetitions == 0 || self.repetitions <= self.warmup {
            return Err(BenchError::InvalidConfig(
                "repetitions must exceed warmup".into(),
            ));
        }
        if self.modes.is_empty() && !self.include_replay_series {
            return Err(BenchError::InvalidConfig("no series selected".into()));
        }
        Ok(())
    }

    fn series(&self) -> Vec<Series> {
        let mut series: Vec<Series> = self
            .modes
            .iter()
            .map(|m| match m {
                CacheMode::Fresh => Series::Fresh,
                CacheMode::Cached => Series::Cached,
            })
            .collect();
        if self.include_replay_series {
            series.push(Series::CachedReplay);
        }
        series
    }
}

/// One measured request. Phases that did not run are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub user_index: usize,
    pub n_attributes: usize,
    pub mode: Series,
    pub rep: usize,
    pub asetup_s: f64,
    pub attrgen_s: f64,
    pub sign_s: f64,
    pub verify_s: f64,
    pub transfer_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryRow>,
    pub verdicts: TrendVerdicts,
}

struct BenchUser {
    user_id: String,
    resource_id: String,
    n_attributes: usize,
    attrs: Vec<Attribute>,
}

/// Deterministic fixtures: user `i` holds exactly the attributes its
/// dedicated resource's policy demands.
fn generate_users(config: &BenchConfig) -> Vec<BenchUser> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    config
        .user_attr_counts
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let attrs = (0..n)
                .map(|j| {
                    let category = if j % 2 == 0 { Category::Subject } else { Category::Environment };
                    let value: String =
                        (&mut rng).sample_iter(&Alphanumeric).take(12).map(char::from).collect();
                    Attribute::new(category, format!("attr_{i}_{j}"), value)
                        .expect("generated attribute is valid")
                })
                .collect();
            BenchUser {
                user_id: format!("user{i}"),
                resource_id: format!("bench-res-{i}"),
                n_attributes: n,
                attrs,
            }
        })
        .collect()
}

/// Run the benchmark over a fresh in-process domain pair.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let harness = TwoDomainHarness::spawn(HarnessOptions::default())?;
    let users = generate_users(config);

    for user in &users {
        harness.put_user(&user.user_id, user.attrs.clone())?;
        harness.put_resource(
            &user.resource_id,
            &format!("Benchmark resource for {}", user.user_id),
            format!("payload for {}", user.resource_id).as_bytes(),
            Some(user.attrs.clone()),
        )?;
    }

    // Wire series interleave per repetition so slow drift (frequency
    // scaling, cache warmth) lands on both methods equally.
    let wire_series: Vec<Series> =
        config.series().into_iter().filter(|s| *s != Series::CachedReplay).collect();
    let mut rows = Vec::new();
    for (user_index, user) in users.iter().enumerate() {
        for rep in 0..config.repetitions {
            for &series in &wire_series {
                run_wire_request(&harness, series, user_index, user, rep, &mut rows)?;
            }
        }
    }
    if config.include_replay_series {
        for (user_index, user) in users.iter().enumerate() {
            run_replay_series(config, &harness, user_index, user, &mut rows)?;
        }
    }

    let summary = report::summarize(&rows, config.warmup);
    let verdicts = report::evaluate_trends(&summary);
    Ok(BenchReport { config: config.clone(), rows, summary, verdicts })
}

fn run_wire_request(
    harness: &TwoDomainHarness,
    series: Series,
    user_index: usize,
    user: &BenchUser,
    rep: usize,
    rows: &mut Vec<BenchRow>,
) -> Result<(), BenchError> {
    let mode = match series {
        Series::Fresh => CacheMode::Fresh,
        Series::Cached => CacheMode::Cached,
        Series::CachedReplay => unreachable!("replay series has its own runner"),
    };
    let outcome = harness.request(&user.resource_id, &user.user_id, Some(mode))?;
    if !outcome.decision.is_permit() {
        return Err(BenchError::Denied {
            series,
            user_index,
            rep,
            detail: outcome.decision.reason_code().to_string(),
        });
    }
    let t = outcome.timings;
    rows.push(BenchRow {
        user_index,
        n_attributes: user.n_attributes,
        mode: series,
        rep,
        asetup_s: t.asetup_s.unwrap_or(0.0),
        attrgen_s: t.attrgen_s.unwrap_or(0.0),
        sign_s: t.sign_s.unwrap_or(0.0),
        verify_s: t.verify_s.unwrap_or(0.0),
        transfer_s: t.transfer_s().unwrap_or(0.0),
        total_s: t.total_s,
    });
    Ok(())
}

/// The signature-reuse method: keys and signature created once, stored under
/// the predicate, then only looked up and verified. Runs in process because
/// replaying a signature means replaying its message, which the live
/// protocol's single-use challenges refuse.
fn run_replay_series(
    config: &BenchConfig,
    harness: &TwoDomainHarness,
    user_index: usize,
    user: &BenchUser,
    rows: &mut Vec<BenchRow>,
) -> Result<(), BenchError> {
    let requester = &harness.requester;
    let verifier = &harness.verifier;
    let policy = Policy::new(&user.resource_id, user.attrs.clone())
        .expect("bench fixtures are valid policies");
    let required = policy_to_required_predicate(&policy);
    let claim = requester.resolved_claim_for(verifier.domain_id(), &required, &user.user_id)?;
    let message = AccessMessage::issue(
        &user.resource_id,
        requester.domain_id(),
        verifier.domain_id(),
    )
    .map_err(FederationError::from)?;

    // Create and store the bundle plus its signature once.
    let (bundle, _) = requester
        .key_cache()
        .get_or_create_with(CacheMode::Cached, requester.authority(), &user.attrs, &claim)
        .map_err(FederationError::from)?;
    let signature = crate::abs::sign(
        requester.tpk(),
        bundle.authority.public_key(),
        &bundle.ska,
        &message,
        &claim,
    )
    .map_err(FederationError::from)?;
    requester
        .key_cache()
        .attach_signature(&claim, message.clone(), signature)
        .map_err(FederationError::from)?;

    let pinned = verifier
        .peers()
        .pinned_apk(requester.domain_id())
        .expect("harness pins peers");

    for rep in 0..config.repetitions {
        let started = Instant::now();
        let (bundle, keygen) = requester
            .key_cache()
            .get_or_create_with(CacheMode::Cached, requester.authority(), &user.attrs, &claim)
            .map_err(FederationError::from)?;
        let cached = bundle
            .cached_signature
            .as_ref()
            .expect("signature attached above")
            .clone();

        let verify_started = Instant::now();
        let cert_ok = verify_authority_certificate(
            verifier.tpk(),
            &pinned,
            bundle.authority.public_key(),
            &bundle.certificate,
        );
        let ok = cert_ok
            && crate::abs::verify(
                verifier.tpk(),
                bundle.authority.public_key(),
                &cached.message,
                &claim,
                &cached.signature,
            );
        let verify_s = verify_started.elapsed().as_secs_f64();
        if !ok {
            return Err(BenchError::Denied {
                series: Series::CachedReplay,
                user_index,
                rep,
                detail: "stored signature failed verification".to_string(),
            });
        }

        rows.push(BenchRow {
            user_index,
            n_attributes: user.n_attributes,
            mode: Series::CachedReplay,
            rep,
            asetup_s: keygen.asetup_s.unwrap_or(0.0),
            attrgen_s: keygen.attrgen_s.unwrap_or(0.0),
            sign_s: 0.0,
            verify_s,
            transfer_s: 0.0,
            total_s: started.elapsed().as_secs_f64(),
        });
    }
    Ok(())
}
