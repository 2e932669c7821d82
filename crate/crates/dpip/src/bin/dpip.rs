//! Operator entry points. Every subcommand is a thin shell over the library:
//! `serve` hosts a domain daemon, `trustee-init` writes the federation
//! trustee key, `admin` drives the daemon's admin endpoints, `client` acts
//! as a requesting domain, and `bench` runs the timing harness.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dpip::abs::CacheMode;
use dpip::bench::{emit_report, run_benchmark, BenchConfig};
use dpip::config::{write_tpk_file, DomainConfig};
use dpip::federation::{
    list_remote_resources, request_remote_resource, FederationError,
};
use dpip::model::Decision;

const EXIT_OK: u8 = 0;
const EXIT_DENY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TRANSPORT: u8 = 3;

#[derive(Parser)]
#[command(name = "dpip", version, about = "Multi-domain attribute-based access control federation")]
struct Cli {
    /// Emit machine-readable JSON on stderr for errors and decisions.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a domain daemon.
    Serve(ServeArgs),
    /// Generate the federation trustee key file.
    TrusteeInit(TrusteeInitArgs),
    /// Administer a running daemon's stores.
    Admin(AdminArgs),
    /// Act as a requesting client against a peer domain.
    Client(ClientArgs),
    /// Run the latency benchmark and write reports.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ServeArgs {
    /// Domain configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured data directory.
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

#[derive(Args)]
struct TrusteeInitArgs {
    /// Federation identifier baked into the trustee key.
    #[arg(long)]
    federation: String,
    /// Output path for the trustee key file.
    #[arg(long)]
    out: PathBuf,
    /// Overwrite an existing file.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct AdminArgs {
    /// Domain configuration file (daemon address and admin token).
    #[arg(long)]
    config: PathBuf,
    #[command(subcommand)]
    action: AdminAction,
}

#[derive(Subcommand)]
#[allow(clippy::enum_variant_names)] // subcommands are add-user / add-resource / add-policy
enum AdminAction {
    /// Upsert a user record: {user_id, attributes:[{category,name,value}]}.
    AddUser(JsonInput),
    /// Upsert a resource: {resource_id, display_name, content_b64}.
    AddResource(JsonInput),
    /// Upsert a policy: {resource_id, entries:[{category,name,value}]}.
    AddPolicy(JsonInput),
}

#[derive(Args)]
struct JsonInput {
    /// JSON input file; stdin when omitted.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct ClientArgs {
    /// Domain configuration file of the requesting domain.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured data directory.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    action: ClientAction,
}

#[derive(Subcommand)]
enum ClientAction {
    /// List a peer's resource names.
    Ls {
        /// Peer domain id from the config's peer list.
        peer: String,
    },
    /// Fetch a remote resource as a local user.
    Get {
        /// Peer domain id from the config's peer list.
        peer: String,
        resource_id: String,
        /// Local user whose attributes answer the challenge.
        #[arg(long)]
        user: String,
        /// Access method override: fresh | cached.
        #[arg(long)]
        mode: Option<CacheMode>,
        /// Write content here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[command(subcommand)]
    action: BenchAction,
}

#[derive(Subcommand)]
enum BenchAction {
    /// Execute the benchmark.
    Run {
        /// Benchmark configuration (TOML); defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report output directory.
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also run the signature-reuse series.
        #[arg(long)]
        replay: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // The benchmark hosts two in-process daemons; their per-request logs
    // would drown the report, so it defaults quieter. RUST_LOG still wins.
    let default_filter = match cli.command {
        Command::Bench(_) => "warn",
        _ => "info",
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default_filter)),
        )
        .with_writer(std::io::stderr)
        .init();

    let json = cli.json;
    let code = match cli.command {
        Command::Serve(args) => cmd_serve(args, json),
        Command::TrusteeInit(args) => cmd_trustee_init(args, json),
        Command::Admin(args) => cmd_admin(args, json),
        Command::Client(args) => cmd_client(args, json),
        Command::Bench(args) => cmd_bench(args, json),
    };
    ExitCode::from(code)
}

fn fail(json: bool, code: u8, error: &str, detail: impl std::fmt::Display) -> u8 {
    if json {
        eprintln!("{}", json!({ "error": error, "detail": detail.to_string() }));
    } else {
        eprintln!("dpip: {error}: {detail}");
    }
    code
}

fn load_config(path: &std::path::Path, data_dir: Option<PathBuf>, json: bool) -> Result<DomainConfig, u8> {
    match DomainConfig::load(path) {
        Ok(mut config) => {
            if let Some(dir) = data_dir {
                config.data_dir = dir;
            }
            Ok(config)
        }
        Err(e) => Err(fail(json, EXIT_USAGE, "config", e)),
    }
}

fn runtime(json: bool) -> Result<tokio::runtime::Runtime, u8> {
    tokio::runtime::Runtime::new().map_err(|e| fail(json, EXIT_TRANSPORT, "runtime", e))
}

fn cmd_serve(args: ServeArgs, json: bool) -> u8 {
    let config = match load_config(&args.config, args.data_dir, json) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let addr = config.listen_addr().expect("validated");
    let domain = match config.build_domain() {
        Ok(d) => d,
        Err(e) => return fail(json, EXIT_USAGE, "config", e),
    };
    let rt = match runtime(json) {
        Ok(rt) => rt,
        Err(code) => return code,
    };

    let result: Result<(), String> = rt.block_on(async {
        let (bound, handle) = dpip::federation::spawn(Arc::clone(&domain), addr)
            .await
            .map_err(|e| e.to_string())?;
        // The parseable startup line tools and tests wait for.
        println!("dpip daemon {} listening on http://{bound}", domain.domain_id());
        std::io::stdout().flush().ok();

        // Pin configured peers in the background; order of daemon startup
        // across the federation must not matter.
        let registrar = Arc::clone(&domain);
        tokio::spawn(async move {
            let http = reqwest::Client::new();
            for peer_id in registrar.peers().peer_ids() {
                for attempt in 0..10u32 {
                    match dpip::federation::ensure_peer_pinned(&http, &registrar, &peer_id).await {
                        Ok(()) => break,
                        Err(e) => {
                            tracing::debug!(peer_id, attempt, "peer registration pending: {e}");
                            tokio::time::sleep(std::time::Duration::from_millis(500)).await;
                        }
                    }
                }
            }
        });

        tokio::select! {
            _ = handle => {}
            _ = tokio::signal::ctrl_c() => {}
        }
        Ok(())
    });

    match result {
        Ok(()) => EXIT_OK,
        Err(e) => fail(json, EXIT_TRANSPORT, "serve", e),
    }
}

fn cmd_trustee_init(args: TrusteeInitArgs, json: bool) -> u8 {
    if args.out.exists() && !args.force {
        return fail(json, EXIT_USAGE, "trustee-init", format!("{} already exists (use --force)", args.out.display()));
    }
    let tpk = match dpip::abs::ts_setup(&args.federation) {
        Ok(tpk) => tpk,
        Err(e) => return fail(json, EXIT_USAGE, "trustee-init", e),
    };
    if let Err(e) = write_tpk_file(&args.out, &tpk) {
        return fail(json, EXIT_TRANSPORT, "trustee-init", e);
    }
    if json {
        println!("{}", json!({ "federation_id": args.federation, "out": args.out }));
    } else {
        println!("wrote trustee key for federation {:?} to {}", args.federation, args.out.display());
    }
    EXIT_OK
}

fn read_json_input(input: &JsonInput, json: bool) -> Result<serde_json::Value, u8> {
    let text = match &input.file {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| fail(json, EXIT_USAGE, "input", format!("{}: {e}", path.display())))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| fail(json, EXIT_USAGE, "input", e))?;
            buf
        }
    };
    serde_json::from_str(&text).map_err(|e| fail(json, EXIT_USAGE, "input", e))
}

fn cmd_admin(args: AdminArgs, json: bool) -> u8 {
    let config = match load_config(&args.config, None, json) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let (path, input) = match &args.action {
        AdminAction::AddUser(input) => ("/v1/admin/users", input),
        AdminAction::AddResource(input) => ("/v1/admin/resources", input),
        AdminAction::AddPolicy(input) => ("/v1/admin/policies", input),
    };
    let body = match read_json_input(input, json) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let url = format!("{}{path}", config.own_base_url());

    let rt = match runtime(json) {
        Ok(rt) => rt,
        Err(code) => return code,
    };
    let result = rt.block_on(async {
        reqwest::Client::new()
            .post(&url)
            .bearer_auth(&config.admin_token)
            .json(&body)
            .send()
            .await
    });
    let response = match result {
        Ok(r) => r,
        Err(e) => return fail(json, EXIT_TRANSPORT, "transport", e),
    };
    let status = response.status();
    if status.is_success() {
        if json {
            println!("{}", json!({ "ok": true }));
        } else {
            println!("ok");
        }
        EXIT_OK
    } else {
        let body = rt.block_on(response.text()).unwrap_or_default();
        fail(json, EXIT_DENY, "admin", format!("{status}: {body}"))
    }
}

fn cmd_client(args: ClientArgs, json: bool) -> u8 {
    let config = match load_config(&args.config, args.data_dir, json) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let rt = match runtime(json) {
        Ok(rt) => rt,
        Err(code) => return code,
    };
    let http = reqwest::Client::new();

    match args.action {
        ClientAction::Ls { peer } => {
            let Some(peer_config) = config.peers.iter().find(|p| p.domain_id == peer) else {
                return fail(json, EXIT_USAGE, "unknown-peer", format!("{peer:?} is not configured"));
            };
            match rt.block_on(list_remote_resources(&http, &peer_config.base_url)) {
                Ok(names) => {
                    println!("{}", serde_json::to_string_pretty(&names).expect("serializable"));
                    EXIT_OK
                }
                Err(e) => fail(json, EXIT_TRANSPORT, "transport", e),
            }
        }
        ClientAction::Get { peer, resource_id, user, mode, out } => {
            let domain = match config.build_domain() {
                Ok(d) => d,
                Err(e) => return fail(json, EXIT_USAGE, "config", e),
            };
            let outcome = rt.block_on(request_remote_resource(
                &http, &domain, &peer, &resource_id, &user, mode,
            ));
            match outcome {
                Ok(outcome) if outcome.decision.is_permit() => {
                    let content = outcome.content.unwrap_or_default();
                    if let Some(path) = out {
                        if let Err(e) = std::fs::write(&path, &content) {
                            return fail(json, EXIT_TRANSPORT, "write", e);
                        }
                    } else if let Err(e) = std::io::stdout().write_all(&content) {
                        return fail(json, EXIT_TRANSPORT, "write", e);
                    }
                    if json {
                        eprintln!("{}", json!({ "decision": "permit", "total_s": outcome.timings.total_s }));
                    }
                    EXIT_OK
                }
                Ok(outcome) => {
                    let reason = match outcome.decision {
                        Decision::Deny(reason) => reason.code(),
                        Decision::Permit => unreachable!("permit handled above"),
                    };
                    if json {
                        eprintln!("{}", json!({ "decision": "deny", "reason": reason }));
                    } else {
                        eprintln!("dpip: access denied: {reason}");
                    }
                    EXIT_DENY
                }
                Err(e @ FederationError::MissingAttributes(_)) => {
                    if json {
                        eprintln!("{}", json!({ "decision": "deny", "reason": e.code(), "detail": e.to_string() }));
                    } else {
                        eprintln!("dpip: {e}");
                    }
                    EXIT_DENY
                }
                Err(e @ (FederationError::Transport { .. } | FederationError::Protocol { .. })) => {
                    fail(json, EXIT_TRANSPORT, e.code(), e)
                }
                Err(e) => fail(json, EXIT_USAGE, e.code(), e),
            }
        }
    }
}

fn cmd_bench(args: BenchArgs, json: bool) -> u8 {
    let BenchAction::Run { config, out, seed, replay } = args.action;
    let mut bench_config = match config {
        Some(path) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return fail(json, EXIT_USAGE, "config", format!("{}: {e}", path.display())),
            };
            match toml::from_str::<BenchConfig>(&text) {
                Ok(c) => c,
                Err(e) => return fail(json, EXIT_USAGE, "config", e),
            }
        }
        None => BenchConfig::default(),
    };
    if let Some(seed) = seed {
        bench_config.seed = seed;
    }
    if replay {
        bench_config.include_replay_series = true;
    }

    let report = match run_benchmark(&bench_config) {
        Ok(r) => r,
        Err(e) => return fail(json, EXIT_DENY, "bench", e),
    };
    if let Err(e) = emit_report(&report, &out) {
        return fail(json, EXIT_TRANSPORT, "bench", e);
    }

    if json {
        println!(
            "{}",
            json!({
                "rows": report.rows.len(),
                "out": out,
                "verify_monotonic": report.verdicts.verify_monotonic,
                "cached_always_faster": report.verdicts.cached_always_faster,
            })
        );
    } else {
        println!("wrote {} rows to {}", report.rows.len(), out.display());
        for (series, ok) in &report.verdicts.verify_monotonic {
            println!("verify monotonic [{series}]: {}", if *ok { "PASS" } else { "FAIL" });
        }
        if !report.verdicts.cached_vs_fresh.is_empty() {
            println!(
                "cached faster than fresh at every n: {}",
                if report.verdicts.cached_always_faster { "PASS" } else { "FAIL" }
            );
        }
        println!("see {} for the full summary", out.join("summary.md").display());
    }
    EXIT_OK
}
