//! A small benchmark run: users with growing attribute counts fetch their
//! resources under both access methods; the summary prints the per-phase
//! medians and the ordinal trend verdicts.
//!
//! ```bash
//! cargo run --release --example benchmark
//! ```

use dpip::bench::{emit_report, run_benchmark, BenchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = BenchConfig {
        repetitions: 12,
        warmup: 2,
        include_replay_series: true,
        ..BenchConfig::default()
    };
    println!(
        "running: {} users with {:?} attributes, {} reps each, fresh + cached + replay...\n",
        config.user_attr_counts.len(),
        config.user_attr_counts,
        config.repetitions
    );
    let report = run_benchmark(&config)?;

    println!("{:<14} {:>3} {:>12} {:>12} {:>12} {:>12}", "series", "n", "keygen", "sign", "verify", "total");
    for row in &report.summary {
        println!(
            "{:<14} {:>3} {:>12} {:>12} {:>12} {:>12}",
            row.series.to_string(),
            row.n_attributes,
            ms(row.median_asetup_s + row.median_attrgen_s),
            ms(row.median_sign_s),
            ms(row.median_verify_s),
            ms(row.median_total_s),
        );
    }

    println!();
    for (series, ok) in &report.verdicts.verify_monotonic {
        println!("verify time non-decreasing in n [{series}]: {}", if *ok { "yes" } else { "no" });
    }
    for (n, cmp) in &report.verdicts.cached_vs_fresh {
        println!("n={n}: cached/fresh total ratio {:.2}", cmp.ratio);
    }

    let out = std::path::Path::new("bench-out");
    emit_report(&report, out)?;
    println!("\nfull report written to {}", out.display());
    Ok(())
}

fn ms(seconds: f64) -> String {
    format!("{:.3}ms", seconds * 1e3)
}
