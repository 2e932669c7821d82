//! Medians, trend checks, and report files: one CSV row per measured
//! request, per-figure plot data, and a markdown summary with the ordinal
//! verdicts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{BenchError, BenchReport, BenchRow, Series};

/// Per-(series, attribute count) medians over post-warmup repetitions.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub series: Series,
    pub n_attributes: usize,
    pub samples: usize,
    pub median_asetup_s: f64,
    pub median_attrgen_s: f64,
    pub median_sign_s: f64,
    pub median_verify_s: f64,
    pub median_transfer_s: f64,
    pub median_total_s: f64,
}

/// Ordinal reproductions of the reported trends. Absolute seconds are
/// machine-dependent and reported, never asserted.
#[derive(Debug, Clone, Serialize)]
pub struct TrendVerdicts {
    /// Median verify time non-decreasing in the attribute count, per series.
    pub verify_monotonic: BTreeMap<Series, bool>,
    /// Least-squares slope of median verify time vs attribute count.
    pub verify_slope: BTreeMap<Series, f64>,
    /// Per attribute count: (fresh median total, cached median total,
    /// cached/fresh ratio). Present when both wire series ran.
    pub cached_vs_fresh: BTreeMap<usize, CachedVsFresh>,
    /// True iff cached total < fresh total at every attribute count.
    pub cached_always_faster: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CachedVsFresh {
    pub fresh_total_s: f64,
    pub cached_total_s: f64,
    pub ratio: f64,
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("durations are finite"));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

pub(super) fn summarize(rows: &[BenchRow], warmup: usize) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Series, usize), Vec<&BenchRow>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.rep >= warmup) {
        groups.entry((row.mode, row.n_attributes)).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|((series, n), group)| {
            let collect = |f: fn(&BenchRow) -> f64| {
                let mut values: Vec<f64> = group.iter().map(|r| f(r)).collect();
                median(&mut values)
            };
            SummaryRow {
                series,
                n_attributes: n,
                samples: group.len(),
                median_asetup_s: collect(|r| r.asetup_s),
                median_attrgen_s: collect(|r| r.attrgen_s),
                median_sign_s: collect(|r| r.sign_s),
                median_verify_s: collect(|r| r.verify_s),
                median_transfer_s: collect(|r| r.transfer_s),
                median_total_s: collect(|r| r.total_s),
            }
        })
        .collect()
}

/// Slope of the least-squares line through `(x, y)` points.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let sum_x: f64 = points.iter().map(|(x, _)| x).sum();
    let sum_y: f64 = points.iter().map(|(_, y)| y).sum();
    let sum_xx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sum_xy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let denom = n * sum_xx - sum_x * sum_x;
    if denom == 0.0 {
        0.0
    } else {
        (n * sum_xy - sum_x * sum_y) / denom
    }
}

pub(super) fn evaluate_trends(summary: &[SummaryRow]) -> TrendVerdicts {
    let mut by_series: BTreeMap<Series, Vec<&SummaryRow>> = BTreeMap::new();
    for row in summary {
        by_series.entry(row.series).or_default().push(row);
    }

    let mut verify_monotonic = BTreeMap::new();
    let mut verify_slope = BTreeMap::new();
    for (series, rows) in &by_series {
        // Summary rows arrive sorted by (series, n).
        let verify: Vec<f64> = rows.iter().map(|r| r.median_verify_s).collect();
        verify_monotonic.insert(*series, verify.windows(2).all(|w| w[1] >= w[0]));
        let points: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.n_attributes as f64, r.median_verify_s))
            .collect();
        verify_slope.insert(*series, least_squares_slope(&points));
    }

    let mut cached_vs_fresh = BTreeMap::new();
    if let (Some(fresh), Some(cached)) = (by_series.get(&Series::Fresh), by_series.get(&Series::Cached)) {
        for f in fresh {
            if let Some(c) = cached.iter().find(|c| c.n_attributes == f.n_attributes) {
                cached_vs_fresh.insert(
                    f.n_attributes,
                    CachedVsFresh {
                        fresh_total_s: f.median_total_s,
                        cached_total_s: c.median_total_s,
                        ratio: c.median_total_s / f.median_total_s,
                    },
                );
            }
        }
    }
    let cached_always_faster = !cached_vs_fresh.is_empty()
        && cached_vs_fresh.values().all(|v| v.cached_total_s < v.fresh_total_s);

    TrendVerdicts { verify_monotonic, verify_slope, cached_vs_fresh, cached_always_faster }
}

/// Write `bench.csv`, `fig4.dat`, `fig5.dat`, `fig6.dat`, and `summary.md`
/// into `out_dir`.
pub fn emit_report(report: &BenchReport, out_dir: &Path) -> Result<(), BenchError> {
    if report.rows.is_empty() {
        return Err(BenchError::InvalidConfig("no rows to report".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    // One CSV line per measured request, warmup included.
    let mut csv = String::from("user_index,n_attributes,mode,rep,asetup_s,attrgen_s,sign_s,verify_s,transfer_s,total_s\n");
    for r in &report.rows {
        csv.push_str(&format!(
            "{},{},{},{},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}\n",
            r.user_index,
            r.n_attributes,
            r.mode,
            r.rep,
            r.asetup_s,
            r.attrgen_s,
            r.sign_s,
            r.verify_s,
            r.transfer_s,
            r.total_s
        ));
    }
    std::fs::write(out_dir.join("bench.csv"), csv)?;

    // Plot data: verify time per series (fig4), fresh totals (fig5), cached
    // totals (fig6); whitespace-separated two-column blocks.
    let mut fig4 = String::new();
    for series in [Series::Fresh, Series::Cached, Series::CachedReplay] {
        let rows: Vec<_> = report.summary.iter().filter(|r| r.series == series).collect();
        if rows.is_empty() {
            continue;
        }
        fig4.push_str(&format!("# series={series}\n"));
        for r in &rows {
            fig4.push_str(&format!("{} {:.9}\n", r.n_attributes, r.median_verify_s));
        }
        fig4.push('\n');
    }
    std::fs::write(out_dir.join("fig4.dat"), fig4)?;

    for (file, series) in [("fig5.dat", Series::Fresh), ("fig6.dat", Series::Cached)] {
        let mut data = format!("# median total seconds, {series} keys\n");
        for r in report.summary.iter().filter(|r| r.series == series) {
            data.push_str(&format!("{} {:.9}\n", r.n_attributes, r.median_total_s));
        }
        std::fs::write(out_dir.join(file), data)?;
    }

    let mut md = std::fs::File::create(out_dir.join("summary.md"))?;
    write_summary_markdown(&mut md, report)?;
    Ok(())
}

fn write_summary_markdown(out: &mut impl Write, report: &BenchReport) -> std::io::Result<()> {
    writeln!(out, "# Benchmark summary\n")?;
    writeln!(
        out,
        "Configuration: attribute counts {:?}, {} repetitions ({} warmup), seed {}.\n",
        report.config.user_attr_counts, report.config.repetitions, report.config.warmup,
        report.config.seed
    )?;
    writeln!(out, "Medians over post-warmup repetitions (seconds):\n")?;
    writeln!(out, "| series | n | asetup | attrgen | sign | verify | transfer | total |")?;
    writeln!(out, "|---|---|---|---|---|---|---|---|")?;
    for r in &report.summary {
        writeln!(
            out,
            "| {} | {} | {:.6} | {:.6} | {:.6} | {:.6} | {:.6} | {:.6} |",
            r.series,
            r.n_attributes,
            r.median_asetup_s,
            r.median_attrgen_s,
            r.median_sign_s,
            r.median_verify_s,
            r.median_transfer_s,
            r.median_total_s
        )?;
    }

    let v = &report.verdicts;
    writeln!(out, "\n## Trend checks\n")?;
    for (series, ok) in &v.verify_monotonic {
        writeln!(
            out,
            "- verify time non-decreasing in attribute count [{series}]: {}",
            pass(*ok)
        )?;
    }
    for (series, slope) in &v.verify_slope {
        writeln!(
            out,
            "- verify-time least-squares slope [{series}]: {slope:.3e} s/attribute: {}",
            pass(*slope > 0.0)
        )?;
    }
    if !v.cached_vs_fresh.is_empty() {
        writeln!(
            out,
            "- stored keys faster than fresh keys at every attribute count: {}",
            pass(v.cached_always_faster)
        )?;
        writeln!(out, "\n| n | fresh total | cached total | cached/fresh |")?;
        writeln!(out, "|---|---|---|---|")?;
        for (n, cmp) in &v.cached_vs_fresh {
            writeln!(
                out,
                "| {} | {:.6} | {:.6} | {:.3} |",
                n, cmp.fresh_total_s, cmp.cached_total_s, cmp.ratio
            )?;
        }
    }
    if report.summary.iter().any(|r| r.series == Series::CachedReplay) {
        writeln!(
            out,
            "\nThe cached-replay series reuses a stored signature and therefore runs the \
             crypto pipeline in process (no transport); its totals are not comparable to \
             the wire series."
        )?;
    }
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
