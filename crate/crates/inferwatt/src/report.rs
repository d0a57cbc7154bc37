//! Plot-ready output: log-spaced histograms, the fitted-model document, summary
//! and fleet reports, and the sample CSV.
//!
//! All rendering is deterministic: fixed field orders, shortest round-trip
//! float formatting in CSVs, six significant figures in fit documents.

use crate::error::{Error, Result};
use crate::scenario::{quantile_sorted, DistributionSummary, QuerySample};
use crate::tps_model::TpsModel;

/// Header of the per-sample CSV, byte for byte.
pub const SAMPLE_CSV_HEADER: &str = "model,l_out,l_eff,tps,p_node_kw,pue,alpha,energy_wh";

/// A histogram over logarithmically spaced bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Bin edges, ascending, `counts.len() + 1` entries.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Histogram of positive values over `bins` log-spaced bins spanning the
/// P0.1-P99.9 range of the data; values beyond the span are omitted rather
/// than piled into the end bins.
pub fn log_histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptySamples);
    }
    if bins == 0 {
        return Err(Error::InvalidArgument {
            name: "bins",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    if sorted.is_empty() {
        return Err(Error::EmptySamples);
    }
    sorted.sort_by(f64::total_cmp);
    let mut lo = quantile_sorted(&sorted, 0.001);
    let mut hi = quantile_sorted(&sorted, 0.999);
    if lo == hi {
        // Degenerate spread: widen so the single value sits mid-bin.
        lo *= 0.5;
        hi *= 2.0;
    }
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let step = (ln_hi - ln_lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| (ln_lo + step * i as f64).exp()).collect();
    let mut counts = vec![0u64; bins];
    for &v in &sorted {
        if v < lo || v > hi {
            continue;
        }
        let idx = ((v.ln() - ln_lo) / step).floor();
        let idx = (idx.max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Number of local maxima of the histogram after a centered moving-average
/// smooth of the given window (edges truncate the window). Plateaus count
/// once.
pub fn smoothed_peak_count(counts: &[u64], window: usize) -> usize {
    if counts.is_empty() {
        return 0;
    }
    let half = window / 2;
    let n = counts.len();
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            counts[lo..=hi].iter().sum::<u64>() as f64 / (hi - lo + 1) as f64
        })
        .collect();

    let mut peaks = 0;
    let mut rising = false;
    for i in 1..n {
        if smoothed[i] > smoothed[i - 1] {
            rising = true;
        } else if smoothed[i] < smoothed[i - 1] {
            if rising {
                peaks += 1;
            } else if i == 1 {
                // A drop straight from the left edge: the first bin is a peak.
                peaks += 1;
            }
            rising = false;
        }
    }
    if rising {
        peaks += 1; // still climbing at the right edge
    }
    peaks
}

fn push_f64(out: &mut String, v: f64) {
    out.push_str(&format!("{v}"));
}

/// Render samples as CSV under [`SAMPLE_CSV_HEADER`]. Floats use shortest
/// round-trip formatting, so parsing the output recovers exact values.
pub fn samples_to_csv(samples: &[QuerySample]) -> String {
    let mut out = String::from(SAMPLE_CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&s.model_name);
        for v in [s.l_out, s.l_eff, s.tps, s.p_node_kw, s.pue, s.alpha, s.energy_wh] {
            out.push(',');
            push_f64(&mut out, v);
        }
        out.push('\n');
    }
    out
}

/// Parse a CSV produced by [`samples_to_csv`].
pub fn samples_from_csv(text: &str) -> Result<Vec<QuerySample>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::EmptyInput)?;
    if header.trim_end() != SAMPLE_CSV_HEADER {
        return Err(Error::Parse {
            row: 1,
            field: "header".to_string(),
            message: format!("expected `{SAMPLE_CSV_HEADER}`"),
        });
    }
    let mut samples = Vec::new();
    for (offset, line) in lines.enumerate() {
        let row = offset + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse {
                row,
                field: "row".to_string(),
                message: format!("expected 8 fields, got {}", fields.len()),
            });
        }
        let num = |i: usize, name: &str| -> Result<f64> {
            fields[i].trim().parse().map_err(|_| Error::Parse {
                row,
                field: name.to_string(),
                message: format!("cannot parse `{}`", fields[i].trim()),
            })
        };
        samples.push(QuerySample {
            model_name: fields[0].to_string(),
            l_out: num(1, "l_out")?,
            l_eff: num(2, "l_eff")?,
            tps: num(3, "tps")?,
            p_node_kw: num(4, "p_node_kw")?,
            pue: num(5, "pue")?,
            alpha: num(6, "alpha")?,
            energy_wh: num(7, "energy_wh")?,
        });
    }
    Ok(samples)
}

/// Histogram as CSV: `bin_lo_wh,bin_hi_wh,count`.
pub fn histogram_to_csv(hist: &Histogram) -> String {
    let mut out = String::from("bin_lo_wh,bin_hi_wh,count\n");
    for (i, &count) in hist.counts.iter().enumerate() {
        push_f64(&mut out, hist.edges[i]);
        out.push(',');
        push_f64(&mut out, hist.edges[i + 1]);
        out.push_str(&format!(",{count}\n"));
    }
    out
}

/// `x` to six significant figures, plain decimal.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Fitted-model document: one line per model with coefficients to six
/// significant figures, the plateau cap, and the observation count.
pub fn fit_document(models: &[TpsModel]) -> String {
    let width = models.iter().map(|m| m.model_name.len()).max().unwrap_or(5).max(5);
    let mut out = format!(
        "{:<width$}  {:>12}  {:>12}  {:>12}  {:>12}  {:>5}\n",
        "model", "beta0", "beta1", "beta2", "tps_cap", "n_obs"
    );
    for m in models {
        out.push_str(&format!(
            "{:<width$}  {:>12}  {:>12}  {:>12}  {:>12}  {:>5}\n",
            m.model_name,
            sig6(m.beta0),
            sig6(m.beta1),
            sig6(m.beta2),
            sig6(m.tps_cap),
            m.n_obs
        ));
    }
    out
}

/// Fitted models as CSV.
pub fn fit_csv(models: &[TpsModel]) -> String {
    let mut out = String::from("model,beta0,beta1,beta2,tps_cap,n_obs\n");
    for m in models {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            m.model_name,
            sig6(m.beta0),
            sig6(m.beta1),
            sig6(m.beta2),
            sig6(m.tps_cap),
            m.n_obs
        ));
    }
    out
}

/// One summary block, field names matching the summary type.
pub fn summary_text(label: &str, s: &DistributionSummary) -> String {
    format!(
        "member: {label}\n  n: {}\n  mean_wh: {}\n  p5_wh: {}\n  q1_wh: {}\n  median_wh: {}\n  q3_wh: {}\n  p95_wh: {}\n",
        s.n,
        sig6(s.mean_wh),
        sig6(s.p5_wh),
        sig6(s.q1_wh),
        sig6(s.median_wh),
        sig6(s.q3_wh),
        sig6(s.p95_wh)
    )
}

/// Summary rows as CSV under a fixed header.
pub fn summary_csv_header() -> &'static str {
    "member,n,mean_wh,p5_wh,q1_wh,median_wh,q3_wh,p95_wh"
}

pub fn summary_csv_row(label: &str, s: &DistributionSummary) -> String {
    format!(
        "{label},{},{},{},{},{},{},{}",
        s.n,
        sig6(s.mean_wh),
        sig6(s.p5_wh),
        sig6(s.q1_wh),
        sig6(s.median_wh),
        sig6(s.q3_wh),
        sig6(s.p95_wh)
    )
}

/// One fleet-report line: scenario name, mean Wh/query, queries/day, beta,
/// GWh/day.
pub fn fleet_line(name: &str, mean_wh: f64, queries_per_day: u64, beta: f64, gwh_day: f64) -> String {
    format!(
        "scenario: {name}\n  mean_wh_per_query: {}\n  queries_per_day: {queries_per_day}\n  beta: {}\n  gwh_per_day: {}\n",
        sig6(mean_wh),
        sig6(beta),
        sig6(gwh_day)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(10.553042), "10.5530");
        assert_eq!(sig6(-0.12705612), "-0.127056");
        assert_eq!(sig6(25150.034), "25150.0");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1300.0), "1300.00");
    }

    #[test]
    fn histogram_covers_the_central_band() {
        let values: Vec<f64> = (1..=1000).map(|i| i as f64 / 10.0).collect();
        let hist = log_histogram(&values, 50).unwrap();
        // Only the sub-P0.1 / beyond-P99.9 stragglers may fall out.
        let total = hist.counts.iter().sum::<u64>();
        assert!((996..=1000).contains(&total), "total = {total}");
        assert_eq!(hist.edges.len(), 51);
        for w in hist.edges.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn histogram_log_spacing_has_constant_ratio() {
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let hist = log_histogram(&values, 10).unwrap();
        let ratio = hist.edges[1] / hist.edges[0];
        for w in hist.edges.windows(2) {
            assert!(((w[1] / w[0]) / ratio - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_histogram_single_value() {
        let hist = log_histogram(&[2.0, 2.0, 2.0], 4).unwrap();
        assert_eq!(hist.counts.iter().sum::<u64>(), 3);
    }

    #[test]
    fn peak_counting() {
        assert_eq!(smoothed_peak_count(&[], 3), 0);
        assert_eq!(smoothed_peak_count(&[5], 3), 0);
        // One clean peak.
        assert_eq!(smoothed_peak_count(&[0, 2, 8, 2, 0, 0], 1), 1);
        // Two peaks with a valley.
        assert_eq!(smoothed_peak_count(&[0, 8, 1, 1, 9, 0], 1), 2);
        // Smoothing flattens single-bin blips between real peaks.
        assert_eq!(smoothed_peak_count(&[0, 0, 9, 9, 0, 1, 0, 9, 9, 0], 3), 2);
        // Monotone ramps have a single edge peak.
        assert_eq!(smoothed_peak_count(&[1, 2, 3, 4, 5], 1), 1);
        assert_eq!(smoothed_peak_count(&[5, 4, 3, 2, 1], 1), 1);
        // Plateau counts once.
        assert_eq!(smoothed_peak_count(&[0, 5, 5, 5, 0], 1), 1);
    }

    #[test]
    fn sample_csv_round_trip_is_exact() {
        use crate::scenario::QuerySample;
        let samples = vec![
            QuerySample {
                model_name: "Llama 3.1 405B".to_string(),
                l_out: 301.0,
                l_eff: 301.0,
                tps: 2123.456789012345,
                p_node_kw: 7.123456789,
                pue: 1.2000000001,
                alpha: 1.0,
                energy_wh: 0.12345678912345678,
            },
            QuerySample {
                model_name: "DeepSeek-R1".to_string(),
                l_out: 12.0,
                l_eff: 512.0,
                tps: 1300.0,
                p_node_kw: 14.1,
                pue: 1.05,
                alpha: 2.5,
                energy_wh: 1e-7,
            },
        ];
        let csv = samples_to_csv(&samples);
        assert!(csv.starts_with(SAMPLE_CSV_HEADER));
        let parsed = samples_from_csv(&csv).unwrap();
        assert_eq!(samples, parsed);
    }

    #[test]
    fn fit_document_layout() {
        let model = TpsModel {
            model_name: "DeepSeek-R1".to_string(),
            beta0: 10.553042,
            beta1: -0.539,
            beta2: -0.00434,
            tps_cap: 1300.0,
            n_obs: 3,
        };
        let doc = fit_document(&[model]);
        assert!(doc.contains("DeepSeek-R1"));
        assert!(doc.contains("10.5530"));
        assert!(doc.contains("n_obs"));
        assert!(doc.lines().count() == 2);
    }
}
