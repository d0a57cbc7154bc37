//! Per-model token-throughput regression.
//!
//! `ln TPS = beta0 + beta1 ln L_in + beta2 ln L_out`, ordinary least squares
//! over a model's benchmark rows, with predictions capped at the maximum
//! observed TPS (the plateau). The slope system is solved on centered
//! log-features through the pseudoinverse of the 2x2 Gram matrix: for three
//! or more independent rows this is the unique OLS solution; for
//! underdetermined fits (one or two rows) it is the deterministic
//! minimum-norm slope solution with the intercept recovered through the
//! centroid.

use crate::benchmark_data::BenchmarkRecord;
use crate::error::{Error, Result};

/// Eigenvalues below `RANK_TOL * lambda_max` are treated as zero when the
/// Gram matrix is (pseudo)inverted.
const RANK_TOL: f64 = 1e-12;

/// Fitted log-linear throughput model for one benchmark model.
#[derive(Debug, Clone, PartialEq)]
pub struct TpsModel {
    pub model_name: String,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub tps_cap: f64,
    pub n_obs: usize,
}

/// Pseudoinverse-solve of the symmetric 2x2 system `S x = b`.
///
/// Closed-form eigendecomposition; eigenvalues below the relative rank
/// tolerance are dropped, which makes rank-deficient systems return the
/// minimum-norm solution.
fn solve_sym2_pinv(sxx: f64, sxy: f64, syy: f64, bx: f64, by: f64) -> (f64, f64) {
    let trace = sxx + syy;
    let diff = sxx - syy;
    let disc = (diff * diff + 4.0 * sxy * sxy).sqrt();
    let l1 = 0.5 * (trace + disc);
    let l2 = 0.5 * (trace - disc);

    // Eigenvector for eigenvalue l: (sxy, l - sxx) or (l - syy, sxy),
    // whichever is better conditioned.
    let eigvec = |l: f64| -> (f64, f64) {
        let (vx, vy) = if sxy.abs() > 0.0 {
            if (l - sxx).abs() > (l - syy).abs() {
                (sxy, l - sxx)
            } else {
                (l - syy, sxy)
            }
        } else if sxx >= syy {
            if (l - syy).abs() < (l - sxx).abs() { (0.0, 1.0) } else { (1.0, 0.0) }
        } else if (l - sxx).abs() < (l - syy).abs() {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let norm = (vx * vx + vy * vy).sqrt();
        if norm == 0.0 { (1.0, 0.0) } else { (vx / norm, vy / norm) }
    };

    let lmax = l1.abs().max(l2.abs());
    if lmax == 0.0 {
        return (0.0, 0.0);
    }
    let mut x = 0.0;
    let mut y = 0.0;
    for &l in &[l1, l2] {
        if l.abs() > RANK_TOL * lmax {
            let (vx, vy) = eigvec(l);
            let proj = (vx * bx + vy * by) / l;
            x += proj * vx;
            y += proj * vy;
        }
    }
    (x, y)
}

/// Fit the log-linear model to one model's records.
///
/// All rows are used, duplicates included. `tps_cap` is the maximum observed
/// TPS. Errors on an empty list or mixed model names.
pub fn fit_log_linear(records: &[&BenchmarkRecord]) -> Result<TpsModel> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let model_name = first.model_name.clone();
    for r in records {
        if r.model_name != model_name {
            return Err(Error::MixedModels {
                expected: model_name,
                found: r.model_name.clone(),
            });
        }
    }

    let n = records.len() as f64;
    let xs: Vec<f64> = records.iter().map(|r| r.l_in.ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.l_out.ln()).collect();
    let zs: Vec<f64> = records.iter().map(|r| r.tps.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mz = zs.iter().sum::<f64>() / n;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    let mut sxz = 0.0;
    let mut syz = 0.0;
    for i in 0..records.len() {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        let dz = zs[i] - mz;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        sxz += dx * dz;
        syz += dy * dz;
    }

    let (beta1, beta2) = solve_sym2_pinv(sxx, sxy, syy, sxz, syz);
    let beta0 = mz - beta1 * mx - beta2 * my;
    let tps_cap = records.iter().map(|r| r.tps).fold(f64::NEG_INFINITY, f64::max);

    Ok(TpsModel {
        model_name,
        beta0,
        beta1,
        beta2,
        tps_cap,
        n_obs: records.len(),
    })
}

impl TpsModel {
    /// Uncapped regression value; exposed for diagnostics.
    pub fn predict_uncapped(&self, l_in: f64, l_out: f64) -> f64 {
        (self.beta0 + self.beta1 * l_in.ln() + self.beta2 * l_out.ln()).exp()
    }
}

/// Predicted throughput at `(l_in, l_out)`, clipped at the plateau cap.
pub fn predict_tps(model: &TpsModel, l_in: f64, l_out: f64) -> Result<f64> {
    if !(l_in >= 1.0) {
        return Err(Error::InvalidArgument {
            name: "l_in",
            value: l_in,
            requirement: ">= 1",
        });
    }
    if !(l_out >= 1.0) {
        return Err(Error::InvalidArgument {
            name: "l_out",
            value: l_out,
            requirement: ">= 1",
        });
    }
    Ok(model.predict_uncapped(l_in, l_out).min(model.tps_cap))
}

/// Fit one model per distinct name, in first-appearance order.
pub fn fit_all(records: &[BenchmarkRecord]) -> Result<Vec<TpsModel>> {
    let names = crate::benchmark_data::model_names(records);
    names
        .iter()
        .map(|name| fit_log_linear(&crate::benchmark_data::records_for_model(records, name)))
        .collect()
}
