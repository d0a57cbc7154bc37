//! Quantile-parameterized distributions with deterministic sampling.
//!
//! Node power, PUE, and efficiency multipliers are log-normals specified by
//! their P5/P95 quantiles; output length is an exponential specified by its
//! median. Sampling goes through the inverse CDF of each distribution, driven
//! by a counter-based uniform stream, so a draw is a pure function of
//! `(seed, stream_id, index)`.

use crate::error::{Error, Result};
use crate::rng::RngState;

/// Log-normal parameterized by the underlying normal of the log.
/// `sigma == 0` is a point mass at `exp(mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalParams {
    pub mu: f64,
    pub sigma: f64,
}

/// Exponential parameterized by rate; `median = ln 2 / rate` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialParams {
    pub rate: f64,
}

/// Standard normal quantile function (inverse CDF), Wichura's AS 241
/// PPND16 rational approximations. Relative accuracy around 1e-15 over
/// (0, 1); p outside (0, 1) returns +/- infinity.
#[allow(clippy::excessive_precision)] // published coefficients, kept verbatim
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = q
            * (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_812_8e4) * r
                + 6.726_577_092_700_870_1e4)
                * r
                + 4.592_195_393_154_987_1e4)
                * r
                + 1.373_169_376_550_946_1e4)
                * r
                + 1.971_590_950_306_551_3e3)
                * r
                + 1.331_416_678_917_843_8e2)
                * r
                + 3.387_132_872_796_366_608e0);
        let den = ((((((5.226_495_278_852_545_6e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_6e4)
            * r
            + 5.394_196_021_424_751_1e3)
            * r
            + 6.871_870_074_920_579_1e2)
            * r
            + 4.231_333_070_160_091_1e1)
            * r
            + 1.0;
        return num / den;
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4e0)
            * r
            + 3.647_848_324_763_204_5e0)
            * r
            + 5.769_497_221_460_691e0)
            * r
            + 4.630_337_846_156_545e0)
            * r
            + 1.423_437_110_749_683_5e0;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8e0)
            * r
            + 2.053_191_626_637_758_9e0)
            * r
            + 1.0;
        num / den
    } else {
        let r = r - 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_9e-1)
            * r
            + 1.784_826_539_917_291_3e0)
            * r
            + 5.463_784_911_164_114_5e0)
            * r
            + 6.657_904_643_501_103_8e0;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Fit a log-normal to its 5th and 95th percentiles.
///
/// `mu = (ln p5 + ln p95) / 2`, `sigma = (ln p95 - ln p5) / (2 z)` with
/// `z` the standard-normal 95th percentile. Equal quantiles give a point
/// mass (`sigma = 0`).
pub fn lognormal_from_quantiles(p5: f64, p95: f64) -> Result<LogNormalParams> {
    if !(p5 > 0.0) || !(p95 >= p5) {
        return Err(Error::InvalidQuantiles { p5, p95 });
    }
    let z95 = normal_quantile(0.95);
    let (lo, hi) = (p5.ln(), p95.ln());
    Ok(LogNormalParams {
        mu: 0.5 * (lo + hi),
        sigma: (hi - lo) / (2.0 * z95),
    })
}

/// Fit an exponential to its median: `rate = ln 2 / median`.
pub fn exponential_from_median(median: f64) -> Result<ExponentialParams> {
    if !(median > 0.0) {
        return Err(Error::InvalidArgument {
            name: "median",
            value: median,
            requirement: "> 0",
        });
    }
    Ok(ExponentialParams {
        rate: std::f64::consts::LN_2 / median,
    })
}

impl LogNormalParams {
    /// Inverse CDF at probability `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        (self.mu + self.sigma * normal_quantile(p)).exp()
    }

    /// Median, `exp(mu)`.
    pub fn median(&self) -> f64 {
        self.mu.exp()
    }
}

impl ExponentialParams {
    /// Inverse CDF at probability `p`: `-ln(1 - p) / rate`.
    pub fn quantile(&self, p: f64) -> f64 {
        -(-p).ln_1p() / self.rate
    }

    pub fn median(&self) -> f64 {
        std::f64::consts::LN_2 / self.rate
    }
}

/// Draw from a log-normal at `(rng, index)`: `exp(mu + sigma * N)` for the
/// inverse-CDF standard normal `N` of the uniform at those coordinates.
pub fn sample_lognormal(params: &LogNormalParams, rng: &RngState, index: u64) -> f64 {
    if params.sigma == 0.0 {
        return params.mu.exp();
    }
    (params.mu + params.sigma * normal_quantile(rng.uniform(index))).exp()
}

/// Draw from an exponential at `(rng, index)` via the inverse CDF.
pub fn sample_exponential(params: &ExponentialParams, rng: &RngState, index: u64) -> f64 {
    let u = rng.uniform(index);
    -(-u).ln_1p() / params.rate
}
