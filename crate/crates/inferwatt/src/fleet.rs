//! Fleet-scale extrapolation: the node-to-fleet overhead factor and daily
//! energy totals.

use crate::error::{Error, Result};

/// Components of the fleet overhead factor: a sinusoidal daily load profile
/// entering through its mean, node redundancy, and interconnect energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaComponents {
    pub mean_utilization: f64,
    pub p_max_kw: f64,
    pub p_idle_kw: f64,
    pub redundancy_factor: f64,
    pub interconnect_factor: f64,
}

impl Default for BetaComponents {
    /// 50-100% sinusoidal load (mean 0.75) on the 11.3/2.7 kW node, 10%
    /// redundancy, 12% interconnect.
    fn default() -> Self {
        BetaComponents {
            mean_utilization: 0.75,
            p_max_kw: 11.3,
            p_idle_kw: 2.7,
            redundancy_factor: 1.10,
            interconnect_factor: 1.12,
        }
    }
}

impl BetaComponents {
    /// Daily energy of one node at constant full load, kWh.
    pub fn uniform_daily_kwh(&self) -> f64 {
        self.p_max_kw * 24.0
    }

    /// Daily energy of one node under the sinusoidal profile, kWh:
    /// idle floor plus dynamic power at mean utilization.
    pub fn sinusoidal_daily_kwh(&self) -> f64 {
        self.p_idle_kw * 24.0 + (self.p_max_kw - self.p_idle_kw) * 24.0 * self.mean_utilization
    }
}

/// Fleet sizing for daily totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleetSpec {
    pub queries_per_day: u64,
    pub beta: f64,
}

/// The fleet overhead factor.
///
/// Utilization term: a fleet sized for peak load runs 1/f-bar more node-days
/// per useful query, each consuming E_sin instead of E_uniform; redundancy
/// and interconnect multiply on top.
pub fn compute_beta(c: &BetaComponents) -> Result<f64> {
    if !(c.mean_utilization > 0.0 && c.mean_utilization <= 1.0) {
        return Err(Error::InvalidArgument {
            name: "mean_utilization",
            value: c.mean_utilization,
            requirement: "in (0, 1]",
        });
    }
    let beta_util = (1.0 / c.mean_utilization) * (c.sinusoidal_daily_kwh() / c.uniform_daily_kwh());
    Ok(c.redundancy_factor * beta_util * c.interconnect_factor)
}

/// Daily fleet energy in GWh: mean per-query watt-hours times queries per
/// day times the overhead factor.
pub fn daily_energy(mean_energy_per_query_wh: f64, queries_per_day: u64, beta: f64) -> f64 {
    mean_energy_per_query_wh * queries_per_day as f64 * beta / 1e9
}
