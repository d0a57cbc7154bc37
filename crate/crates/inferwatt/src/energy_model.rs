//! Per-query energy arithmetic.
//!
//! `E_query = (PUE / 3.6) * (P_node * L_eff / TPS)` in watt-hours; the 3.6
//! converts kilowatt-seconds to watt-hours. Variants: effective length may
//! count output tokens only or input plus output, and node power may be an
//! independent draw or coupled linearly to throughput.

use crate::error::{Error, Result};

/// A GPU node's power envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSpec {
    pub gpu_count: u32,
    pub p_max_kw: f64,
    pub p_idle_kw: f64,
}

/// Reference 8xH100 node power draws.
pub const REFERENCE_GPU_COUNT: u32 = 8;
pub const REFERENCE_P_MAX_KW: f64 = 11.3;
pub const REFERENCE_P_IDLE_KW: f64 = 2.7;

impl NodeSpec {
    /// Node for `gpu_count` H100s: the 8-GPU envelope scaled linearly and
    /// rounded to 0.1 kW (8 -> 11.3 kW, 10 -> 14.1 kW).
    pub fn h100(gpu_count: u32) -> Self {
        let scale = gpu_count as f64 / REFERENCE_GPU_COUNT as f64;
        let round1 = |x: f64| (x * 10.0).round() / 10.0;
        NodeSpec {
            gpu_count,
            p_max_kw: round1(REFERENCE_P_MAX_KW * scale),
            p_idle_kw: round1(REFERENCE_P_IDLE_KW * scale),
        }
    }
}

/// What counts toward the energy-weighting token length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectiveLengthMode {
    OutputOnly,
    InputPlusOutput,
}

/// Whether node power is drawn independently or follows throughput.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    Independent,
    Coupled,
}

/// Energy of one query in watt-hours.
pub fn energy_per_query(pue: f64, p_node_kw: f64, l_eff: f64, tps: f64) -> Result<f64> {
    if !(tps > 0.0) {
        return Err(Error::InvalidArgument { name: "tps", value: tps, requirement: "> 0" });
    }
    if !(pue >= 1.0) {
        return Err(Error::InvalidArgument { name: "pue", value: pue, requirement: ">= 1" });
    }
    Ok((pue / 3.6) * (p_node_kw * l_eff / tps))
}

/// Token length that scales energy, per mode.
pub fn effective_length(l_in: f64, l_out: f64, mode: EffectiveLengthMode) -> f64 {
    match mode {
        EffectiveLengthMode::OutputOnly => l_out,
        EffectiveLengthMode::InputPlusOutput => l_in + l_out,
    }
}

/// Node power when coupled to throughput: linear from idle at zero TPS to
/// 0.9 P_max at the plateau cap.
pub fn coupled_node_power(tps: f64, tps_cap: f64, node: &NodeSpec) -> Result<f64> {
    if !(tps >= 0.0) || tps > tps_cap {
        return Err(Error::InvalidArgument {
            name: "tps",
            value: tps,
            requirement: "in [0, tps_cap]",
        });
    }
    Ok(node.p_idle_kw + (0.9 * node.p_max_kw - node.p_idle_kw) * (tps / tps_cap))
}

/// Apply an efficiency multiplier: alpha scales throughput up, so energy
/// divides by alpha.
pub fn apply_alpha(energy_wh: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument { name: "alpha", value: alpha, requirement: "> 0" });
    }
    Ok(energy_wh / alpha)
}
