//! Counter-based deterministic random values.
//!
//! Every draw is a pure function of `(seed, stream_id, index)`, so results
//! are identical across platforms and for any number of workers. Streams are
//! cheap to split: give each independent consumer its own `stream_id`.
//! Not cryptographically secure.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xA076_1D64_78BD_642F;
const INDEX_SALT: u64 = 0xE703_7ED1_A0B4_28DB;

/// SplitMix64 finalizer; a bijection on u64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Coordinates of a deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState { seed, stream_id: 0 }
    }

    /// Same seed, different stream. Streams never share draws.
    pub fn stream(&self, stream_id: u64) -> Self {
        RngState { seed: self.seed, stream_id }
    }

    /// The raw 64-bit value at `index`. For a fixed state this is a
    /// bijection in `index`, so draws within a stream never collide.
    pub fn draw_u64(&self, index: u64) -> u64 {
        let key = mix64(self.seed ^ mix64(self.stream_id ^ STREAM_SALT));
        mix64(key.wrapping_add(mix64(index ^ INDEX_SALT)))
    }

    /// Uniform draw on the open interval (0, 1); never returns 0 or 1, so it
    /// is safe to feed inverse CDFs.
    pub fn uniform(&self, index: u64) -> f64 {
        // 53 high bits, offset to the midpoint of each lattice cell.
        ((self.draw_u64(index) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n).
    pub fn uniform_index(&self, index: u64, n: usize) -> usize {
        debug_assert!(n > 0);
        let u = self.uniform(index);
        ((u * n as f64) as usize).min(n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_coordinates_same_value() {
        let a = RngState::new(7).stream(3);
        let b = RngState::new(7).stream(3);
        for i in 0..1000 {
            assert_eq!(a.draw_u64(i), b.draw_u64(i));
        }
    }

    #[test]
    fn distinct_streams_diverge() {
        let a = RngState::new(7).stream(0);
        let b = RngState::new(7).stream(1);
        let same = (0..1000).filter(|&i| a.draw_u64(i) == b.draw_u64(i)).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn uniform_stays_in_open_interval() {
        let rng = RngState::new(123).stream(5);
        for i in 0..10_000 {
            let u = rng.uniform(i);
            assert!(u > 0.0 && u < 1.0, "u = {u} at index {i}");
        }
    }

    #[test]
    fn uniform_mean_is_centered() {
        let rng = RngState::new(99);
        let n = 10_000;
        let mean: f64 = (0..n).map(|i| rng.uniform(i)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean = {mean}");
    }

    #[test]
    fn streams_pass_correlation_smoke_test() {
        // Contract: |rho| < 0.05 over 10,000 pairs on distinct streams.
        let a = RngState::new(2024).stream(11);
        let b = RngState::new(2024).stream(12);
        let n = 10_000;
        let (xs, ys): (Vec<f64>, Vec<f64>) =
            (0..n).map(|i| (a.uniform(i), b.uniform(i))).unzip();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let mut cov = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for i in 0..n as usize {
            cov += (xs[i] - mx) * (ys[i] - my);
            vx += (xs[i] - mx).powi(2);
            vy += (ys[i] - my).powi(2);
        }
        let rho = cov / (vx.sqrt() * vy.sqrt());
        assert!(rho.abs() < 0.05, "rho = {rho}");
    }

    #[test]
    fn uniform_index_covers_range() {
        let rng = RngState::new(5).stream(2);
        let mut seen = [false; 3];
        for i in 0..100 {
            seen[rng.uniform_index(i, 3)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
