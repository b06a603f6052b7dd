//! Counter-based random substreams.
//!
//! Every trial owns a `(seed, stream_index)` pair; the `k`-th draw of a stream is
//! a pure function of that pair and `k`, so results never depend on how trials
//! are scheduled across threads.

use num_complex::Complex64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    key: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let key = mix64(seed ^ mix64(stream_index.wrapping_add(GOLDEN)));
        Self {
            seed,
            stream_index,
            key,
            counter: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform on (0, 1].
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller (one of the pair is discarded).
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
    pub fn next_cn(&mut self) -> Complex64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        Complex64::new(r * c, r * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_draws() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 4);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_in_open_closed_unit_interval() {
        let mut r = RngStream::new(1, 0);
        let mut sum = 0.0;
        let n = 200_000;
        for _ in 0..n {
            let u = r.next_f64();
            assert!(u > 0.0 && u <= 1.0);
            sum += u;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.005);
    }

    #[test]
    fn complex_gaussian_moments() {
        let mut r = RngStream::new(11, 0);
        let n = 400_000;
        let (mut p, mut re, mut re2) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let z = r.next_cn();
            p += z.norm_sqr();
            re += z.re;
            re2 += z.re * z.re;
        }
        let n = n as f64;
        assert!((p / n - 1.0).abs() < 0.01);
        assert!((re / n).abs() < 0.01);
        assert!((re2 / n - 0.5).abs() < 0.01);
    }
}
