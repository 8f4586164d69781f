//! Deterministic seeded sampling of chart points and probe vectors.
//!
//! Every stochastic choice in the suite flows through [`Sampler`], seeded from
//! a 64-bit master seed mixed with a stable string key, so identical configs
//! reproduce identical reports bit for bit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fraction shaved off each side of a domain box before sampling, to keep
/// points away from boundary conditioning problems.
pub const DOMAIN_SHRINK: f64 = 0.1;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seed derived from the master seed and a stable string key (FNV-1a), so
    /// independent check jobs get decoupled but reproducible streams.
    pub fn for_key(seed: u64, key: &str) -> Self {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in key.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        Self::new(seed ^ h)
    }

    /// Uniform in [0,1), built from the top 53 bits of the stream.
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Point drawn from the box shrunk by [`DOMAIN_SHRINK`] per side.
    pub fn point(&mut self, domain: &[[f64; 2]]) -> Vec<f64> {
        domain
            .iter()
            .map(|&[lo, hi]| {
                let pad = (hi - lo) * DOMAIN_SHRINK;
                self.in_range(lo + pad, hi - pad)
            })
            .collect()
    }

    /// Probe vector with components uniform in [-1, 1].
    pub fn probe(&mut self, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.in_range(-1.0, 1.0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let mut a = Sampler::for_key(42, "eq2.8");
        let mut b = Sampler::for_key(42, "eq2.8");
        for _ in 0..16 {
            assert_eq!(a.unit().to_bits(), b.unit().to_bits());
        }
        let mut c = Sampler::for_key(42, "eq2.9");
        let (x, y) = (Sampler::for_key(42, "eq2.8").unit(), c.unit());
        assert_ne!(x.to_bits(), y.to_bits());
    }

    #[test]
    fn points_respect_shrunk_box() {
        let mut s = Sampler::new(7);
        let domain = [[-2.0, 2.0], [0.0, 1.0]];
        for _ in 0..100 {
            let p = s.point(&domain);
            assert!(p[0] >= -1.6 && p[0] <= 1.6);
            assert!(p[1] >= 0.1 && p[1] <= 0.9);
        }
    }
}
