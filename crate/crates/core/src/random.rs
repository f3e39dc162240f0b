//! Seeded random instance generation for certification suites.
//!
//! Each instance draws from its own ChaCha stream keyed by
//! `(suite seed, instance index)`, so results do not depend on how instances
//! are distributed across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermitian::HermitianMatrix;
use crate::linalg::{CMatrix, C64};

/// Diagonal shift keeping generated PD matrices inside the open cone.
pub const PD_SHIFT: f64 = 1e-3;

pub fn seed_bytes(seed: u64) -> [u8; 32] {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&seed.rotate_left(32).wrapping_mul(0x9E37_79B9_7F4A_7C15).to_le_bytes());
    bytes
}

pub struct InstanceRng {
    rng: ChaCha8Rng,
}

impl InstanceRng {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(seed_bytes(seed));
        rng.set_stream(index);
        InstanceRng { rng }
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian, `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.gaussian() * s, self.gaussian() * s)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    /// Matrix of iid standard complex Gaussians.
    pub fn ginibre(&mut self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| self.complex_gaussian())
    }

    /// `(G + G*) / 2`.
    pub fn hermitian(&mut self, n: usize) -> HermitianMatrix {
        let g = self.ginibre(n);
        HermitianMatrix::symmetrized((&g + g.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Hermitian, rescaled to unit spectral radius.
    pub fn hermitian_unit(&mut self, n: usize) -> HermitianMatrix {
        let h = self.hermitian(n);
        let r = h.decompose().map(|d| d.spectral_radius()).unwrap_or(1.0);
        if r > 0.0 {
            h.scale(1.0 / r)
        } else {
            h
        }
    }

    /// `G G* + 1e-3 I`.
    pub fn pd(&mut self, n: usize) -> HermitianMatrix {
        self.psd_rank(n, n).lincomb(1.0, &HermitianMatrix::identity(n), PD_SHIFT)
    }

    /// `G G*` with `G` of shape `n x rank`.
    pub fn psd_rank(&mut self, n: usize, rank: usize) -> HermitianMatrix {
        let g = CMatrix::from_fn(n, rank, |_, _| self.complex_gaussian());
        HermitianMatrix::symmetrized(&g * g.adjoint())
    }

    /// Square matrix of iid standard complex Gaussians, not Hermitian.
    pub fn square(&mut self, n: usize) -> CMatrix {
        self.ginibre(n)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = InstanceRng::new(7, 3).hermitian(4);
        let b = InstanceRng::new(7, 3).hermitian(4);
        let c = InstanceRng::new(7, 4).hermitian(4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn pd_instances_are_pd() {
        let mut r = InstanceRng::new(1, 0);
        for n in 1..=6 {
            let d = r.pd(n).decompose().unwrap();
            assert!(d.lambda_min() >= PD_SHIFT * (1.0 - 1e-9));
        }
    }
}
