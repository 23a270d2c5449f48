//! Seeded Gaussian sampling.
//!
//! Draws come from ChaCha8 (a counter-based stream cipher generator) through
//! the ziggurat `StandardNormal` sampler. A seed selects the key; independent
//! sub-streams are selected with [`RngSeed::stream`], so block draws do not
//! depend on the order in which they are requested.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Deterministically derives an unrelated seed (SplitMix64 finalizer).
    pub fn derive(self, tag: u64) -> RngSeed {
        let mut z = self.0 ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Generator for sub-stream `index` of this seed.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(index);
        rng
    }
}

pub fn gaussian_vector(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// `rows × cols` matrix of i.i.d. standard normal entries, filled row-major.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: RngSeed) -> Result<DenseMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid(format!(
            "gaussian_matrix needs positive dimensions, got {rows}x{cols}"
        )));
    }
    let mut rng = seed.rng();
    Ok(DenseMatrix::from_raw(rows, cols, gaussian_vector(rows * cols, &mut rng)))
}
