//! Randomized range finders.
//!
//! [`adaptive_rangefinder`] grows an orthonormal basis one Gaussian probe at a
//! time and stops once `ℓ` consecutive deflated probes all have norm at most
//! `ε / (10·√(2/π))`, which certifies `‖A − QQᵀA‖ ≤ ε` with probability at
//! least `1 − min(m, n)·10^(−ℓ)`. [`subspace_iteration`] then sharpens the basis
//! with `q` rounds of QR-reorthonormalized products with `Aᵀ` and `A`.
//! [`fixed_rank_rangefinder`] samples `(AAᵀ)^q·A·Ω` for a fixed `k + s` block.

use std::collections::VecDeque;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{
    axpy, dot, gaussian_matrix, gaussian_vector, norm2, orthonormalize, svd_dense, DenseMatrix,
    RngSeed,
};
use crate::operators::LinearOperator;

/// Default cap on the adaptive rank when `max_rank` is not given.
pub const DEFAULT_MAX_RANK: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct RangeFinderConfig {
    /// Target accuracy ε for `‖A − QQᵀA‖`.
    pub tolerance: f64,
    /// Number of probes ℓ checked by the stopping rule.
    pub block: usize,
    /// Subspace iterations q.
    pub power: usize,
    /// Oversampling s (fixed-rank mode and bound reports).
    pub oversample: usize,
    /// Balance parameter p with `0 ≤ p ≤ s` (bound reports).
    pub balance: usize,
    pub seed: RngSeed,
    /// Defaults to `min(m, n, 1000)`.
    pub max_rank: Option<usize>,
    /// When set, sample a fixed `k + s` block instead of adapting.
    pub target_rank: Option<usize>,
}

impl Default for RangeFinderConfig {
    fn default() -> Self {
        RangeFinderConfig {
            tolerance: 1e-3,
            block: 10,
            power: 1,
            oversample: 5,
            balance: 0,
            seed: RngSeed(0),
            max_rank: None,
            target_rank: None,
        }
    }
}

impl RangeFinderConfig {
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.block == 0 {
            return Err(Error::invalid("block size must be at least 1"));
        }
        if self.balance > self.oversample {
            return Err(Error::invalid(format!(
                "balance p = {} exceeds oversampling s = {}",
                self.balance, self.oversample
            )));
        }
        if let Some(r) = self.max_rank {
            if r > m.min(n) {
                return Err(Error::invalid(format!("max_rank {r} exceeds min(m, n) = {}", m.min(n))));
            }
        }
        Ok(())
    }

    pub fn resolved_max_rank(&self, m: usize, n: usize) -> usize {
        self.max_rank.unwrap_or_else(|| m.min(n).min(DEFAULT_MAX_RANK))
    }
}

/// Orthonormal basis for an approximate range of `A`.
#[derive(Debug, Clone)]
pub struct RangeBasis {
    /// `m × rank`, orthonormal columns.
    pub q_basis: DenseMatrix,
    pub rank: usize,
    /// Gaussian probe vectors drawn.
    pub probes_used: usize,
    /// Probabilistic estimate of `‖A − QQᵀA‖` (`10·√(2/π)·max` of the final
    /// probe norms); NaN when no adaptive estimate was made.
    pub residual_estimate: f64,
}

impl RangeBasis {
    fn from_columns(m: usize, cols: &[Vec<f64>], probes_used: usize, residual_estimate: f64) -> Self {
        RangeBasis {
            q_basis: DenseMatrix::from_columns(m, cols),
            rank: cols.len(),
            probes_used,
            residual_estimate,
        }
    }
}

/// Threshold on probe norms used by the adaptive stopping rule.
pub fn probe_threshold(tolerance: f64) -> f64 {
    tolerance / (10.0 * (2.0 / PI).sqrt())
}

fn project_out(y: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let c = dot(q, y);
        axpy(-c, q, y);
    }
}

fn draw(op: &dyn LinearOperator, cfg: &RangeFinderConfig, counter: &mut u64, basis: &[Vec<f64>]) -> Result<Vec<f64>> {
    let omega = gaussian_vector(op.ncols(), &mut cfg.seed.stream(*counter));
    *counter += 1;
    let mut y = op.apply(&omega)?;
    project_out(&mut y, basis);
    Ok(y)
}

pub fn adaptive_rangefinder(op: &dyn LinearOperator, cfg: &RangeFinderConfig) -> Result<RangeBasis> {
    let (m, n) = (op.nrows(), op.ncols());
    if m == 0 || n == 0 {
        return Err(Error::invalid("operator dimensions must be positive"));
    }
    cfg.validate(m, n)?;
    let full = m.min(n);
    let max_rank = cfg.resolved_max_rank(m, n);
    let ell = cfg.block.min(full);
    let threshold = probe_threshold(cfg.tolerance);

    let mut next_probe = 0u64;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut pending: VecDeque<(Vec<f64>, f64)> = VecDeque::with_capacity(ell);
    for _ in 0..ell {
        let y = draw(op, cfg, &mut next_probe, &basis)?;
        let nrm = norm2(&y);
        pending.push_back((y, nrm));
    }
    let max_pending = |p: &VecDeque<(Vec<f64>, f64)>| p.iter().fold(0.0f64, |a, (_, nv)| a.max(*nv));

    while max_pending(&pending) > threshold {
        if basis.len() == full {
            // The basis spans the whole range; what is left is rounding.
            break;
        }
        if basis.len() == max_rank {
            let est = 10.0 * (2.0 / PI).sqrt() * max_pending(&pending);
            return Err(Error::RankOverflow {
                max_rank,
                partial: Box::new(RangeBasis::from_columns(m, &basis, next_probe as usize, est)),
            });
        }
        let (mut y, _) = pending.pop_front().expect("pending probes");
        // Deflate against the current basis, twice for orthogonality.
        project_out(&mut y, &basis);
        project_out(&mut y, &basis);
        let nrm = norm2(&y);
        if nrm > 0.0 {
            y.iter_mut().for_each(|v| *v /= nrm);
            basis.push(y);
        }
        let y_new = draw(op, cfg, &mut next_probe, &basis)?;
        let q = basis.last().cloned();
        if let Some(q) = q.filter(|_| nrm > 0.0) {
            for (yi, nv) in pending.iter_mut() {
                let c = dot(&q, yi);
                axpy(-c, &q, yi);
                *nv = norm2(yi);
            }
        }
        let nrm_new = norm2(&y_new);
        pending.push_back((y_new, nrm_new));
    }
    let est = 10.0 * (2.0 / PI).sqrt() * max_pending(&pending);
    Ok(RangeBasis::from_columns(m, &basis, next_probe as usize, est))
}

/// `power` rounds of `Q̃ = qr(AᵀQ)`, `Q = qr(AQ̃)`; the rank is unchanged.
pub fn subspace_iteration(op: &dyn LinearOperator, start: &RangeBasis, power: usize) -> Result<RangeBasis> {
    if power == 0 || start.rank == 0 {
        return Ok(start.clone());
    }
    let mut q = start.q_basis.clone();
    for _ in 0..power {
        let yt = op.apply_transpose_block(&q)?;
        let qt = orthonormalize(&yt)?;
        let y = op.apply_block(&qt)?;
        q = orthonormalize(&y)?;
    }
    Ok(RangeBasis {
        rank: q.cols(),
        q_basis: q,
        probes_used: start.probes_used,
        residual_estimate: start.residual_estimate,
    })
}

/// Orthonormal basis for the range of `(AAᵀ)^q·A·Ω` with `Ω` an `n × (k + s)`
/// Gaussian draw. Directions the sample does not actually reach (numerical
/// rank below `k + s`) are dropped.
pub fn fixed_rank_rangefinder(op: &dyn LinearOperator, k: usize, cfg: &RangeFinderConfig) -> Result<RangeBasis> {
    let (m, n) = (op.nrows(), op.ncols());
    let width = k + cfg.oversample;
    if width == 0 || width > m.min(n) {
        return Err(Error::invalid(format!(
            "k + s = {width} must lie in [1, min(m, n) = {}]",
            m.min(n)
        )));
    }
    if cfg.balance > cfg.oversample {
        return Err(Error::invalid("balance p exceeds oversampling s"));
    }
    let omega = gaussian_matrix(n, width, cfg.seed)?;
    let q = orthonormalize(&op.apply_block(&omega)?)?;
    let start = RangeBasis {
        rank: width,
        q_basis: q,
        probes_used: width,
        residual_estimate: f64::NAN,
    };
    let basis = subspace_iteration(op, &start, cfg.power)?;
    trim_null_directions(op, basis)
}

fn trim_null_directions(op: &dyn LinearOperator, basis: RangeBasis) -> Result<RangeBasis> {
    let bt = op.apply_transpose_block(&basis.q_basis)?; // n × r, equals (QᵀA)ᵀ
    let f = svd_dense(&bt)?;
    let tol = (bt.rows().max(bt.cols()) as f64) * f64::EPSILON * f.sigma.first().copied().unwrap_or(0.0);
    let keep = f.sigma.iter().filter(|&&s| s > tol).count();
    if keep == basis.rank {
        return Ok(basis);
    }
    // Rotate onto the left singular directions of QᵀA and keep the live ones.
    let w = f.v.leading_columns(keep);
    let q = basis.q_basis.matmul(&w)?;
    Ok(RangeBasis {
        rank: keep,
        q_basis: q,
        ..basis
    })
}

/// Adaptive range finder followed by subspace iteration, or the fixed-rank
/// sampler when `cfg.target_rank` is set.
pub fn range_basis(op: &dyn LinearOperator, cfg: &RangeFinderConfig) -> Result<RangeBasis> {
    match cfg.target_rank {
        Some(k) => fixed_rank_rangefinder(op, k, cfg),
        None => {
            let q0 = adaptive_rangefinder(op, cfg)?;
            subspace_iteration(op, &q0, cfg.power)
        }
    }
}

/// `‖A − QQᵀA‖` by dense materialization; intended for test-scale operators.
pub fn dense_residual_norm(a: &DenseMatrix, q: &DenseMatrix) -> Result<f64> {
    let qta = q.tr_matmul(a)?;
    let proj = q.matmul(&qta)?;
    crate::linalg::spectral_norm(&a.sub(&proj)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;
    use crate::operators::{dense_operator, synthetic_operator, ZeroOperator};

    fn defect(q: &DenseMatrix) -> f64 {
        if q.cols() == 0 {
            return 0.0;
        }
        let qtq = q.tr_matmul(q).unwrap();
        spectral_norm(&qtq.sub(&DenseMatrix::identity(q.cols())).unwrap()).unwrap()
    }

    fn geometric(n: usize, ratio: f64) -> Vec<f64> {
        (0..n).map(|i| ratio.powi(i as i32)).collect()
    }

    #[test]
    fn zero_operator_gives_empty_basis() {
        let op = ZeroOperator { rows: 6, cols: 4 };
        let b = adaptive_rangefinder(&op, &RangeFinderConfig::default()).unwrap();
        assert_eq!(b.rank, 0);
        assert_eq!(b.q_basis.shape(), (6, 0));
    }

    #[test]
    fn numerically_rank_one() {
        let mut sigma = vec![1.0];
        sigma.extend(std::iter::repeat_n(1e-12, 19));
        let (op, _) = synthetic_operator(&sigma, 20, 20, RngSeed(3)).unwrap();
        for seed in 0..10 {
            let cfg = RangeFinderConfig {
                tolerance: 1e-6,
                seed: RngSeed(seed),
                ..Default::default()
            };
            assert_eq!(adaptive_rangefinder(&op, &cfg).unwrap().rank, 1);
        }
    }

    #[test]
    fn geometric_spectrum_rank_and_accuracy() {
        let sigma = geometric(64, 0.5);
        let (op, _) = synthetic_operator(&sigma, 64, 64, RngSeed(99)).unwrap();
        let a = op.to_dense().unwrap();
        let mut ok = 0;
        for seed in 0..100 {
            let cfg = RangeFinderConfig {
                tolerance: 1e-3,
                seed: RngSeed(seed),
                ..Default::default()
            };
            let b = adaptive_rangefinder(&op, &cfg).unwrap();
            // The ε/(10√(2/π)) probe threshold stops near σ_{r+1} ≈ ε/20.
            assert!((14..=19).contains(&b.rank), "rank {}", b.rank);
            assert!(defect(&b.q_basis) <= 1e-12);
            let res = dense_residual_norm(&a, &b.q_basis).unwrap();
            assert!(res >= sigma[b.rank] - 1e-12, "Eckart-Young floor");
            if res <= 1e-3 {
                ok += 1;
            }
        }
        assert!(ok >= 99, "{ok}/100");
    }

    #[test]
    fn rank_overflow_carries_partial_basis() {
        let (op, _) = synthetic_operator(&vec![1.0; 30], 30, 30, RngSeed(1)).unwrap();
        let cfg = RangeFinderConfig {
            max_rank: Some(5),
            ..Default::default()
        };
        match adaptive_rangefinder(&op, &cfg) {
            Err(Error::RankOverflow { max_rank, partial }) => {
                assert_eq!(max_rank, 5);
                assert_eq!(partial.rank, 5);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn full_space_terminates_without_overflow() {
        let a = gaussian_matrix(12, 8, RngSeed(4)).unwrap();
        let op = dense_operator(a.clone());
        let cfg = RangeFinderConfig {
            tolerance: 1e-300,
            ..Default::default()
        };
        let b = adaptive_rangefinder(&op, &cfg).unwrap();
        assert_eq!(b.rank, 8);
        assert!(dense_residual_norm(&a, &b.q_basis).unwrap() < 1e-13);
    }

    #[test]
    fn deterministic_per_seed() {
        let (op, _) = synthetic_operator(&geometric(30, 0.6), 40, 30, RngSeed(2)).unwrap();
        let cfg = RangeFinderConfig::default();
        let a = range_basis(&op, &cfg).unwrap();
        let b = range_basis(&op, &cfg).unwrap();
        assert_eq!(a.q_basis, b.q_basis);
    }

    #[test]
    fn power_zero_is_identity() {
        let (op, _) = synthetic_operator(&geometric(20, 0.5), 20, 20, RngSeed(2)).unwrap();
        let start = adaptive_rangefinder(&op, &RangeFinderConfig::default()).unwrap();
        let same = subspace_iteration(&op, &start, 0).unwrap();
        assert_eq!(same.q_basis, start.q_basis);
    }

    #[test]
    fn power_iteration_aligns_with_top_singular_vector() {
        // Symmetric positive definite with sigma1/sigma2 = 2.
        let (op, f) = synthetic_operator(&[2.0, 1.0, 0.5, 0.25], 4, 4, RngSeed(8)).unwrap();
        let u = f.u.clone();
        let a = u.scale_columns(&f.sigma).matmul(&u.transpose()).unwrap();
        assert!(a.is_symmetric(1e-14));
        let sym = dense_operator(a);
        let start = RangeBasis {
            q_basis: DenseMatrix::from_columns(4, &[vec![0.5, 0.5, 0.5, 0.5]]),
            rank: 1,
            probes_used: 0,
            residual_estimate: f64::NAN,
        };
        let out = subspace_iteration(&sym, &start, 10).unwrap();
        assert_eq!(out.rank, 1);
        // Power-method oracle: the top eigenvector of the materialized matrix.
        let top = f.u.column(0);
        let cos = dot(&out.q_basis.column(0), &top).abs().min(1.0);
        assert!(cos.acos() <= 1e-6, "angle {:e}", cos.acos());
        let _ = op;
    }

    #[test]
    fn iteration_does_not_increase_median_residual() {
        let sigma = geometric(40, 0.7);
        let (op, _) = synthetic_operator(&sigma, 50, 40, RngSeed(13)).unwrap();
        let a = op.to_dense().unwrap();
        let (mut r0, mut r2) = (Vec::new(), Vec::new());
        for seed in 0..100 {
            let cfg = RangeFinderConfig {
                target_rank: Some(6),
                oversample: 2,
                power: 0,
                seed: RngSeed(seed),
                ..Default::default()
            };
            let b0 = range_basis(&op, &cfg).unwrap();
            let b2 = range_basis(&op, &RangeFinderConfig { power: 2, ..cfg }).unwrap();
            r0.push(dense_residual_norm(&a, &b0.q_basis).unwrap());
            r2.push(dense_residual_norm(&a, &b2.q_basis).unwrap());
        }
        r0.sort_by(f64::total_cmp);
        r2.sort_by(f64::total_cmp);
        assert!(r2[50] <= r0[50], "median {} vs {}", r2[50], r0[50]);
    }

    #[test]
    fn fixed_rank_examples() {
        let (op, _) = synthetic_operator(&[3.0], 6, 5, RngSeed(1)).unwrap();
        let cfg = RangeFinderConfig {
            oversample: 0,
            power: 0,
            ..Default::default()
        };
        let b = fixed_rank_rangefinder(&op, 1, &cfg).unwrap();
        assert_eq!(b.rank, 1);
        let a = op.to_dense().unwrap();
        assert!(dense_residual_norm(&a, &b.q_basis).unwrap() <= 1e-12 * 3.0);

        // Exact low rank with oversampling: extra columns are trimmed, residual vanishes.
        let (op, _) = synthetic_operator(&[4.0, 2.0, 1.0], 20, 15, RngSeed(2)).unwrap();
        let a = op.to_dense().unwrap();
        let cfg = RangeFinderConfig {
            oversample: 4,
            power: 1,
            ..Default::default()
        };
        let b = fixed_rank_rangefinder(&op, 3, &cfg).unwrap();
        assert_eq!(b.rank, 3);
        assert!(defect(&b.q_basis) <= 1e-12);
        assert!(dense_residual_norm(&a, &b.q_basis).unwrap() <= 1e-12);

        assert!(fixed_rank_rangefinder(&op, 12, &cfg).is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let op = ZeroOperator { rows: 3, cols: 3 };
        for cfg in [
            RangeFinderConfig { tolerance: 0.0, ..Default::default() },
            RangeFinderConfig { block: 0, ..Default::default() },
            RangeFinderConfig { balance: 6, ..Default::default() },
            RangeFinderConfig { max_rank: Some(4), ..Default::default() },
        ] {
            assert!(matches!(adaptive_rangefinder(&op, &cfg), Err(Error::InvalidInput(_))));
        }
    }
}
