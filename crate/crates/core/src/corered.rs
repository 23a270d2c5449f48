//! Randomized SVD and the approximate core problem.
//!
//! Given `A ≈ U₁Σ₁V₁ᵀ` and `b`, the core problem is the bordered diagonal
//! system
//!
//! ```text
//!     [ σ₁          φ₁    ]
//! C = [    ⋱        ⋮     ]      φⱼ = ‖uⱼᵀb‖,   φ_tail = ‖b − U₁U₁ᵀb‖
//!     [       σ_t   φ_t   ]
//!     [       0     φ_tail]
//! ```
//!
//! Repeated singular values are grouped; within a group a Householder
//! reflector rotates `uⱼᵀb` onto its first axis so that only one coordinate
//! per group carries right-hand-side information. Groups with `φⱼ = 0` are
//! dropped, leaving a core of minimal dimension.

use crate::error::{Error, Result};
use crate::linalg::{norm2, svd_dense, DenseMatrix, Reflector, SvdFactors};
use crate::operators::LinearOperator;
use crate::rangefinder::{range_basis, RangeBasis, RangeFinderConfig};

/// Default relative tolerance for treating two singular values as equal.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-10;
/// Groups with `φⱼ ≤ DROP_TOL·‖b‖` are removed from the core.
pub const DROP_TOL: f64 = 1e-14;

/// `A ≈ u1·diag(sigma1)·v1ᵀ`, with `A_r = QQᵀA` for the sampled basis `Q`.
#[derive(Debug, Clone)]
pub struct RandSvd {
    pub u1: DenseMatrix,
    pub sigma1: Vec<f64>,
    pub v1: DenseMatrix,
    pub rank: usize,
    /// Range-finder diagnostics for the basis this factorization came from.
    pub probes_used: usize,
    pub residual_estimate: f64,
}

impl RandSvd {
    pub fn reconstruct(&self) -> DenseMatrix {
        self.u1
            .scale_columns(&self.sigma1)
            .matmul(&self.v1.transpose())
            .expect("consistent factor shapes")
    }

    /// Keeps the leading `r` singular triplets.
    pub fn truncated(&self, r: usize) -> RandSvd {
        let r = r.min(self.rank);
        RandSvd {
            u1: self.u1.leading_columns(r),
            sigma1: self.sigma1[..r].to_vec(),
            v1: self.v1.leading_columns(r),
            rank: r,
            probes_used: self.probes_used,
            residual_estimate: self.residual_estimate,
        }
    }

    /// Rank-`r` truncation of an exact SVD, in the same form as a randomized one.
    pub fn from_exact(f: &SvdFactors, r: usize) -> RandSvd {
        let r = r.min(f.sigma.len());
        RandSvd {
            u1: f.u.leading_columns(r),
            sigma1: f.sigma[..r].to_vec(),
            v1: f.v.leading_columns(r),
            rank: r,
            probes_used: 0,
            residual_estimate: f.sigma.get(r).copied().unwrap_or(0.0),
        }
    }
}

pub fn randomized_svd(op: &dyn LinearOperator, cfg: &RangeFinderConfig) -> Result<RandSvd> {
    let basis = range_basis(op, cfg)?;
    randomized_svd_from_basis(op, &basis)
}

/// Factorizes `QᵀA` for a given orthonormal basis `Q`.
pub fn randomized_svd_from_basis(op: &dyn LinearOperator, basis: &RangeBasis) -> Result<RandSvd> {
    let (m, n) = (op.nrows(), op.ncols());
    if basis.rank == 0 {
        return Ok(RandSvd {
            u1: DenseMatrix::zeros(m, 0),
            sigma1: Vec::new(),
            v1: DenseMatrix::zeros(n, 0),
            rank: 0,
            probes_used: basis.probes_used,
            residual_estimate: basis.residual_estimate,
        });
    }
    // (QᵀA)ᵀ = AᵀQ = W·Σ·Zᵀ  ⇒  QᵀA = Z·Σ·Wᵀ,  U₁ = Q·Z,  V₁ = W.
    let bt = op.apply_transpose_block(&basis.q_basis)?;
    let f = svd_dense(&bt)?;
    let r = f.sigma.len();
    let cutoff = (m.max(n) as f64) * f64::EPSILON * f.sigma.first().copied().unwrap_or(0.0);
    let keep = f.sigma.iter().take_while(|&&s| s > cutoff).count();
    let z = f.v.leading_columns(keep.min(r));
    let u1 = basis.q_basis.matmul(&z)?;
    let v1 = f.u.leading_columns(keep);
    let mut sigma1 = f.sigma;
    sigma1.truncate(keep);
    Ok(RandSvd {
        u1,
        sigma1,
        v1,
        rank: keep,
        probes_used: basis.probes_used,
        residual_estimate: basis.residual_estimate,
    })
}

/// One block of (numerically) equal singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreGroup {
    /// Multiplicity `h_j`.
    pub multiplicity: usize,
    /// Index of the group among all groups, including dropped ones.
    pub group_index: usize,
    /// Column indices into `U₁`/`V₁`.
    pub columns: Vec<usize>,
}

/// Reduced pair `{A₁₁, b₁}` in diagonal-plus-border form with its back map.
#[derive(Debug, Clone)]
pub struct CoreProblem {
    /// Strictly decreasing group representatives σⱼ.
    pub sigma: Vec<f64>,
    /// Strictly positive projected right-hand side φⱼ.
    pub phi: Vec<f64>,
    /// `‖b − U₁U₁ᵀb‖`.
    pub phi_tail: f64,
    /// `n × t` with orthonormal columns; `x̂ = back_map · y`.
    pub back_map: DenseMatrix,
    /// Retained groups, in core order.
    pub groups: Vec<CoreGroup>,
    /// Groups dropped because φⱼ vanished.
    pub dropped: Vec<CoreGroup>,
}

impl CoreProblem {
    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    /// Core problem without a back map; for working with the reduced system directly.
    pub fn from_parts(sigma: Vec<f64>, phi: Vec<f64>, phi_tail: f64) -> Result<CoreProblem> {
        if sigma.len() != phi.len() {
            return Err(Error::DimensionMismatch {
                context: "CoreProblem::from_parts",
                expected: sigma.len(),
                found: phi.len(),
            });
        }
        if sigma.iter().chain(&phi).chain(std::iter::once(&phi_tail)).any(|v| !v.is_finite()) {
            return Err(Error::invalid("core entries must be finite"));
        }
        if phi_tail < 0.0 {
            return Err(Error::invalid("phi_tail must be nonnegative"));
        }
        let t = sigma.len();
        let groups = (0..t)
            .map(|j| CoreGroup {
                multiplicity: 1,
                group_index: j,
                columns: vec![j],
            })
            .collect();
        Ok(CoreProblem {
            sigma,
            phi,
            phi_tail,
            back_map: DenseMatrix::identity(t),
            groups,
            dropped: Vec::new(),
        })
    }

    /// The augmented core matrix `C = [A₁₁, b₁]`, `(t+1) × (t+1)`.
    pub fn augmented_matrix(&self) -> DenseMatrix {
        let t = self.dim();
        let mut c = DenseMatrix::zeros(t + 1, t + 1);
        for j in 0..t {
            c.set(j, j, self.sigma[j]);
            c.set(j, t, self.phi[j]);
        }
        c.set(t, t, self.phi_tail);
        c
    }
}

/// Partitions indices of a nonincreasing sequence into runs whose members lie
/// within `cluster_tol` (relative) of the run's first value.
fn cluster(sigma: &[f64], cluster_tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &s) in sigma.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if sigma[g[0]] - s <= cluster_tol * sigma[g[0]] => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

pub fn build_core(svd: &RandSvd, b: &[f64], cluster_tol: f64) -> Result<CoreProblem> {
    let m = svd.u1.rows();
    if b.is_empty() {
        return Err(Error::invalid("right-hand side is empty"));
    }
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            context: "build_core",
            expected: m,
            found: b.len(),
        });
    }
    if !(cluster_tol >= 0.0) {
        return Err(Error::invalid("cluster_tol must be nonnegative"));
    }
    let n = svd.v1.rows();
    let utb = svd.u1.tr_matvec(b)?;
    let proj = svd.u1.matvec(&utb)?;
    let phi_tail = norm2(&crate::linalg::sub_vec(b, &proj));
    let bnorm = norm2(b);

    let mut sigma = Vec::new();
    let mut phi = Vec::new();
    let mut back_cols: Vec<Vec<f64>> = Vec::new();
    let mut groups = Vec::new();
    let mut dropped = Vec::new();
    for (gi, cols) in cluster(&svd.sigma1, cluster_tol).into_iter().enumerate() {
        let w: Vec<f64> = cols.iter().map(|&c| utb[c]).collect();
        let group = CoreGroup {
            multiplicity: cols.len(),
            group_index: gi,
            columns: cols.clone(),
        };
        let phi_j = norm2(&w);
        if phi_j <= DROP_TOL * bnorm {
            dropped.push(group);
            continue;
        }
        // S w = β e₁; flipping the sign makes φⱼ = |β| > 0, and the core
        // coordinate maps back through V_g·S·e₁ (times that sign).
        let h = Reflector::new(&w);
        let mut e1 = vec![0.0; w.len()];
        e1[0] = 1.0;
        h.apply(&mut e1);
        let sgn = if h.beta < 0.0 { -1.0 } else { 1.0 };
        let mut col = vec![0.0; n];
        for (k, &c) in cols.iter().enumerate() {
            let coef = sgn * e1[k];
            if coef != 0.0 {
                for (i, ci) in col.iter_mut().enumerate() {
                    *ci += coef * svd.v1.get(i, c);
                }
            }
        }
        sigma.push(svd.sigma1[cols[0]]);
        phi.push(phi_j);
        back_cols.push(col);
        groups.push(group);
    }
    Ok(CoreProblem {
        sigma,
        phi,
        phi_tail,
        back_map: DenseMatrix::from_columns(n, &back_cols),
        groups,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_vector, spectral_norm, RngSeed};
    use crate::operators::{synthetic_operator, ZeroOperator};
    use crate::rangefinder::dense_residual_norm;

    fn rand_svd_of(sigma: &[f64], m: usize, n: usize, seed: u64) -> RandSvd {
        let (_, f) = synthetic_operator(sigma, m, n, RngSeed(seed)).unwrap();
        RandSvd {
            rank: sigma.len(),
            u1: f.u,
            sigma1: f.sigma,
            v1: f.v,
            probes_used: 0,
            residual_estimate: f64::NAN,
        }
    }

    #[test]
    fn exact_rank_two_is_recovered() {
        let (op, _) = synthetic_operator(&[2.0, 0.5], 30, 20, RngSeed(4)).unwrap();
        let cfg = RangeFinderConfig {
            tolerance: 1e-6,
            ..Default::default()
        };
        let s = randomized_svd(&op, &cfg).unwrap();
        assert_eq!(s.rank, 2);
        assert!((s.sigma1[0] - 2.0).abs() < 1e-10 && (s.sigma1[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn zero_operator_has_rank_zero() {
        let s = randomized_svd(&ZeroOperator { rows: 5, cols: 3 }, &RangeFinderConfig::default()).unwrap();
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn reconstruction_equals_projection() {
        let sigma: Vec<f64> = (0..25).map(|i| 0.6f64.powi(i)).collect();
        let (op, _) = synthetic_operator(&sigma, 30, 25, RngSeed(5)).unwrap();
        let a = op.to_dense().unwrap();
        let basis = range_basis(&op, &RangeFinderConfig::default()).unwrap();
        let s = randomized_svd_from_basis(&op, &basis).unwrap();
        let ar = s.reconstruct();
        let proj = basis.q_basis.matmul(&basis.q_basis.tr_matmul(&a).unwrap()).unwrap();
        assert!(spectral_norm(&ar.sub(&proj).unwrap()).unwrap() < 1e-12);
        let res = spectral_norm(&a.sub(&ar).unwrap()).unwrap();
        assert!((res - dense_residual_norm(&a, &basis.q_basis).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn generic_core_flips_signs_into_back_map() {
        let s = rand_svd_of(&[3.0, 2.0, 1.0], 8, 5, 7);
        let b = gaussian_vector(8, &mut RngSeed(1).rng());
        let core = build_core(&s, &b, 0.0).unwrap();
        assert_eq!(core.sigma, s.sigma1);
        let utb = s.u1.tr_matvec(&b).unwrap();
        for j in 0..3 {
            assert!((core.phi[j] - utb[j].abs()).abs() < 1e-15);
            let sgn = utb[j].signum();
            for i in 0..5 {
                assert!((core.back_map.get(i, j) - sgn * s.v1.get(i, j)).abs() < 1e-15);
            }
        }
        let total: f64 = core.phi.iter().map(|p| p * p).sum::<f64>() + core.phi_tail.powi(2);
        assert!((total - norm2(&b).powi(2)).abs() <= 1e-10 * norm2(&b).powi(2));
    }

    #[test]
    fn right_hand_side_in_range_has_zero_tail() {
        let s = rand_svd_of(&[3.0, 2.0, 1.0], 8, 5, 7);
        let b = s.u1.matvec(&[1.0, -2.0, 0.5]).unwrap();
        let core = build_core(&s, &b, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(core.phi_tail <= 1e-12);
    }

    #[test]
    fn repeated_values_form_groups() {
        let s = rand_svd_of(&[3.0, 3.0, 2.0, 1.0], 5, 4, 11);
        let b = gaussian_vector(5, &mut RngSeed(2).rng());
        let core = build_core(&s, &b, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(core.dim(), 3);
        assert_eq!(core.groups[0].multiplicity, 2);
        assert_eq!(core.sigma, vec![3.0, 2.0, 1.0]);
        let utb = s.u1.tr_matvec(&b).unwrap();
        assert!((core.phi[0] - utb[0].hypot(utb[1])).abs() < 1e-14);
        let btb = core.back_map.tr_matmul(&core.back_map).unwrap();
        assert!(spectral_norm(&btb.sub(&DenseMatrix::identity(3)).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn orthogonal_group_is_dropped() {
        let s = rand_svd_of(&[3.0, 2.0, 1.0], 6, 4, 3);
        // b has no component along u₂.
        let mut b = gaussian_vector(6, &mut RngSeed(8).rng());
        let c = crate::linalg::dot(&s.u1.column(1), &b);
        crate::linalg::axpy(-c, &s.u1.column(1), &mut b);
        let core = build_core(&s, &b, 0.0).unwrap();
        assert_eq!(core.dim(), 2);
        assert_eq!(core.sigma, vec![3.0, 1.0]);
        assert_eq!(core.dropped.len(), 1);
        assert!(core.phi.iter().all(|&p| p > 0.0));
    }

    #[test]
    fn bad_inputs() {
        let s = rand_svd_of(&[1.0], 3, 2, 1);
        assert!(build_core(&s, &[], 0.0).is_err());
        assert!(matches!(build_core(&s, &[1.0, 2.0], 0.0), Err(Error::DimensionMismatch { .. })));
        assert!(build_core(&s, &[1.0, 2.0, 3.0], -1.0).is_err());
    }
}
