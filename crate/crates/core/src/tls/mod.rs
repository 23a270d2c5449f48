//! Total least squares solvers.
//!
//! The randomized path reduces `[b, A]` to a bordered diagonal core `C` and
//! solves it in closed form: with `σ_min = σ_{t+1}(C) = ‖C⁻¹‖⁻¹`,
//!
//! ```text
//! yᵢ = σᵢ·φᵢ / (σᵢ² − σ_min²),        x̂ = back_map · y.
//! ```
//!
//! `C⁻¹` is available explicitly: diagonal `1/σᵢ`, last column
//! `−φᵢ/(σᵢ·φ_tail)` and corner `1/φ_tail`.

mod bounds;
mod classical;

pub use bounds::{bound_report, c_delta, epsilon, range_bound, BoundParams, BoundReport, Reference};
pub use classical::{
    classical_tls, classical_tls_paths, pseudo_inverse, truncated_disagreement, truncated_tls, truncated_tls_paths,
    ClassicalPaths,
    TruncatedPaths, PINV_CUTOFF,
};

use crate::corered::{build_core, randomized_svd, CoreProblem, RandSvd, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::linalg::{norm2, spectral_norm, sub_vec, DenseMatrix};
use crate::operators::LinearOperator;
use crate::rangefinder::RangeFinderConfig;

/// `σᵢ² − σ_min² ≤ GAP_TOL·σ₁²` is treated as nongeneric.
pub const GAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    RandomizedCore,
    Classical,
    Truncated,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::RandomizedCore => "randomized-core",
            Method::Classical => "classical",
            Method::Truncated => "truncated",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TlsSolution {
    /// Solution in the original coordinates.
    pub x: Vec<f64>,
    /// Solution of the reduced problem (equals `x` for the dense baselines).
    pub y: Vec<f64>,
    /// Smallest singular value of the augmented (core) matrix.
    pub sigma_min_core: f64,
    /// `‖b − A·x‖` with the true operator.
    pub residual_norm: f64,
    /// `minᵢ (σᵢ² − sigma_min_core²)`.
    pub gap: f64,
    pub method: Method,
    /// Rank of the approximation of `A` (`r`, or `n`/`t` for dense baselines).
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct CoreSolution {
    pub y: Vec<f64>,
    pub sigma_min: f64,
    pub gap: f64,
}

/// Explicit `C⁻¹` for `phi_tail > 0`.
pub fn core_inverse(core: &CoreProblem) -> DenseMatrix {
    let t = core.dim();
    let mut inv = DenseMatrix::zeros(t + 1, t + 1);
    for i in 0..t {
        inv.set(i, i, 1.0 / core.sigma[i]);
        inv.set(i, t, -core.phi[i] / (core.sigma[i] * core.phi_tail));
    }
    inv.set(t, t, 1.0 / core.phi_tail);
    inv
}

pub fn solve_core_closed_form(core: &CoreProblem) -> Result<CoreSolution> {
    let t = core.dim();
    if t == 0 {
        return Err(Error::invalid("core problem is empty"));
    }
    if core.sigma.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::invalid("core singular values must be positive"));
    }
    let sigma_min = if core.phi_tail > 0.0 {
        let inv = core_inverse(core);
        if inv.as_slice().iter().all(|v| v.is_finite()) {
            1.0 / spectral_norm(&inv)?
        } else {
            // 1/φ_tail overflowed: σ_min ≤ φ_tail is below representable precision.
            0.0
        }
    } else {
        // b₁ lies in range(A₁₁): the core degenerates to a square linear system.
        0.0
    };
    let s2 = sigma_min * sigma_min;
    let gap = core.sigma.iter().map(|s| s * s - s2).fold(f64::INFINITY, f64::min);
    let threshold = GAP_TOL * core.sigma[0] * core.sigma[0];
    if gap <= threshold {
        return Err(Error::NearNongeneric { gap, threshold });
    }
    let y = core
        .sigma
        .iter()
        .zip(&core.phi)
        .map(|(&s, &p)| s * p / (s * s - s2))
        .collect();
    Ok(CoreSolution { y, sigma_min, gap })
}

pub fn back_transform(core: &CoreProblem, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != core.dim() {
        return Err(Error::DimensionMismatch {
            context: "back_transform",
            expected: core.dim(),
            found: y.len(),
        });
    }
    core.back_map.matvec(y)
}

/// Everything the randomized pipeline produced, for diagnostics.
#[derive(Debug, Clone)]
pub struct RandomizedRun {
    pub solution: TlsSolution,
    pub svd: RandSvd,
    pub core: CoreProblem,
}

pub fn solve_randomized_tls(op: &dyn LinearOperator, b: &[f64], cfg: &RangeFinderConfig) -> Result<TlsSolution> {
    solve_randomized_tls_detailed(op, b, cfg).map(|run| run.solution)
}

pub fn solve_randomized_tls_detailed(
    op: &dyn LinearOperator,
    b: &[f64],
    cfg: &RangeFinderConfig,
) -> Result<RandomizedRun> {
    let (m, n) = (op.nrows(), op.ncols());
    if n == 0 || m < n {
        return Err(Error::invalid(format!("need m >= n >= 1, got {m}x{n}")));
    }
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            context: "solve_randomized_tls",
            expected: m,
            found: b.len(),
        });
    }
    let svd = randomized_svd(op, cfg)?;
    solve_from_svd(op, b, svd)
}

/// Core reduction and closed-form solve for a given (randomized or exact) factorization.
pub fn solve_from_svd(op: &dyn LinearOperator, b: &[f64], svd: RandSvd) -> Result<RandomizedRun> {
    if svd.rank == 0 {
        return Err(Error::invalid("rank-0 approximation: the sampled range is empty"));
    }
    let core = build_core(&svd, b, DEFAULT_CLUSTER_TOL)?;
    let solution = solve_core(op, b, &core, svd.rank, Method::RandomizedCore)?;
    Ok(RandomizedRun { solution, svd, core })
}

/// Like [`solve_randomized_tls_detailed`], but on a near-nongeneric core drops
/// the smallest singular triplet and retries, at most `max_restarts` times.
/// Returns the run and the number of restarts used.
pub fn solve_randomized_tls_with_restart(
    op: &dyn LinearOperator,
    b: &[f64],
    cfg: &RangeFinderConfig,
    max_restarts: usize,
) -> Result<(RandomizedRun, usize)> {
    let (m, n) = (op.nrows(), op.ncols());
    if n == 0 || m < n || b.len() != m {
        return solve_randomized_tls_detailed(op, b, cfg).map(|run| (run, 0));
    }
    solve_from_svd_with_restart(op, b, randomized_svd(op, cfg)?, max_restarts)
}

/// [`solve_from_svd`] that drops the smallest triplet and retries on a
/// near-nongeneric core, at most `max_restarts` times.
pub fn solve_from_svd_with_restart(
    op: &dyn LinearOperator,
    b: &[f64],
    svd: RandSvd,
    max_restarts: usize,
) -> Result<(RandomizedRun, usize)> {
    let mut restarts = 0;
    loop {
        let r = svd.rank - restarts;
        match solve_from_svd(op, b, svd.truncated(r)) {
            Err(Error::NearNongeneric { .. }) if restarts < max_restarts && r > 1 => restarts += 1,
            other => return other.map(|run| (run, restarts)),
        }
    }
}

/// Solves a prepared core problem and evaluates the residual with `op`.
pub fn solve_core(
    op: &dyn LinearOperator,
    b: &[f64],
    core: &CoreProblem,
    rank: usize,
    method: Method,
) -> Result<TlsSolution> {
    let cs = solve_core_closed_form(core)?;
    let x = back_transform(core, &cs.y)?;
    let residual_norm = norm2(&sub_vec(b, &op.apply(&x)?));
    Ok(TlsSolution {
        x,
        y: cs.y,
        sigma_min_core: cs.sigma_min,
        residual_norm,
        gap: cs.gap,
        method,
        rank,
    })
}
