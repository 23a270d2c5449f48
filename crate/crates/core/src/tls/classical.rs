//! Dense SVD baselines: classical and truncated TLS.

use super::{Method, TlsSolution, GAP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{norm2, relative_error, sub_vec, svd_dense, DenseMatrix, SvdFactors};

/// Relative singular-value cutoff for pseudoinverses.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Both classical TLS formulas, for cross-checking.
#[derive(Debug, Clone)]
pub struct ClassicalPaths {
    /// `V diag(σᵢ/(σᵢ² − σ̄²ₙ₊₁)) Uᵀb` from the SVD of `A`.
    pub closed_form: Vec<f64>,
    /// `−V̄₁₂ / V̄₂₂` from the SVD of `[A, b]`.
    pub vbar: Vec<f64>,
    pub sigma_n: f64,
    pub sigma_aug: f64,
}

#[derive(Debug, Clone)]
pub struct TruncatedPaths {
    /// `−V̄₁₂V̄₂₂^†`
    pub vbar: Vec<f64>,
    /// `(V̄₁₁ᵀ)^†V̄₂₁ᵀ`
    pub vbar11: Vec<f64>,
    /// `Ã^†b` with `Ã` the first `n` columns of the rank-`t` approximation.
    pub pinv: Vec<f64>,
    pub sigma_t: f64,
    pub sigma_t1: f64,
}

fn check_shapes(a: &DenseMatrix, b: &[f64], context: &'static str) -> Result<()> {
    let (m, n) = a.shape();
    if n == 0 || m < n {
        return Err(Error::invalid(format!("need m >= n >= 1, got {m}x{n}")));
    }
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            context,
            expected: m,
            found: b.len(),
        });
    }
    Ok(())
}

/// SVD of `[A, b]`, zero-padded to at least `n + 1` rows so `V̄` is square.
fn augmented_svd(a: &DenseMatrix, b: &[f64]) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    let rows = m.max(n + 1);
    let aug = DenseMatrix::from_fn(rows, n + 1, |i, j| match (i < m, j < n) {
        (false, _) => 0.0,
        (true, true) => a.get(i, j),
        (true, false) => b[i],
    });
    let f = svd_dense(&aug)?;
    // Keep the trailing singular pair even when it is exactly zero.
    debug_assert_eq!(f.sigma.len(), n + 1);
    Ok(f)
}

pub fn classical_tls_paths(a: &DenseMatrix, b: &[f64]) -> Result<ClassicalPaths> {
    check_shapes(a, b, "classical_tls")?;
    let n = a.cols();
    let fa = svd_dense(a)?;
    let fb = augmented_svd(a, b)?;
    let sigma_n = fa.sigma[n - 1];
    let sigma_aug = fb.sigma[n];
    let threshold = GAP_TOL * fa.sigma[0] * fa.sigma[0];
    if !(sigma_n > sigma_aug) || sigma_n * sigma_n - sigma_aug * sigma_aug <= threshold {
        return Err(Error::Nongeneric { sigma_n, sigma_aug });
    }
    let utb = fa.u.tr_matvec(b)?;
    let coef: Vec<f64> = fa
        .sigma
        .iter()
        .zip(&utb)
        .map(|(&s, &c)| s * c / (s * s - sigma_aug * sigma_aug))
        .collect();
    let closed_form = fa.v.matvec(&coef)?;
    let v22 = fb.v.get(n, n);
    let vbar = (0..n).map(|i| -fb.v.get(i, n) / v22).collect();
    Ok(ClassicalPaths {
        closed_form,
        vbar,
        sigma_n,
        sigma_aug,
    })
}

/// Classical TLS through the dense SVDs of `A` and `[A, b]`.
pub fn classical_tls(a: &DenseMatrix, b: &[f64]) -> Result<TlsSolution> {
    let p = classical_tls_paths(a, b)?;
    let x = p.closed_form;
    let residual_norm = norm2(&sub_vec(b, &a.matvec(&x)?));
    Ok(TlsSolution {
        y: x.clone(),
        x,
        sigma_min_core: p.sigma_aug,
        residual_norm,
        gap: p.sigma_n * p.sigma_n - p.sigma_aug * p.sigma_aug,
        method: Method::Classical,
        rank: a.cols(),
    })
}

/// Moore–Penrose pseudoinverse with cutoff `PINV_CUTOFF·σ_max`.
pub fn pseudo_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    let f = svd_dense(m)?;
    let (rows, cols) = m.shape();
    let mut out = DenseMatrix::zeros(cols, rows);
    let Some(&smax) = f.sigma.first() else {
        return Ok(out);
    };
    let cut = PINV_CUTOFF * smax;
    for (k, &s) in f.sigma.iter().enumerate() {
        if s <= cut || s == 0.0 {
            continue;
        }
        for i in 0..cols {
            let vi = f.v.get(i, k) / s;
            for j in 0..rows {
                out.set(i, j, out.get(i, j) + vi * f.u.get(j, k));
            }
        }
    }
    Ok(out)
}

pub fn truncated_tls_paths(a: &DenseMatrix, b: &[f64], t: usize) -> Result<TruncatedPaths> {
    check_shapes(a, b, "truncated_tls")?;
    let (m, n) = a.shape();
    if t == 0 || t > n {
        return Err(Error::InvalidTruncation {
            t,
            reason: format!("t must lie in 1..={n}"),
        });
    }
    let f = augmented_svd(a, b)?;
    let rank = f.numerical_rank(PINV_CUTOFF);
    if t > rank {
        return Err(Error::InvalidTruncation {
            t,
            reason: format!("[A, b] has numerical rank {rank}"),
        });
    }
    let (sigma_t, sigma_t1) = (f.sigma[t - 1], f.sigma[t]);
    if sigma_t - sigma_t1 <= GAP_TOL * f.sigma[0] {
        return Err(Error::InvalidTruncation {
            t,
            reason: format!("no gap: sigma_t = {sigma_t:e}, sigma_t+1 = {sigma_t1:e}"),
        });
    }
    let v22: Vec<f64> = (t..=n).map(|j| f.v.get(n, j)).collect();
    let v22_sq: f64 = v22.iter().map(|v| v * v).sum();
    if v22_sq.sqrt() <= PINV_CUTOFF {
        return Err(Error::InvalidTruncation {
            t,
            reason: "V22 vanishes".into(),
        });
    }
    let vbar = (0..n)
        .map(|i| -(t..=n).zip(&v22).map(|(j, w)| f.v.get(i, j) * w).sum::<f64>() / v22_sq)
        .collect();

    let v11t = DenseMatrix::from_fn(t, n, |i, j| f.v.get(j, i));
    let v21: Vec<f64> = (0..t).map(|j| f.v.get(n, j)).collect();
    let vbar11 = pseudo_inverse(&v11t)?.matvec(&v21)?;

    let a_t = DenseMatrix::from_fn(m, n, |i, j| (0..t).map(|k| f.u.get(i, k) * f.sigma[k] * f.v.get(j, k)).sum());
    let pinv = pseudo_inverse(&a_t)?.matvec(b)?;
    Ok(TruncatedPaths {
        vbar,
        vbar11,
        pinv,
        sigma_t,
        sigma_t1,
    })
}

/// Truncated TLS `x̃ = −V̄₁₂V̄₂₂^†` at level `t`.
pub fn truncated_tls(a: &DenseMatrix, b: &[f64], t: usize) -> Result<TlsSolution> {
    let p = truncated_tls_paths(a, b, t)?;
    let x = p.vbar;
    let residual_norm = norm2(&sub_vec(b, &a.matvec(&x)?));
    Ok(TlsSolution {
        y: x.clone(),
        x,
        sigma_min_core: p.sigma_t1,
        residual_norm,
        gap: p.sigma_t * p.sigma_t - p.sigma_t1 * p.sigma_t1,
        method: Method::Truncated,
        rank: t,
    })
}

/// Largest pairwise relative disagreement among the truncated formulas.
pub fn truncated_disagreement(p: &TruncatedPaths) -> f64 {
    relative_error(&p.vbar11, &p.vbar).max(relative_error(&p.pinv, &p.vbar))
}
