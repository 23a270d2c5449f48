//! Probabilistic error bounds evaluated against a known spectrum.

use super::TlsSolution;
use crate::error::{Error, Result};
use crate::linalg::{norm2, SvdFactors};
use std::f64::consts::E;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub k: usize,
    pub s: usize,
    pub p: usize,
    pub q: usize,
    pub delta: f64,
}

/// Quantities needed by the solution-error bound that the solver alone does not know.
#[derive(Debug, Clone, Copy)]
pub struct Reference<'a> {
    /// Exact TLS solution `x*` of `{b, A}`.
    pub x_star: &'a [f64],
    pub norm_b: f64,
    /// `σ_{n+1}([A, b])`.
    pub sigma_aug: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub k: usize,
    pub s: usize,
    pub p: usize,
    pub q: usize,
    pub delta: f64,
    pub c_delta: f64,
    pub epsilon: f64,
    pub c1: f64,
    pub c2: f64,
    /// Right-hand side of the range-approximation bound on `‖A − QQᵀA‖`.
    pub range_bound: f64,
    /// `c₁σ_{k+1}(A)√(1+‖x̂‖²)`.
    pub residual_bound: f64,
    /// Relative-error bound on `‖x̂ − x*‖/‖x*‖` using `2σ_{k+s}(A)`.
    pub solution_bound: Option<f64>,
    /// Same bound with `2σ_r(A)` in place of `2σ_{k+s}(A)`.
    pub solution_bound_sigma_r: Option<f64>,
}

/// `𝒞_Δ = e√(k+s)/(p+1)·(2/Δ)^{1/(p+1)}·(√(n−k−s+p) + √(k+s) + √(2 ln(2/Δ)))`.
pub fn c_delta(n: usize, k: usize, s: usize, p: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if p > s || k + s > n {
        return Err(Error::invalid(format!("need p <= s and k + s <= n (k={k}, s={s}, p={p}, n={n})")));
    }
    let ks = (k + s) as f64;
    let pf = (p + 1) as f64;
    let tail = ((n - k - s + p) as f64).sqrt() + ks.sqrt() + (2.0 * (2.0 / delta).ln()).sqrt();
    Ok(E * ks.sqrt() / pf * (2.0 / delta).powf(1.0 / pf) * tail)
}

fn validate(sigma: &[f64], n: usize, prm: &BoundParams) -> Result<()> {
    if prm.p > prm.s {
        return Err(Error::invalid("oversampling balance p must not exceed s"));
    }
    let need = prm.k + 1 + prm.s - prm.p;
    if need > sigma.len() {
        return Err(Error::invalid(format!(
            "sigma_{need} requested but only {} singular values available",
            sigma.len()
        )));
    }
    if prm.k + prm.s > n.min(sigma.len()) {
        return Err(Error::invalid("k + s exceeds min(m, n)"));
    }
    Ok(())
}

/// `(σ_{k+1+s−p}/σ_k)^{2q}` with `σ₀ = ∞`.
fn decay_factor(sigma: &[f64], prm: &BoundParams, power: usize) -> f64 {
    if prm.q == 0 {
        return 1.0;
    }
    if prm.k == 0 {
        return 0.0;
    }
    let num = sigma[prm.k + prm.s - prm.p];
    let den = sigma[prm.k - 1];
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).powi((power * prm.q) as i32)
}

/// `ε = 𝒞_Δ(σ_{k+1+s−p}/σ_k)^{2q}`.
pub fn epsilon(sigma: &[f64], n: usize, prm: &BoundParams) -> Result<f64> {
    validate(sigma, n, prm)?;
    Ok(c_delta(n, prm.k, prm.s, prm.p, prm.delta)? * decay_factor(sigma, prm, 2))
}

/// `√(σ²_{k+1} + k𝒞²σ²_{k+1+s−p}(σ_{k+1+s−p}/σ_k)^{4q})`.
pub fn range_bound(sigma: &[f64], n: usize, prm: &BoundParams) -> Result<f64> {
    validate(sigma, n, prm)?;
    let c = c_delta(n, prm.k, prm.s, prm.p, prm.delta)?;
    let s1 = sigma[prm.k];
    let sl = sigma[prm.k + prm.s - prm.p];
    Ok((s1 * s1 + prm.k as f64 * c * c * sl * sl * decay_factor(sigma, prm, 4)).sqrt())
}

pub fn bound_report(
    true_svd: &SvdFactors,
    solution: &TlsSolution,
    prm: BoundParams,
    reference: Option<&Reference<'_>>,
) -> Result<BoundReport> {
    let sigma = &true_svd.sigma;
    let n = true_svd.v.rows();
    validate(sigma, n, &prm)?;
    let c_delta = c_delta(n, prm.k, prm.s, prm.p, prm.delta)?;
    let epsilon = c_delta * decay_factor(sigma, &prm, 2);
    let root = (1.0 + prm.k as f64 * epsilon * epsilon).sqrt();
    let c1 = 1.0 + root;
    let c2 = 2.0 * c1 + 1.0;
    let sk1 = sigma[prm.k];
    let residual_bound = c1 * sk1 * (1.0 + norm2(&solution.x).powi(2)).sqrt();
    let range_bound = range_bound(sigma, n, &prm)?;

    let (solution_bound, solution_bound_sigma_r) = match reference {
        Some(r) => {
            let s2 = r.sigma_aug * r.sigma_aug;
            let min_gap = sigma.iter().map(|s| (s * s - s2).abs()).fold(f64::INFINITY, f64::min);
            let cond = 1.0 / min_gap;
            let lead = (r.norm_b / norm2(r.x_star) + 2.0 * sigma[0]) * root;
            let sks = if prm.k + prm.s == 0 { 0.0 } else { sigma[prm.k + prm.s - 1] };
            let sr = match solution.rank {
                0 => 0.0,
                r => sigma[(r - 1).min(sigma.len() - 1)],
            };
            (
                Some(cond * (lead + 2.0 * sks) * sk1),
                Some(cond * (lead + 2.0 * sr) * sk1),
            )
        }
        None => (None, None),
    };
    Ok(BoundReport {
        k: prm.k,
        s: prm.s,
        p: prm.p,
        q: prm.q,
        delta: prm.delta,
        c_delta,
        epsilon,
        c1,
        c2,
        range_bound,
        residual_bound,
        solution_bound,
        solution_bound_sigma_r,
    })
}
