//! One-dimensional Fredholm integral equations `∫ K(s,t) f(t) dt = g(s)`.
//!
//! * `shaw`: `K = (cos s + cos t)²(sin u/u)²`, `u = π(sin s + sin t)` on
//!   `[−π/2, π/2]²`, midpoint rule; `f = 2e^{−6(t−0.8)²} + e^{−2(t+0.5)²}`.
//! * `gravity`: `K = d(d² + (s−t)²)^{−3/2}` on `[0, 1]²`, midpoint rule,
//!   depth `d` (default 0.25); `f = sin(πt) + ½sin(2πt)`.
//! * `foxgood`: `K = √(s² + t²)` on `[0, 1]²`, midpoint rule; `f = t`.
//! * `phillips`: `K = φ(s − t)` with `φ(x) = 1 + cos(πx/3)` for `|x| < 3` and
//!   `0` otherwise, on `[−6, 6]²`; Galerkin with orthonormal box functions,
//!   `f = φ`. Requires `n` divisible by 4.
//! * `deriv2`: Green's function of `−u'' ` on `[0, 1]`, `K = s(t − 1)` for
//!   `s < t` and `t(s − 1)` otherwise; Galerkin with box functions, `f = t`.

use super::{Params, Problem1d, TestProblem};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::operators::dense_operator;
use std::f64::consts::PI;

pub const DEFAULT_DEPTH: f64 = 0.25;

pub fn make_problem_1d(kind: Problem1d, n: usize, params: &Params) -> Result<TestProblem> {
    if n < 4 {
        return Err(Error::invalid(format!("{kind} needs n >= 4, got {n}")));
    }
    let mut metadata = Params::new();
    let (a, x_true) = match kind {
        Problem1d::Shaw => shaw(n),
        Problem1d::Gravity => {
            let d = params.get("d").copied().unwrap_or(DEFAULT_DEPTH);
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::invalid(format!("depth d must be positive, got {d}")));
            }
            metadata.insert("d".into(), d);
            gravity(n, d)
        }
        Problem1d::Foxgood => foxgood(n),
        Problem1d::Phillips => {
            if !n.is_multiple_of(4) {
                return Err(Error::invalid(format!("phillips needs n divisible by 4, got {n}")));
            }
            phillips(n)
        }
        Problem1d::Deriv2 => deriv2(n),
    };
    let b = a.matvec(&x_true)?;
    Ok(TestProblem {
        name: kind.name().to_string(),
        op: Box::new(dense_operator(a)),
        b,
        x_true,
        n,
        metadata,
    })
}

fn shaw(n: usize) -> (DenseMatrix, Vec<f64>) {
    let h = PI / n as f64;
    let t: Vec<f64> = (0..n).map(|i| -PI / 2.0 + (i as f64 + 0.5) * h).collect();
    let (co, si): (Vec<f64>, Vec<f64>) = t.iter().map(|v| (v.cos(), v.sin())).unzip();
    let a = DenseMatrix::from_fn(n, n, |i, j| {
        let u = PI * (si[i] + si[j]);
        let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
        let c = co[i] + co[j];
        h * c * c * sinc * sinc
    });
    let x = t
        .iter()
        .map(|&v| 2.0 * (-6.0 * (v - 0.8) * (v - 0.8)).exp() + (-2.0 * (v + 0.5) * (v + 0.5)).exp())
        .collect();
    (a, x)
}

fn gravity(n: usize, d: f64) -> (DenseMatrix, Vec<f64>) {
    let h = 1.0 / n as f64;
    let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let a = DenseMatrix::from_fn(n, n, |i, j| {
        let r = t[i] - t[j];
        h * d / (d * d + r * r).powf(1.5)
    });
    let x = t.iter().map(|&v| (PI * v).sin() + 0.5 * (2.0 * PI * v).sin()).collect();
    (a, x)
}

fn foxgood(n: usize) -> (DenseMatrix, Vec<f64>) {
    let h = 1.0 / n as f64;
    let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let a = DenseMatrix::from_fn(n, n, |i, j| h * t[i].hypot(t[j]));
    (a, t)
}

fn phillips(n: usize) -> (DenseMatrix, Vec<f64>) {
    let h = 12.0 / n as f64;
    let n4 = n / 4;
    let theta = 4.0 * PI / n as f64;
    let w = 9.0 / (h * PI * PI);
    let mut r = vec![0.0; n];
    for (k, rk) in r.iter_mut().enumerate().take(n4) {
        let k = k as f64;
        *rk = h + w * (2.0 * (k * theta).cos() - ((k - 1.0) * theta).cos() - ((k + 1.0) * theta).cos());
    }
    r[n4] = h / 2.0 + w * (theta.cos() - 1.0);
    let a = DenseMatrix::from_fn(n, n, |i, j| r[i.abs_diff(j)]);

    let c = PI / 3.0;
    let mut x = vec![0.0; n];
    for j in 0..n4 {
        let (lo, hi) = (j as f64 * h, (j + 1) as f64 * h);
        let v = (h + ((c * hi).sin() - (c * lo).sin()) / c) / h.sqrt();
        x[2 * n4 + j] = v;
        x[2 * n4 - 1 - j] = v;
    }
    (a, x)
}

fn deriv2(n: usize) -> (DenseMatrix, Vec<f64>) {
    let h = 1.0 / n as f64;
    let h2 = h * h;
    let a = DenseMatrix::from_fn(n, n, |i, j| {
        let (hi, lo) = ((i.max(j) + 1) as f64, (i.min(j) + 1) as f64);
        if i == j {
            h2 * ((hi * hi - hi + 0.25) * h - (hi - 2.0 / 3.0))
        } else {
            h2 * (lo - 0.5) * ((hi - 0.5) * h - 1.0)
        }
    });
    let h32 = h * h.sqrt();
    let x = (0..n).map(|i| h32 * (i as f64 + 0.5)).collect();
    (a, x)
}
