//! Two-dimensional problems on an `N × N` grid, vectorized column-major.

use super::{Params, TestProblem};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::operators::{dense_operator, kronecker_operator};
use std::f64::consts::PI;

pub const DEFAULT_DEPTH_2D: f64 = 0.25;
pub const DEFAULT_BLUR_BAND: usize = 12;
pub const DEFAULT_BLUR_SPREAD: f64 = 3.0;

/// Largest grid side accepted by the 2-D generators.
pub const MAX_GRID: usize = 64;

fn check_grid(grid: usize, min: usize) -> Result<()> {
    if grid < min || grid > MAX_GRID {
        return Err(Error::invalid(format!("grid side must lie in {min}..={MAX_GRID}, got {grid}")));
    }
    Ok(())
}

/// Gravity surveying with kernel `d[d² + (x−s)² + (y−t)²]^{−3/2}` on the unit
/// square, midpoint collocation, `f(s,t) = sin(πs)sin(πt)`.
pub fn make_gravity_2d(grid: usize, d: f64) -> Result<TestProblem> {
    check_grid(grid, 2)?;
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::invalid(format!("depth d must be positive, got {d}")));
    }
    let h = 1.0 / grid as f64;
    let pt = |k: usize| ((k % grid) as f64 + 0.5) * h;
    let qt = |k: usize| ((k / grid) as f64 + 0.5) * h;
    let n = grid * grid;
    let w = h * h * d;
    let a = DenseMatrix::from_fn(n, n, |i, j| {
        let (dx, dy) = (pt(i) - pt(j), qt(i) - qt(j));
        w / (d * d + dx * dx + dy * dy).powf(1.5)
    });
    let x_true: Vec<f64> = (0..n).map(|k| (PI * pt(k)).sin() * (PI * qt(k)).sin()).collect();
    let b = a.matvec(&x_true)?;
    Ok(TestProblem {
        name: "gravity2d".into(),
        op: Box::new(dense_operator(a)),
        b,
        x_true,
        n,
        metadata: Params::from([("d".to_string(), d), ("grid".to_string(), grid as f64)]),
    })
}

/// Banded symmetric Toeplitz Gaussian `exp(−(i−j)²/(2σ²))/(σ√(2π))`, `|i−j| < band`.
pub fn gaussian_toeplitz(size: usize, band: usize, spread: f64) -> DenseMatrix {
    let norm = 1.0 / (spread * (2.0 * PI).sqrt());
    DenseMatrix::from_fn(size, size, |i, j| {
        let k = i.abs_diff(j);
        if k < band {
            let k = k as f64;
            norm * (-k * k / (2.0 * spread * spread)).exp()
        } else {
            0.0
        }
    })
}

/// Block test image: a bright rectangle, a dimmer offset rectangle and a small square.
pub fn block_image(grid: usize) -> Vec<f64> {
    let g = grid as f64;
    let inside = |v: usize, lo: f64, hi: f64| {
        let v = v as f64 + 0.5;
        v >= lo * g && v < hi * g
    };
    let mut x = vec![0.0; grid * grid];
    for col in 0..grid {
        for row in 0..grid {
            let mut v = 0.0;
            if inside(row, 0.125, 0.5) && inside(col, 0.25, 0.75) {
                v = 1.0;
            }
            if inside(row, 0.625, 0.875) && inside(col, 0.125, 0.5) {
                v = 0.5;
            }
            if inside(row, 0.625, 0.8125) && inside(col, 0.625, 0.8125) {
                v = 0.75;
            }
            x[row + grid * col] = v;
        }
    }
    x
}

/// `A = A_r ⊗ A_c` with equal Gaussian Toeplitz factors applied matrix-free.
pub fn make_blur(grid: usize, band: usize, spread: f64) -> Result<TestProblem> {
    check_grid(grid, 8)?;
    if band == 0 || band > grid {
        return Err(Error::invalid(format!("band must lie in 1..={grid}, got {band}")));
    }
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::invalid(format!("spread must be positive, got {spread}")));
    }
    let t = gaussian_toeplitz(grid, band, spread);
    let op = kronecker_operator(t.clone(), t);
    let x_true = block_image(grid);
    let b = crate::operators::LinearOperator::apply(&op, &x_true)?;
    Ok(TestProblem {
        name: "blur".into(),
        op: Box::new(op),
        b,
        x_true,
        n: grid * grid,
        metadata: Params::from([
            ("grid".to_string(), grid as f64),
            ("band".to_string(), band as f64),
            ("spread".to_string(), spread),
        ]),
    })
}
