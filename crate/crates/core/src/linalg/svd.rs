//! Thin SVD by Householder bidiagonalization followed by implicit-shift QR
//! sweeps on the bidiagonal (Golub–Kahan–Reinsch).
//!
//! The factors are returned sorted by nonincreasing singular value, with each
//! singular pair signed so that the largest-magnitude entry of the left vector
//! is positive.

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Per-singular-value cap on implicit QR sweeps.
pub const MAX_QR_ITERATIONS: usize = 100;

/// Thin SVD `m ≈ u·diag(sigma)·vᵀ` with `k = min(rows, cols)` triplets.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `u·diag(sigma)·vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let us = self.u.scale_columns(&self.sigma);
        us.matmul(&self.v.transpose()).expect("consistent SVD shapes")
    }

    /// Number of singular values above `rel_tol · sigma[0]`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        match self.sigma.first() {
            Some(&s0) if s0 > 0.0 => self.sigma.iter().filter(|&&s| s > rel_tol * s0).count(),
            _ => 0,
        }
    }
}

pub fn svd_dense(m: &DenseMatrix) -> Result<SvdFactors> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(SvdFactors {
            u: DenseMatrix::zeros(rows, 0),
            sigma: Vec::new(),
            v: DenseMatrix::zeros(cols, 0),
        });
    }
    let mut f = if rows >= cols {
        golub_reinsch(m)?
    } else {
        let t = golub_reinsch(&m.transpose())?;
        SvdFactors {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    };
    normalize_signs(&mut f);
    Ok(f)
}

/// Largest singular value; zero for an empty or zero matrix.
pub fn spectral_norm(m: &DenseMatrix) -> Result<f64> {
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    Ok(svd_dense(m)?.sigma.first().copied().unwrap_or(0.0))
}

fn normalize_signs(f: &mut SvdFactors) {
    let (m, n) = (f.u.rows(), f.v.rows());
    for j in 0..f.sigma.len() {
        let mut best = 0.0f64;
        let mut best_val = 0.0;
        for i in 0..m {
            let v = f.u.get(i, j);
            if v.abs() > best {
                best = v.abs();
                best_val = v;
            }
        }
        if best_val < 0.0 {
            for i in 0..m {
                f.u.set(i, j, -f.u.get(i, j));
            }
            for i in 0..n {
                f.v.set(i, j, -f.v.get(i, j));
            }
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Applies the plane rotation `(a, b) ← (a·c + b·s, b·c − a·s)` to two rows.
#[inline]
fn rotate_rows(data: &mut [f64], width: usize, r1: usize, r2: usize, c: f64, s: f64) {
    debug_assert!(r1 < r2);
    let (head, tail) = data.split_at_mut(r2 * width);
    let a = &mut head[r1 * width..(r1 + 1) * width];
    let b = &mut tail[..width];
    for (x, z) in a.iter_mut().zip(b.iter_mut()) {
        let (y0, z0) = (*x, *z);
        *x = y0 * c + z0 * s;
        *z = z0 * c - y0 * s;
    }
}

/// Core routine for `rows >= cols`.
fn golub_reinsch(a: &DenseMatrix) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut u = a.as_slice().to_vec();
    let at = |u: &[f64], i: usize, j: usize| u[i * n + j];
    let mut w = vec![0.0; n];
    let mut rv1 = vec![0.0; n];
    let mut acc = vec![0.0; n];

    // Householder reduction to upper bidiagonal form.
    let (mut g, mut scale, mut anorm) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        let l = i + 1;
        rv1[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        let mut s = 0.0;
        for k in i..m {
            scale += at(&u, k, i).abs();
        }
        if scale != 0.0 {
            for k in i..m {
                u[k * n + i] /= scale;
                s += u[k * n + i] * u[k * n + i];
            }
            let f = u[i * n + i];
            g = -sign(s.sqrt(), f);
            let h = f * g - s;
            u[i * n + i] = f - g;
            if l < n {
                acc[l..n].iter_mut().for_each(|x| *x = 0.0);
                for k in i..m {
                    let uki = u[k * n + i];
                    for j in l..n {
                        acc[j] += uki * u[k * n + j];
                    }
                }
                for k in i..m {
                    let uki = u[k * n + i];
                    for j in l..n {
                        u[k * n + j] += (acc[j] / h) * uki;
                    }
                }
            }
            for k in i..m {
                u[k * n + i] *= scale;
            }
        }
        w[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        s = 0.0;
        if i + 1 != n {
            for k in l..n {
                scale += at(&u, i, k).abs();
            }
            if scale != 0.0 {
                for k in l..n {
                    u[i * n + k] /= scale;
                    s += u[i * n + k] * u[i * n + k];
                }
                let f = u[i * n + l];
                g = -sign(s.sqrt(), f);
                let h = f * g - s;
                u[i * n + l] = f - g;
                for k in l..n {
                    rv1[k] = u[i * n + k] / h;
                }
                for j in l..m {
                    let mut sj = 0.0;
                    for k in l..n {
                        sj += u[j * n + k] * u[i * n + k];
                    }
                    for k in l..n {
                        u[j * n + k] += sj * rv1[k];
                    }
                }
                for k in l..n {
                    u[i * n + k] *= scale;
                }
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    // Accumulate right-hand transformations.
    let mut v = vec![0.0; n * n];
    let mut l = n;
    for i in (0..n).rev() {
        if i + 1 < n {
            if g != 0.0 {
                for j in l..n {
                    v[j * n + i] = (u[i * n + j] / u[i * n + l]) / g;
                }
                acc[l..n].iter_mut().for_each(|x| *x = 0.0);
                for k in l..n {
                    let uik = u[i * n + k];
                    for j in l..n {
                        acc[j] += uik * v[k * n + j];
                    }
                }
                for k in l..n {
                    let vki = v[k * n + i];
                    for j in l..n {
                        v[k * n + j] += acc[j] * vki;
                    }
                }
            }
            for j in l..n {
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        }
        v[i * n + i] = 1.0;
        g = rv1[i];
        l = i;
    }

    // Accumulate left-hand transformations.
    for i in (0..n).rev() {
        let l = i + 1;
        let gi = w[i];
        for j in l..n {
            u[i * n + j] = 0.0;
        }
        if gi != 0.0 {
            let ginv = 1.0 / gi;
            if l < n {
                acc[l..n].iter_mut().for_each(|x| *x = 0.0);
                for k in l..m {
                    let uki = u[k * n + i];
                    for j in l..n {
                        acc[j] += uki * u[k * n + j];
                    }
                }
                let uii = u[i * n + i];
                for j in l..n {
                    acc[j] = (acc[j] / uii) * ginv;
                }
                for k in i..m {
                    let uki = u[k * n + i];
                    for j in l..n {
                        u[k * n + j] += acc[j] * uki;
                    }
                }
            }
            for j in i..m {
                u[j * n + i] *= ginv;
            }
        } else {
            for j in i..m {
                u[j * n + i] = 0.0;
            }
        }
        u[i * n + i] += 1.0;
    }

    // Rows of `ut`/`vt` are the singular vectors, so rotations stay contiguous.
    let mut ut = DenseMatrix::from_raw(m, n, u).transpose().into_vec();
    let mut vt = DenseMatrix::from_raw(n, n, v).transpose().into_vec();
    let eps = f64::EPSILON;

    for k in (0..n).rev() {
        let mut its = 0;
        loop {
            let mut flag = true;
            let mut l = k;
            loop {
                if l == 0 || rv1[l].abs() <= eps * anorm {
                    flag = false;
                    break;
                }
                if w[l - 1].abs() <= eps * anorm {
                    break;
                }
                l -= 1;
            }
            if flag {
                // Cancel rv1[l] when w[l-1] is negligible.
                let nm = l - 1;
                let (mut c, mut s) = (0.0, 1.0);
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] *= c;
                    if f.abs() <= eps * anorm {
                        break;
                    }
                    let gg = w[i];
                    let h = f.hypot(gg);
                    w[i] = h;
                    c = gg / h;
                    s = -f / h;
                    rotate_rows(&mut ut, m, nm, i, c, s);
                }
            }
            let z = w[k];
            if l == k {
                if z < 0.0 {
                    w[k] = -z;
                    for x in &mut vt[k * n..(k + 1) * n] {
                        *x = -*x;
                    }
                }
                break;
            }
            its += 1;
            if its >= MAX_QR_ITERATIONS {
                return Err(Error::NoConvergence { iterations: its });
            }
            // Wilkinson shift from the trailing 2x2 block.
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut gg = rv1[nm];
            let mut h = rv1[k];
            let mut f = ((y - z) * (y + z) + (gg - h) * (gg + h)) / (2.0 * h * y);
            gg = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + sign(gg, f))) - h)) / x;
            let (mut c, mut s) = (1.0, 1.0);
            for j in l..=nm {
                let i = j + 1;
                gg = rv1[i];
                y = w[i];
                h = s * gg;
                gg *= c;
                let mut zz = f.hypot(h);
                rv1[j] = zz;
                c = f / zz;
                s = h / zz;
                f = x * c + gg * s;
                gg = gg * c - x * s;
                h = y * s;
                y *= c;
                rotate_rows(&mut vt, n, j, i, c, s);
                zz = f.hypot(h);
                w[j] = zz;
                if zz != 0.0 {
                    c = f / zz;
                    s = h / zz;
                }
                f = c * gg + s * y;
                x = c * y - s * gg;
                rotate_rows(&mut ut, m, j, i, c, s);
            }
            rv1[l] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let mut uo = DenseMatrix::zeros(m, n);
    let mut vo = DenseMatrix::zeros(n, n);
    let sigma: Vec<f64> = order.iter().map(|&j| w[j]).collect();
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..m {
            uo.set(i, dst, ut[src * m + i]);
        }
        for i in 0..n {
            vo.set(i, dst, vt[src * n + i]);
        }
    }
    Ok(SvdFactors {
        u: uo,
        sigma,
        v: vo,
    })
}
