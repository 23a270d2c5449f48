use super::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Elementary reflector `H = I − τ·v·vᵀ` with `v[0] = 1`, mapping `x` to `β·e₁`.
#[derive(Debug, Clone)]
pub struct Reflector {
    pub v: Vec<f64>,
    pub tau: f64,
    pub beta: f64,
}

impl Reflector {
    /// Builds the reflector for `x`. A zero vector yields the identity (`τ = 0`).
    pub fn new(x: &[f64]) -> Reflector {
        let n = x.len();
        let norm = norm2(x);
        if n == 0 || norm == 0.0 {
            let mut v = vec![0.0; n];
            if n > 0 {
                v[0] = 1.0;
            }
            return Reflector { v, tau: 0.0, beta: 0.0 };
        }
        let beta = if x[0] >= 0.0 { -norm } else { norm };
        let v0 = x[0] - beta;
        let mut v: Vec<f64> = x.iter().map(|xi| xi / v0).collect();
        v[0] = 1.0;
        Reflector {
            v,
            tau: (beta - x[0]) / beta,
            beta,
        }
    }

    /// Applies `H` in place to `y`.
    pub fn apply(&self, y: &mut [f64]) {
        if self.tau == 0.0 {
            return;
        }
        let s = self.tau * dot(&self.v, y);
        axpy(-s, &self.v, y);
    }
}

/// Thin Householder QR: `m = q·r` with `q` (rows×cols) having orthonormal
/// columns and `r` (cols×cols) upper triangular with a nonnegative diagonal.
pub fn householder_qr(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::invalid(format!(
            "householder_qr needs rows >= cols, got {rows}x{cols}"
        )));
    }
    // Column-major working copy so reflectors touch contiguous memory.
    let mut work: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut reflectors = Vec::with_capacity(cols);
    for k in 0..cols {
        let h = Reflector::new(&work[k][k..]);
        work[k][k] = h.beta;
        for v in &mut work[k][k + 1..] {
            *v = 0.0;
        }
        for col in work.iter_mut().skip(k + 1) {
            h.apply(&mut col[k..]);
        }
        reflectors.push(h);
    }
    // Accumulate Q = H₀·H₁⋯ applied to the leading identity columns.
    let mut q_cols: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; rows];
            e[j] = 1.0;
            e
        })
        .collect();
    for (k, h) in reflectors.iter().enumerate().rev() {
        for col in q_cols.iter_mut().skip(k) {
            h.apply(&mut col[k..]);
        }
    }
    let mut r = DenseMatrix::zeros(cols, cols);
    for (j, col) in work.iter().enumerate() {
        for i in 0..=j {
            r.set(i, j, col[i]);
        }
    }
    // Nonnegative diagonal convention.
    for k in 0..cols {
        if r.get(k, k) < 0.0 {
            for j in k..cols {
                r.set(k, j, -r.get(k, j));
            }
            for v in q_cols[k].iter_mut() {
                *v = -*v;
            }
        }
    }
    Ok((DenseMatrix::from_columns(rows, &q_cols), r))
}

/// Orthonormal basis of the column space of `m` (rows ≥ cols), via thin QR.
pub fn orthonormalize(m: &DenseMatrix) -> Result<DenseMatrix> {
    householder_qr(m).map(|(q, _)| q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, spectral_norm, RngSeed};

    fn orthogonality_defect(q: &DenseMatrix) -> f64 {
        let qtq = q.tr_matmul(q).unwrap();
        spectral_norm(&qtq.sub(&DenseMatrix::identity(q.cols())).unwrap()).unwrap()
    }

    #[test]
    fn identity_factors_trivially() {
        let (q, r) = householder_qr(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(q, DenseMatrix::identity(3));
        assert_eq!(r, DenseMatrix::identity(3));
    }

    #[test]
    fn single_column_normalizes() {
        let m = DenseMatrix::from_rows(&[vec![3.0], vec![4.0]]).unwrap();
        let (q, r) = householder_qr(&m).unwrap();
        assert!((r.get(0, 0).abs() - 5.0).abs() < 1e-15);
        assert!((q.get(0, 0).abs() - 0.6).abs() < 1e-15);
        assert!((q.get(1, 0).abs() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn seeded_tall_matrix_satisfies_identities() {
        let m = gaussian_matrix(20, 5, RngSeed(7)).unwrap();
        let (q, r) = householder_qr(&m).unwrap();
        let recon = q.matmul(&r).unwrap();
        let rel = spectral_norm(&recon.sub(&m).unwrap()).unwrap() / spectral_norm(&m).unwrap();
        assert!(rel <= 1e-12, "rel = {rel:e}");
        assert!(orthogonality_defect(&q) <= 1e-12);
        for i in 0..5 {
            for j in 0..i {
                assert_eq!(r.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn rank_deficient_input_still_gives_orthonormal_q() {
        let mut m = gaussian_matrix(6, 3, RngSeed(1)).unwrap();
        let c0 = m.column(0);
        m.set_column(2, &c0);
        let (q, r) = householder_qr(&m).unwrap();
        assert!(orthogonality_defect(&q) <= 1e-12);
        assert!(r.get(2, 2).abs() < 1e-12);
    }

    #[test]
    fn wide_input_is_rejected() {
        assert!(householder_qr(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn reflector_maps_to_first_axis() {
        let x = [1.0, -2.0, 2.0];
        let h = Reflector::new(&x);
        let mut y = x.to_vec();
        h.apply(&mut y);
        assert!((y[0] - h.beta).abs() < 1e-14);
        assert!((h.beta.abs() - 3.0).abs() < 1e-14);
        assert!(y[1].abs() < 1e-14 && y[2].abs() < 1e-14);
    }
}
