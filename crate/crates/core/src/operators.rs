//! Linear operators accessed only through products with `A` and `Aᵀ`.

use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, orthonormalize, DenseMatrix, RngSeed, SvdFactors};

pub trait LinearOperator: Send + Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `x ↦ A·x`; `x` has length `ncols`.
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// `y ↦ Aᵀ·y`; `y` has length `nrows`.
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>>;

    /// Column-wise `A·X`.
    fn apply_block(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("apply_block", self.ncols(), x.rows())?;
        let cols = (0..x.cols())
            .map(|j| self.apply(&x.column(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix::from_columns(self.nrows(), &cols))
    }

    /// Column-wise `Aᵀ·Y`.
    fn apply_transpose_block(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("apply_transpose_block", self.nrows(), y.rows())?;
        let cols = (0..y.cols())
            .map(|j| self.apply_transpose(&y.column(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix::from_columns(self.ncols(), &cols))
    }

    /// Dense materialization, one column per unit vector.
    fn to_dense(&self) -> Result<DenseMatrix> {
        self.apply_block(&DenseMatrix::identity(self.ncols()))
    }
}

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Explicit dense matrix.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DenseMatrix,
}

impl DenseOperator {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

pub fn dense_operator(m: DenseMatrix) -> DenseOperator {
    DenseOperator { matrix: m }
}

impl LinearOperator for DenseOperator {
    fn nrows(&self) -> usize {
        self.matrix.rows()
    }

    fn ncols(&self) -> usize {
        self.matrix.cols()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.matrix.matvec(x)
    }

    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.matrix.tr_matvec(y)
    }

    fn apply_block(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.matrix.matmul(x)
    }

    fn apply_transpose_block(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        self.matrix.tr_matmul(y)
    }

    fn to_dense(&self) -> Result<DenseMatrix> {
        Ok(self.matrix.clone())
    }
}

/// `left ⊗ right`, applied as `vec(X) ↦ vec(right · X · leftᵀ)` without
/// forming the product. Vectors are column-stacked (`vec`).
#[derive(Debug, Clone)]
pub struct KroneckerOperator {
    left: DenseMatrix,
    right: DenseMatrix,
}

impl KroneckerOperator {
    pub fn left(&self) -> &DenseMatrix {
        &self.left
    }

    pub fn right(&self) -> &DenseMatrix {
        &self.right
    }

    /// `right · X · leftᵀ` for `X` given column-stacked, with `X` of shape
    /// `right.cols() × left.cols()`. With `transpose`, uses `rightᵀ` and `leftᵀ`.
    fn two_sided(&self, x: &[f64], transpose: bool) -> Vec<f64> {
        let (a, b) = (&self.right, &self.left);
        // Shapes of the effective factors R (p×q) and L (r×s): out = R·X·Lᵀ.
        let (p, q, r, s) = if transpose {
            (a.cols(), a.rows(), b.cols(), b.rows())
        } else {
            (a.rows(), a.cols(), b.rows(), b.cols())
        };
        let reff = |i: usize, k: usize| if transpose { a.get(k, i) } else { a.get(i, k) };
        let leff = |i: usize, k: usize| if transpose { b.get(k, i) } else { b.get(i, k) };
        // T = X·Lᵀ  (q × r), X[k, j] = x[k + q·j].
        let mut t = vec![0.0; q * r];
        for jl in 0..r {
            for js in 0..s {
                let l = leff(jl, js);
                if l == 0.0 {
                    continue;
                }
                let xcol = &x[js * q..(js + 1) * q];
                let tcol = &mut t[jl * q..(jl + 1) * q];
                for (tv, xv) in tcol.iter_mut().zip(xcol) {
                    *tv += l * xv;
                }
            }
        }
        // out = R·T  (p × r), column-stacked.
        let mut out = vec![0.0; p * r];
        for jl in 0..r {
            let tcol = &t[jl * q..(jl + 1) * q];
            for i in 0..p {
                let mut acc = 0.0;
                for (k, tv) in tcol.iter().enumerate() {
                    acc += reff(i, k) * tv;
                }
                out[jl * p + i] = acc;
            }
        }
        out
    }
}

pub fn kronecker_operator(left: DenseMatrix, right: DenseMatrix) -> KroneckerOperator {
    KroneckerOperator { left, right }
}

impl LinearOperator for KroneckerOperator {
    fn nrows(&self) -> usize {
        self.left.rows() * self.right.rows()
    }

    fn ncols(&self) -> usize {
        self.left.cols() * self.right.cols()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("KroneckerOperator::apply", self.ncols(), x.len())?;
        Ok(self.two_sided(x, false))
    }

    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("KroneckerOperator::apply_transpose", self.nrows(), y.len())?;
        Ok(self.two_sided(y, true))
    }
}

/// Operator with a prescribed spectrum, `A = U·diag(σ)·Vᵀ`, kept in factored form.
#[derive(Debug, Clone)]
pub struct SyntheticSpectrumOperator {
    factors: SvdFactors,
}

impl SyntheticSpectrumOperator {
    pub fn factors(&self) -> &SvdFactors {
        &self.factors
    }
}

impl LinearOperator for SyntheticSpectrumOperator {
    fn nrows(&self) -> usize {
        self.factors.u.rows()
    }

    fn ncols(&self) -> usize {
        self.factors.v.rows()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("SyntheticSpectrumOperator::apply", self.ncols(), x.len())?;
        let mut c = self.factors.v.tr_matvec(x)?;
        for (ci, s) in c.iter_mut().zip(&self.factors.sigma) {
            *ci *= s;
        }
        self.factors.u.matvec(&c)
    }

    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("SyntheticSpectrumOperator::apply_transpose", self.nrows(), y.len())?;
        let mut c = self.factors.u.tr_matvec(y)?;
        for (ci, s) in c.iter_mut().zip(&self.factors.sigma) {
            *ci *= s;
        }
        self.factors.v.matvec(&c)
    }

    fn apply_block(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let c = self.factors.v.tr_matmul(x)?;
        let mut c = c;
        for i in 0..c.rows() {
            let s = self.factors.sigma[i];
            for v in c.row_mut(i) {
                *v *= s;
            }
        }
        self.factors.u.matmul(&c)
    }
}

/// Random `m × n` operator whose nonzero singular values are exactly `sigma`;
/// the singular vectors come from QR of seeded Gaussian matrices.
pub fn synthetic_operator(
    sigma: &[f64],
    m: usize,
    n: usize,
    seed: RngSeed,
) -> Result<(SyntheticSpectrumOperator, SvdFactors)> {
    let k = sigma.len();
    if k == 0 || k > m.min(n) {
        return Err(Error::invalid(format!(
            "need 1 <= len(sigma) <= min(m, n); got {k} for {m}x{n}"
        )));
    }
    if sigma.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::invalid("sigma must be finite and nonnegative"));
    }
    if sigma.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid("sigma must be nonincreasing"));
    }
    let u = orthonormalize(&gaussian_matrix(m, k, seed.derive(1))?)?;
    let v = orthonormalize(&gaussian_matrix(n, k, seed.derive(2))?)?;
    let factors = SvdFactors {
        u,
        sigma: sigma.to_vec(),
        v,
    };
    Ok((
        SyntheticSpectrumOperator {
            factors: factors.clone(),
        },
        factors,
    ))
}

/// Zero operator of the given shape.
#[derive(Debug, Clone, Copy)]
pub struct ZeroOperator {
    pub rows: usize,
    pub cols: usize,
}

impl LinearOperator for ZeroOperator {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("ZeroOperator::apply", self.cols, x.len())?;
        Ok(vec![0.0; self.rows])
    }

    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("ZeroOperator::apply_transpose", self.rows, y.len())?;
        Ok(vec![0.0; self.cols])
    }
}

/// Dense `left ⊗ right`; test and export helper for small factors.
pub fn kron_dense(left: &DenseMatrix, right: &DenseMatrix) -> DenseMatrix {
    let (r, s) = left.shape();
    let (p, q) = right.shape();
    DenseMatrix::from_fn(r * p, s * q, |i, j| left.get(i / p, j / q) * right.get(i % p, j % q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, gaussian_vector, spectral_norm, svd_dense};

    fn adjoint_defect(op: &dyn LinearOperator, seed: u64, trials: usize) -> f64 {
        let s = RngSeed(seed);
        let mut worst = 0.0f64;
        for t in 0..trials as u64 {
            let x = gaussian_vector(op.ncols(), &mut s.stream(2 * t));
            let y = gaussian_vector(op.nrows(), &mut s.stream(2 * t + 1));
            let lhs = dot(&op.apply(&x).unwrap(), &y);
            let rhs = dot(&x, &op.apply_transpose(&y).unwrap());
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
        worst
    }

    #[test]
    fn dense_examples() {
        let op = dense_operator(DenseMatrix::identity(4));
        assert_eq!(op.apply(&[0.0, 1.0, 0.0, 0.0]).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        let op = dense_operator(DenseMatrix::from_diag(&[1.0, 2.0]));
        assert_eq!(op.apply(&[1.0, 1.0]).unwrap(), vec![1.0, 2.0]);
        let op = dense_operator(gaussian_matrix(7, 5, RngSeed(3)).unwrap());
        assert!(adjoint_defect(&op, 1, 20) <= 1e-12);
    }

    #[test]
    fn kronecker_examples() {
        let op = kronecker_operator(DenseMatrix::identity(2), DenseMatrix::identity(3));
        let x: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        assert_eq!(op.apply(&x).unwrap(), x);

        let op = kronecker_operator(
            DenseMatrix::from_rows(&[vec![2.0]]).unwrap(),
            DenseMatrix::from_diag(&[1.0, 3.0]),
        );
        assert_eq!(op.apply(&[1.0, 1.0]).unwrap(), vec![2.0, 6.0]);
        assert!(matches!(op.apply(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(op.apply_transpose(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn kronecker_matches_dense_materialization() {
        let left = gaussian_matrix(4, 4, RngSeed(10)).unwrap();
        let right = gaussian_matrix(4, 4, RngSeed(11)).unwrap();
        let op = kronecker_operator(left.clone(), right.clone());
        let dense = kron_dense(&left, &right);
        let s = RngSeed(12);
        for t in 0..10 {
            let x = gaussian_vector(16, &mut s.stream(t));
            let got = op.apply(&x).unwrap();
            let want = dense.matvec(&x).unwrap();
            let scale = crate::linalg::norm2(&want);
            let dev = crate::linalg::norm2(&crate::linalg::sub_vec(&got, &want)) / scale;
            assert!(dev <= 1e-12, "deviation {dev:e}");
        }
        assert!(adjoint_defect(&op, 2, 20) <= 1e-10);
    }

    #[test]
    fn kronecker_rectangular_factors_match_dense() {
        for (seed, (r, s, p, q)) in [(2, 3, 4, 1), (1, 5, 3, 2), (6, 2, 2, 7)].into_iter().enumerate() {
            let left = gaussian_matrix(r, s, RngSeed(seed as u64)).unwrap();
            let right = gaussian_matrix(p, q, RngSeed(100 + seed as u64)).unwrap();
            let op = kronecker_operator(left.clone(), right.clone());
            let dense = kron_dense(&left, &right);
            assert_eq!(op.to_dense().unwrap().shape(), dense.shape());
            let diff = op.to_dense().unwrap().sub(&dense).unwrap().max_abs();
            assert!(diff <= 1e-12 * dense.max_abs());
            let dt = crate::operators::dense_operator(dense.transpose()).to_dense().unwrap();
            let y = gaussian_vector(r * p, &mut RngSeed(7).rng());
            let got = op.apply_transpose(&y).unwrap();
            let want = dt.matvec(&y).unwrap();
            assert!(crate::linalg::relative_error(&got, &want) <= 1e-12);
        }
    }

    #[test]
    fn synthetic_examples() {
        let (op, _) = synthetic_operator(&[1.0], 1, 1, RngSeed(1)).unwrap();
        let a = op.to_dense().unwrap();
        assert!((a.get(0, 0).abs() - 1.0).abs() < 1e-15);

        let (op, _) = synthetic_operator(&[5.0, 1.0, 0.0], 3, 3, RngSeed(2)).unwrap();
        assert!((spectral_norm(&op.to_dense().unwrap()).unwrap() - 5.0).abs() <= 1e-12);

        let sigma: Vec<f64> = (0..32).map(|i| 10f64.powf(-8.0 * i as f64 / 31.0)).collect();
        let (op, _) = synthetic_operator(&sigma, 32, 32, RngSeed(3)).unwrap();
        let f = svd_dense(&op.to_dense().unwrap()).unwrap();
        for (a, b) in f.sigma.iter().zip(&sigma) {
            assert!((a - b).abs() <= 1e-10);
        }
        assert!(adjoint_defect(&op, 3, 20) <= 1e-10);
        assert!(synthetic_operator(&[1.0, 2.0], 3, 3, RngSeed(0)).is_err());
        assert!(synthetic_operator(&[1.0, 1.0, 1.0], 2, 3, RngSeed(0)).is_err());
    }

    #[test]
    fn block_application_is_columnwise() {
        let (op, _) = synthetic_operator(&[3.0, 2.0], 5, 4, RngSeed(4)).unwrap();
        let x = gaussian_matrix(4, 3, RngSeed(8)).unwrap();
        let block = op.apply_block(&x).unwrap();
        for j in 0..3 {
            let col = op.apply(&x.column(j)).unwrap();
            assert!(crate::linalg::relative_error(&block.column(j), &col) < 1e-14);
        }
    }
}
