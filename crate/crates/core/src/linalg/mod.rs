//! Dense kernels shared by the rest of the crate: a row-major matrix type,
//! Householder QR, thin SVD and seeded Gaussian sampling.

mod matrix;
mod qr;
mod random;
mod svd;

pub use matrix::{axpy, dot, norm2, relative_error, sub_vec, DenseMatrix};
pub use qr::{householder_qr, orthonormalize, Reflector};
pub use random::{gaussian_matrix, gaussian_vector, RngSeed};
pub use svd::{spectral_norm, svd_dense, SvdFactors, MAX_QR_ITERATIONS};
