//! Deterministic test problems: 1-D Fredholm equations of the first kind,
//! 2-D gravity surveying and a separable Gaussian blur.
//!
//! All right-hand sides are noiseless, `b = A·x_true`.

mod fredholm;
mod imaging;
mod io;

pub use fredholm::make_problem_1d;
pub use imaging::{make_blur, make_gravity_2d, DEFAULT_BLUR_BAND, DEFAULT_BLUR_SPREAD, DEFAULT_DEPTH_2D};
pub use io::{read_problem, write_problem, ExportedProblem};

use crate::error::{Error, Result};
use crate::linalg::{gaussian_vector, norm2, DenseMatrix, RngSeed};
use crate::operators::LinearOperator;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub type Params = BTreeMap<String, f64>;

pub struct TestProblem {
    pub name: String,
    pub op: Box<dyn LinearOperator>,
    pub b: Vec<f64>,
    pub x_true: Vec<f64>,
    pub n: usize,
    pub metadata: Params,
}

impl fmt::Debug for TestProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestProblem")
            .field("name", &self.name)
            .field("shape", &(self.op.nrows(), self.op.ncols()))
            .field("metadata", &self.metadata)
            .finish()
    }
}

impl TestProblem {
    pub fn dense(&self) -> Result<DenseMatrix> {
        self.op.to_dense()
    }

    /// Adds white noise with `‖e‖ = level·‖b‖`.
    pub fn with_noise(mut self, level: f64, seed: RngSeed) -> Result<TestProblem> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::invalid(format!("noise level must be finite and >= 0, got {level}")));
        }
        let e = gaussian_vector(self.b.len(), &mut seed.rng());
        let scale = level * norm2(&self.b) / norm2(&e).max(f64::MIN_POSITIVE);
        for (bi, ei) in self.b.iter_mut().zip(&e) {
            *bi += scale * ei;
        }
        self.metadata.insert("noise".into(), level);
        Ok(self)
    }
}

/// How a reference TLS solution `x*` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// Dense classical TLS on `[A, b]`.
    Classical,
    /// Square `A` with noiseless `b = A·x_true`: `σ_{n+1}([A, b]) = 0`, so the
    /// TLS solution is `A⁻¹b = x_true` exactly.
    ExactSquare,
}

impl ReferenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceKind::Classical => "classical",
            ReferenceKind::ExactSquare => "exact-square",
        }
    }
}

impl TestProblem {
    pub fn is_noiseless(&self) -> bool {
        self.metadata.get("noise").is_none_or(|&v| v == 0.0)
    }

    /// Reference TLS solution `x*`. Classical TLS is attempted when `n ≤ max_dense`;
    /// square noiseless problems whose `[A, b]` is nongeneric to working
    /// precision fall back to the exact-arithmetic solution `x_true`.
    pub fn tls_reference(&self, max_dense: usize) -> Result<(Vec<f64>, ReferenceKind)> {
        let square_exact = self.op.nrows() == self.op.ncols() && self.is_noiseless();
        if self.op.ncols() <= max_dense || !square_exact {
            match crate::tls::classical_tls(&self.dense()?, &self.b) {
                Ok(s) => return Ok((s.x, ReferenceKind::Classical)),
                Err(Error::Nongeneric { .. }) if square_exact => {}
                Err(e) => return Err(e),
            }
        }
        Ok((self.x_true.clone(), ReferenceKind::ExactSquare))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem1d {
    Shaw,
    Gravity,
    Foxgood,
    Phillips,
    Deriv2,
}

impl Problem1d {
    pub const ALL: [Problem1d; 5] = [
        Problem1d::Shaw,
        Problem1d::Gravity,
        Problem1d::Foxgood,
        Problem1d::Phillips,
        Problem1d::Deriv2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem1d::Shaw => "shaw",
            Problem1d::Gravity => "gravity",
            Problem1d::Foxgood => "foxgood",
            Problem1d::Phillips => "phillips",
            Problem1d::Deriv2 => "deriv2",
        }
    }
}

impl fmt::Display for Problem1d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem1d {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem1d::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown 1-D problem '{s}'")))
    }
}

/// Builds any problem by name. `size` is `n` for 1-D problems and the grid side otherwise.
pub fn make_problem(name: &str, size: usize, params: &Params) -> Result<TestProblem> {
    match name.to_ascii_lowercase().as_str() {
        "gravity2d" => make_gravity_2d(size, params.get("d").copied().unwrap_or(DEFAULT_DEPTH_2D)),
        "blur" => {
            let band = match params.get("band") {
                Some(&v) if v >= 1.0 && v.fract() == 0.0 => v as usize,
                Some(&v) => return Err(Error::invalid(format!("band must be a positive integer, got {v}"))),
                None => DEFAULT_BLUR_BAND.min(size),
            };
            make_blur(size, band, params.get("spread").copied().unwrap_or(DEFAULT_BLUR_SPREAD))
        }
        other => make_problem_1d(other.parse()?, size, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_for_square_problems() {
        let p = make_problem_1d(Problem1d::Shaw, 32, &Params::new()).unwrap();
        let (x, kind) = p.tls_reference(64).unwrap();
        assert_eq!(kind, ReferenceKind::ExactSquare);
        assert_eq!(x, p.x_true);
        let (_, kind) = p.tls_reference(0).unwrap();
        assert_eq!(kind, ReferenceKind::ExactSquare);
        let g = make_gravity_2d(4, 0.5).unwrap();
        let (x, kind) = g.tls_reference(64).unwrap();
        assert_eq!(kind, ReferenceKind::Classical);
        assert!(crate::linalg::relative_error(&x, &g.x_true) <= 1e-8);
    }

    #[test]
    fn noise_is_scaled_and_recorded() {
        let p = make_problem_1d(Problem1d::Foxgood, 16, &Params::new()).unwrap();
        let b0 = p.b.clone();
        let q = p.with_noise(1e-2, RngSeed(1)).unwrap();
        let e = crate::linalg::sub_vec(&q.b, &b0);
        assert!((norm2(&e) - 1e-2 * norm2(&b0)).abs() <= 1e-12 * norm2(&b0));
        assert!(!q.is_noiseless());
    }

    #[test]
    fn make_problem_dispatch() {
        assert_eq!(make_problem("SHAW", 8, &Params::new()).unwrap().name, "shaw");
        assert_eq!(make_problem("blur", 8, &Params::new()).unwrap().metadata["band"], 8.0);
        assert_eq!(make_problem("gravity2d", 4, &Params::new()).unwrap().n, 16);
        assert!(make_problem("heat", 8, &Params::new()).is_err());
        let bad = Params::from([("band".to_string(), 2.5)]);
        assert!(make_problem("blur", 8, &bad).is_err());
    }
}
