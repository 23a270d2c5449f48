//! Randomized core reduction for large-scale ill-posed total least squares.
//!
//! The solver touches `A` only through products with `A` and `Aᵀ`. It samples
//! the dominant range of `A` with an adaptive Gaussian range finder plus
//! subspace iteration, forms a randomized SVD `A ≈ U₁Σ₁V₁ᵀ`, reduces
//! `[b, A]` to a small diagonal-plus-border core problem, solves that in
//! closed form and maps the result back.
//!
//! ```no_run
//! use rctls::{problems, rangefinder::RangeFinderConfig, tls};
//!
//! let p = problems::make_problem_1d(problems::Problem1d::Shaw, 256, &Default::default()).unwrap();
//! let cfg = RangeFinderConfig { tolerance: 1e-3, ..Default::default() };
//! let sol = tls::solve_randomized_tls(p.op.as_ref(), &p.b, &cfg).unwrap();
//! println!("rank {} residual {:e}", sol.rank, sol.residual_norm);
//! ```

pub mod corered;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod problems;
pub mod rangefinder;
pub mod tls;

pub use error::{Error, Result};
