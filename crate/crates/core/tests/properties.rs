use proptest::prelude::*;
use rctls::corered::CoreProblem;
use rctls::linalg::{householder_qr, relative_error, svd_dense, DenseMatrix, RngSeed};
use rctls::operators::{dense_operator, synthetic_operator, LinearOperator};
use rctls::problems::{read_problem, write_problem, ExportedProblem, Params};
use rctls::rangefinder::{range_basis, RangeFinderConfig};
use rctls::tls::{classical_tls, solve_core_closed_form, solve_randomized_tls};

/// Singular values by one-sided Jacobi rotations, sorted descending.
fn jacobi_singular_values(a: &DenseMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|v| v * v).sum();
                let beta: f64 = cols[q].iter().map(|v| v * v).sum();
                let gamma: f64 = (0..m).map(|i| cols[p][i] * cols[q][i]).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * x - s * y;
                    cols[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn gram_defect(q: &DenseMatrix) -> f64 {
    let g = q.tr_matmul(q).unwrap();
    g.sub(&DenseMatrix::identity(q.cols())).unwrap().max_abs()
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_cols).prop_flat_map(move |n| {
        (n..=max_rows.max(n)).prop_flat_map(move |m| {
            prop::collection::vec(-10.0f64..10.0, m * n).prop_map(move |d| DenseMatrix::new(m, n, d).unwrap())
        })
    })
}

/// Strictly decreasing positive σ, with φ and φ_tail bounded away from zero.
fn core_parts() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (1usize..8).prop_flat_map(|t| {
        (
            prop::collection::vec(0.05f64..1.0, t),
            prop::collection::vec(0.01f64..2.0, t),
            0.01f64..2.0,
        )
            .prop_map(|(steps, phi, tail)| {
                let mut sigma = Vec::with_capacity(steps.len());
                let mut s = 10.0;
                for d in steps {
                    s *= 1.0 - 0.9 * d;
                    sigma.push(s);
                }
                (sigma, phi, tail)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qr_factors_reproduce_input(a in matrix(12, 8)) {
        let (q, r) = householder_qr(&a).unwrap();
        prop_assert!(gram_defect(&q) <= 1e-13);
        for i in 0..r.rows() {
            prop_assert!(r.get(i, i) >= 0.0);
            for j in 0..i {
                prop_assert_eq!(r.get(i, j), 0.0);
            }
        }
        let scale = a.max_abs().max(1.0);
        prop_assert!(q.matmul(&r).unwrap().sub(&a).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn svd_matches_jacobi_oracle(a in matrix(10, 7)) {
        let f = svd_dense(&a).unwrap();
        prop_assert!(gram_defect(&f.u) <= 1e-12);
        prop_assert!(gram_defect(&f.v) <= 1e-12);
        prop_assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]) && f.sigma.iter().all(|&s| s >= 0.0));
        let scale = f.sigma[0].max(1.0);
        prop_assert!(f.reconstruct().sub(&a).unwrap().max_abs() <= 1e-12 * scale);
        let oracle = jacobi_singular_values(&a);
        for (s, o) in f.sigma.iter().zip(&oracle) {
            prop_assert!((s - o).abs() <= 1e-11 * scale, "{} vs {}", s, o);
        }
    }

    #[test]
    fn core_sigma_min_is_smallest_singular_value((sigma, phi, tail) in core_parts()) {
        let core = CoreProblem::from_parts(sigma.clone(), phi, tail).unwrap();
        let sol = solve_core_closed_form(&core).unwrap();
        let oracle = jacobi_singular_values(&core.augmented_matrix());
        let smallest = *oracle.last().unwrap();
        prop_assert!((sol.sigma_min - smallest).abs() <= 1e-9 * oracle[0], "{} vs {}", sol.sigma_min, smallest);
        let cap = sigma.last().unwrap().min(tail);
        prop_assert!(sol.sigma_min <= cap * (1.0 + 1e-12));
        prop_assert!(sol.gap > 0.0);
    }

    #[test]
    fn full_rank_sampling_matches_classical(a in matrix(14, 6), seed in any::<u64>()) {
        let m = a.rows();
        let b: Vec<f64> = (0..m).map(|i| ((i * 7 + 3) as f64).sin()).collect();
        let classical = classical_tls(&a, &b);
        prop_assume!(classical.is_ok());
        let classical = classical.unwrap();
        let f = svd_dense(&a).unwrap();
        prop_assume!(f.sigma[f.sigma.len() - 1] > 1e-3 * f.sigma[0]);
        let cfg = RangeFinderConfig {
            target_rank: Some(a.cols()),
            oversample: 0,
            power: 2,
            seed: RngSeed(seed),
            ..Default::default()
        };
        let op = dense_operator(a.clone());
        match solve_randomized_tls(&op, &b, &cfg) {
            Ok(sol) => prop_assert!(relative_error(&sol.x, &classical.x) <= 1e-6, "{}", relative_error(&sol.x, &classical.x)),
            Err(e) => prop_assert_eq!(e.code(), "NEAR_NONGENERIC"),
        }
    }

    #[test]
    fn range_basis_is_orthonormal(decay in 0.3f64..0.9, eps in 1e-6f64..1e-1, seed in any::<u64>()) {
        let n = 40;
        let sigma: Vec<f64> = (0..n).map(|i| decay.powi(i as i32)).collect();
        let (op, _) = synthetic_operator(&sigma, 50, n, RngSeed(seed)).unwrap();
        let cfg = RangeFinderConfig { tolerance: eps, seed: RngSeed(seed ^ 1), ..Default::default() };
        let basis = range_basis(&op, &cfg).unwrap();
        prop_assert!(basis.rank <= n);
        if basis.rank > 0 {
            prop_assert!(gram_defect(&basis.q_basis) <= 1e-12);
        }
    }

    #[test]
    fn export_round_trip_is_exact(a in matrix(6, 6), b_seed in any::<u64>(), label in "[a-z]{1,8}") {
        let (m, n) = a.shape();
        let b: Vec<f64> = (0..m).map(|i| f64::from_bits(b_seed.rotate_left(i as u32) >> 2)).collect();
        let x: Vec<f64> = (0..n).map(|i| -(i as f64) / 3.0).collect();
        let p = ExportedProblem {
            name: label,
            matrix: a,
            b,
            x_true: x,
            metadata: Params::from([("d".to_string(), 0.1)]),
        };
        let mut buf = Vec::new();
        write_problem(&p.clone().into_problem(), &mut buf).unwrap();
        let back = read_problem(buf.as_slice()).unwrap();
        prop_assert!(back.matrix.as_slice().iter().zip(p.matrix.as_slice()).all(|(u, v)| u.to_bits() == v.to_bits()));
        prop_assert!(back.b.iter().zip(&p.b).all(|(u, v)| u.to_bits() == v.to_bits()));
        prop_assert_eq!(back, p);
    }

    #[test]
    fn operator_transpose_is_adjoint(a in matrix(9, 9), seed in any::<u64>()) {
        let op = dense_operator(a.clone());
        let mut rng = RngSeed(seed).rng();
        let x = rctls::linalg::gaussian_vector(a.cols(), &mut rng);
        let y = rctls::linalg::gaussian_vector(a.rows(), &mut rng);
        let lhs = rctls::linalg::dot(&op.apply(&x).unwrap(), &y);
        let rhs = rctls::linalg::dot(&x, &op.apply_transpose(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()) * a.max_abs().max(1.0));
    }
}
