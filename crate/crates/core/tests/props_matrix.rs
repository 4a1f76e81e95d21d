//! Property tests for the dense-matrix kernel: algebraic identities that
//! must hold for any well-formed input, with factorization and solve
//! routines checked against residual oracles.

use pinv_core::harness::corpus::random_matrix;
use pinv_core::harness::rng::Xoshiro256pp;
use pinv_core::Matrix;
use proptest::prelude::*;

fn rand_mat(seed: u64, rows: usize, cols: usize) -> Matrix {
    let mut rng = Xoshiro256pp::for_instance(seed, 0);
    random_matrix(&mut rng, rows, cols, 1.0)
}

/// SPD matrix built as AᵀA + I so the Cholesky factorization cannot fail.
fn rand_spd(seed: u64, n: usize) -> Matrix {
    let a = rand_mat(seed, n + 2, n);
    a.transpose()
        .matmul(&a)
        .unwrap()
        .add(&Matrix::identity(n))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matmul_is_associative(seed in any::<u64>(), m in 1usize..8, k in 1usize..8, l in 1usize..8, n in 1usize..8) {
        let a = rand_mat(seed, m, k);
        let b = rand_mat(seed.wrapping_add(1), k, l);
        let c = rand_mat(seed.wrapping_add(2), l, n);
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        let scale = 1.0 + a.frob_norm() * b.frob_norm() * c.frob_norm();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn transpose_is_an_involution(seed in any::<u64>(), m in 1usize..10, n in 1usize..10) {
        let a = rand_mat(seed, m, n);
        prop_assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn add_commutes_and_sub_cancels(seed in any::<u64>(), m in 1usize..8, n in 1usize..8) {
        let a = rand_mat(seed, m, n);
        let b = rand_mat(seed.wrapping_add(1), m, n);
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert!(a.add(&b).unwrap().sub(&b).unwrap().max_abs_diff(&a).unwrap() <= 1e-12);
    }

    #[test]
    fn cholesky_reconstructs(seed in any::<u64>(), n in 1usize..8) {
        let s = rand_spd(seed, n);
        let omega = s.cholesky().unwrap();
        // Lower-triangular with strictly positive diagonal.
        for i in 0..n {
            prop_assert!(omega.get(i, i) > 0.0);
            for j in (i + 1)..n {
                prop_assert_eq!(omega.get(i, j), 0.0);
            }
        }
        let back = omega.matmul(&omega.transpose()).unwrap();
        prop_assert!(back.max_abs_diff(&s).unwrap() <= 1e-8 * (1.0 + s.frob_norm()));
    }

    #[test]
    fn solve_spd_recovers(seed in any::<u64>(), n in 1usize..8, k in 1usize..4) {
        let s = rand_spd(seed, n);
        let rhs = rand_mat(seed.wrapping_add(7), n, k);
        let x = s.solve_spd(&rhs).unwrap();
        let res = s.matmul(&x).unwrap().sub(&rhs).unwrap().frob_norm();
        prop_assert!(res <= 1e-8 * (1.0 + rhs.frob_norm()));
    }

    #[test]
    fn solve_lu_recovers(seed in any::<u64>(), n in 1usize..8, k in 1usize..4) {
        // I + R with small R is comfortably nonsingular and unsymmetric.
        let r = rand_mat(seed, n, n).scale(0.4);
        let s = Matrix::identity(n).add(&r).unwrap();
        let rhs = rand_mat(seed.wrapping_add(3), n, k);
        let x = s.solve_lu(&rhs).unwrap();
        let res = s.matmul(&x).unwrap().sub(&rhs).unwrap().frob_norm();
        prop_assert!(res <= 1e-8 * (1.0 + rhs.frob_norm()));
    }

    #[test]
    fn stack_round_trips(seed in any::<u64>(), m in 1usize..6, n1 in 1usize..5, n2 in 1usize..5) {
        let a = rand_mat(seed, m, n1);
        let b = rand_mat(seed.wrapping_add(9), m, n2);
        let h = a.hstack(&b).unwrap();
        prop_assert_eq!(h.col_range(0, n1).unwrap(), a.clone());
        prop_assert_eq!(h.col_range(n1, n1 + n2).unwrap(), b);
        let v = a.transpose().vstack(&a.transpose()).unwrap();
        prop_assert_eq!(v.row_range(0, n1).unwrap(), a.transpose());
    }
}
