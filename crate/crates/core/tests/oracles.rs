//! Sparse kernels checked against dense nalgebra computations.

use immersed_fsi::linalg::{generalized_eig_max, lu_solve, BorderedSystem, SparseLu, SparseMatrix, EIG_MAX_ITER};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_dense(a: &SparseMatrix) -> DMatrix<f64> {
    let rows = a.to_dense();
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| rows[i][j])
}

/// Random sparse matrix with `per_row` off-diagonal entries per row and a
/// diagonal of magnitude `diag`; `diag = 0` leaves the diagonal empty.
fn random_sparse(rng: &mut ChaCha8Rng, n: usize, per_row: usize, diag: f64) -> SparseMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        if diag != 0.0 {
            t.push((i, i, diag * rng.gen_range(0.5..1.5)));
        }
        for _ in 0..per_row {
            t.push((i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0)));
        }
    }
    SparseMatrix::from_triplets(n, n, &t)
}

fn rel_diff(a: &[f64], b: &DVector<f64>) -> f64 {
    let num: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    num / b.norm().max(1e-300)
}

#[test]
fn sparse_lu_matches_dense_lu_on_nonsymmetric_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [5, 40, 200] {
        let a = random_sparse(&mut rng, n, 4, 4.0);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = lu_solve(&a, &b).unwrap();
        let dense = to_dense(&a).lu().solve(&DVector::from_vec(b.clone())).unwrap();
        assert!(rel_diff(&x, &dense) < 1e-10, "n = {n}");
    }
}

#[test]
fn sparse_lu_handles_zero_diagonal_saddle_points() {
    // [[A, B^T], [B, 0]] needs off-diagonal pivots in the lower block.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (n, m) = (30, 10);
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 4.0));
        if i + 1 < n {
            t.push((i, i + 1, -1.0));
            t.push((i + 1, i, -1.0));
        }
    }
    for k in 0..m {
        for _ in 0..3 {
            let j = rng.gen_range(0..n);
            let v = rng.gen_range(0.5..1.0);
            t.push((n + k, j, v));
            t.push((j, n + k, v));
        }
        t.push((n + k, 3 * k, 1.0));
        t.push((3 * k, n + k, 1.0));
    }
    let a = SparseMatrix::from_triplets(n + m, n + m, &t);
    let b: Vec<f64> = (0..n + m).map(|i| (i as f64).sin()).collect();
    let x = lu_solve(&a, &b).unwrap();
    let dense = to_dense(&a).lu().solve(&DVector::from_vec(b)).unwrap();
    assert!(rel_diff(&x, &dense) < 1e-10);
}

#[test]
fn singular_matrix_is_rejected() {
    let a = SparseMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 4.0), (2, 2, 1.0)]);
    assert!(SparseLu::new(&a).is_err());
}

#[test]
fn bordered_solve_matches_dense_block_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (n, k) = (60, 8);
    let a = random_sparse(&mut rng, n, 3, 5.0);
    let e = {
        let t: Vec<_> = (0..3 * k).map(|_| (rng.gen_range(0..n), rng.gen_range(0..k), rng.gen_range(-1.0..1.0))).collect();
        SparseMatrix::from_triplets(n, k, &t)
    };
    let f = {
        let t: Vec<_> = (0..3 * k).map(|_| (rng.gen_range(0..k), rng.gen_range(0..n), rng.gen_range(-1.0..1.0))).collect();
        SparseMatrix::from_triplets(k, n, &t)
    };
    let d = random_sparse(&mut rng, k, 1, 3.0);
    let sys = BorderedSystem::new(a.clone()).unwrap();
    let factor = sys.factor(e.clone(), f.clone(), d.clone()).unwrap();
    let rhs_x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rhs_y: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (x, y) = factor.solve(&sys, &rhs_x, &rhs_y);

    let mut full = DMatrix::zeros(n + k, n + k);
    full.view_mut((0, 0), (n, n)).copy_from(&to_dense(&a));
    full.view_mut((0, n), (n, k)).copy_from(&to_dense(&e));
    full.view_mut((n, 0), (k, n)).copy_from(&to_dense(&f));
    full.view_mut((n, n), (k, k)).copy_from(&to_dense(&d));
    let rhs = DVector::from_iterator(n + k, rhs_x.iter().chain(&rhs_y).copied());
    let expected = full.lu().solve(&rhs).unwrap();
    let got: Vec<f64> = x.into_iter().chain(y).collect();
    assert!(rel_diff(&got, &expected) < 1e-11);
}

#[test]
fn generalized_eigenvalue_matches_dense_symmetric_solver() {
    let n = 24;
    // Stiffness and lumped-free mass of a 1D periodic P1 chain with varying cells.
    let h: Vec<f64> = (0..n).map(|i| 0.5 + 0.4 * ((i as f64) * 0.7).sin().abs()).collect();
    let (mut kt, mut mt) = (Vec::new(), Vec::new());
    for (e, &he) in h.iter().enumerate() {
        let (a, b) = (e, (e + 1) % n);
        for (i, j, ks, ms) in [(a, a, 1.0, 2.0), (b, b, 1.0, 2.0), (a, b, -1.0, 1.0), (b, a, -1.0, 1.0)] {
            kt.push((i, j, ks / he));
            mt.push((i, j, ms * he / 6.0));
        }
    }
    let k = SparseMatrix::from_triplets(n, n, &kt);
    let m = SparseMatrix::from_triplets(n, n, &mt);
    let est = generalized_eig_max(&k, &m, 1e-10, EIG_MAX_ITER).unwrap();

    let md = to_dense(&m);
    let chol = md.clone().cholesky().unwrap();
    let linv = chol.l().try_inverse().unwrap();
    let sym = &linv * to_dense(&k) * linv.transpose();
    let exact = SymmetricEigen::new(sym).eigenvalues.max();
    assert!((est.lambda - exact).abs() <= 1e-6 * exact, "{} vs {exact}", est.lambda);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lu_residual_is_small(seed in any::<u64>(), n in 2usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, n, 3, 6.0);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = lu_solve(&a, &b).unwrap();
        let r = a.mul_vec(&x);
        let res = r.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        prop_assert!(res < 1e-11);
    }

    #[test]
    fn transpose_is_an_involution(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, n, 2, 0.0);
        prop_assert_eq!(a.transpose().transpose().to_dense(), a.to_dense());
    }
}
