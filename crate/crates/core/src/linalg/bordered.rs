//! Block elimination for a large constant sparse matrix with a small
//! border that changes from solve to solve:
//!
//! ```text
//! [ K  E ] [x]   [f]
//! [ F  D ] [y] = [g]
//! ```
//!
//! `K` is factorized once. Each border is reduced to the dense Schur
//! complement `D − F K⁻¹ E`, which is small.

use nalgebra::{DMatrix, DVector};

use super::lu::SparseLu;
use super::sparse::SparseMatrix;
use crate::{Error, Result};

/// Relative pivot size below which the Schur complement counts as singular.
const SCHUR_PIVOT_TOL: f64 = 1e-14;

/// The constant part `K` together with its factorization.
#[derive(Debug, Clone)]
pub struct BorderedSystem {
    k: SparseMatrix,
    lu: SparseLu,
}

/// A border `(E, F, D)` eliminated against a [`BorderedSystem`].
#[derive(Debug, Clone)]
pub struct BorderedFactor {
    e: SparseMatrix,
    f: SparseMatrix,
    d: SparseMatrix,
    schur: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl BorderedSystem {
    pub fn new(k: SparseMatrix) -> Result<Self> {
        let lu = SparseLu::new(&k)?;
        Ok(BorderedSystem { k, lu })
    }

    pub fn dim(&self) -> usize {
        self.k.nrows()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.k
    }

    pub fn lu(&self) -> &SparseLu {
        &self.lu
    }

    /// Eliminate a border: `e` is `dim × m`, `f` is `m × dim`, `d` is `m × m`.
    pub fn factor(&self, e: SparseMatrix, f: SparseMatrix, d: SparseMatrix) -> Result<BorderedFactor> {
        let n = self.dim();
        let m = d.nrows();
        if e.nrows() != n || e.ncols() != m || f.nrows() != m || f.ncols() != n || d.ncols() != m {
            return Err(Error::InvalidArgument(format!(
                "border shapes E {}x{}, F {}x{}, D {}x{} do not fit a {n}-dimensional system",
                e.nrows(),
                e.ncols(),
                f.nrows(),
                f.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        let fke = self.lu.border_product(&f, &e);
        let mut s = -DMatrix::from_row_slice(m, m, &fke);
        for i in 0..m {
            let (cols, vals) = d.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                s[(i, j)] += v;
            }
        }
        let scale = s.amax();
        let schur = s.lu();
        let u = schur.u();
        if let Some(k) = (0..m).find(|&k| !(u[(k, k)].abs() > SCHUR_PIVOT_TOL * scale)) {
            return Err(Error::Singular { pivot: n + k });
        }
        Ok(BorderedFactor { e, f, d, schur })
    }
}

impl BorderedFactor {
    pub fn border_dim(&self) -> usize {
        self.d.nrows()
    }

    fn solve_once(&self, sys: &BorderedSystem, f: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let t = sys.lu.solve(f);
        let ft = self.f.mul_vec(&t);
        let rhs = DVector::from_iterator(g.len(), g.iter().zip(&ft).map(|(a, b)| a - b));
        let y: Vec<f64> = self.schur.solve(&rhs).expect("Schur complement checked at factorization").as_slice().to_vec();
        let ey = self.e.mul_vec(&y);
        let w = sys.lu.solve(&ey);
        let x = t.iter().zip(&w).map(|(a, b)| a - b).collect();
        (x, y)
    }

    /// Solve for `(x, y)` with one step of iterative refinement on the full
    /// bordered system.
    pub fn solve(&self, sys: &BorderedSystem, f: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(f.len(), sys.dim(), "first rhs block has wrong length");
        assert_eq!(g.len(), self.border_dim(), "second rhs block has wrong length");
        let (mut x, mut y) = self.solve_once(sys, f, g);
        let kx = sys.k.mul_vec(&x);
        let ey = self.e.mul_vec(&y);
        let r1: Vec<f64> = (0..f.len()).map(|i| f[i] - kx[i] - ey[i]).collect();
        let fx = self.f.mul_vec(&x);
        let dy = self.d.mul_vec(&y);
        let r2: Vec<f64> = (0..g.len()).map(|i| g[i] - fx[i] - dy[i]).collect();
        let (dx, dy) = self.solve_once(sys, &r1, &r2);
        x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
        y.iter_mut().zip(&dy).for_each(|(a, b)| *a += b);
        (x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{lu_solve, Triplets};

    #[test]
    fn matches_monolithic_solve() {
        let n = 40;
        let m = 5;
        let mut t = Triplets::new(n + m, n + m);
        for i in 0..n {
            t.push(i, i, 4.0);
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
                t.push(i + 1, i, -1.0);
            }
        }
        for j in 0..m {
            let i = 7 * j + 3;
            t.push(i, n + j, 1.0);
            t.push(n + j, i, 1.0);
            t.push(n + j, i + 1, -0.5);
            if j > 0 {
                t.push(n + j, n + j - 1, 0.25);
            }
        }
        let full = t.build();
        let idx_k: Vec<usize> = (0..n).collect();
        let idx_b: Vec<usize> = (n..n + m).collect();
        let sys = BorderedSystem::new(full.select(&idx_k, &idx_k)).unwrap();
        let fac = sys
            .factor(full.select(&idx_k, &idx_b), full.select(&idx_b, &idx_k), full.select(&idx_b, &idx_b))
            .unwrap();
        let rhs: Vec<f64> = (0..n + m).map(|i| (i as f64 * 0.37).sin()).collect();
        let (x, y) = fac.solve(&sys, &rhs[..n], &rhs[n..]);
        let reference = lu_solve(&full, &rhs).unwrap();
        for (a, b) in x.iter().chain(&y).zip(&reference) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_border_is_reported() {
        let k = SparseMatrix::identity(3);
        let sys = BorderedSystem::new(k).unwrap();
        let e = SparseMatrix::zeros(3, 1);
        let f = SparseMatrix::zeros(1, 3);
        let d = SparseMatrix::zeros(1, 1);
        assert!(matches!(sys.factor(e, f, d), Err(Error::Singular { pivot: 3 })));
    }
}
