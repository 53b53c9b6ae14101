//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Column `k` of the factors is obtained from a sparse triangular solve with
//! the columns of `L` computed so far; the nonzero pattern of that solve is
//! found by a depth-first search on the graph of `L` before any arithmetic
//! is done, so the work is proportional to the floating-point operations.
//! Columns are visited in a fill-reducing order and the pivot row prefers the
//! symmetric counterpart of the column whenever it is not too small.

use std::sync::OnceLock;

use super::ordering::fill_reducing_order;
use super::sparse::{norm_inf, SparseMatrix};
use crate::{Error, Result};

const NONE: usize = usize::MAX;

/// Relative size below which a pivot candidate is treated as zero.
pub const ZERO_PIVOT_TOL: f64 = 1e-14;

/// A diagonal entry is accepted as pivot if its magnitude is at least this
/// fraction of the largest candidate in its column.
pub const DIAGONAL_PREFERENCE: f64 = 1e-3;

/// `P A Q = L U` with `L` unit lower triangular and `U` upper triangular,
/// both stored by columns.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    q: Vec<usize>,
    pinv: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    up: Vec<usize>,
    ui: Vec<usize>,
    ux: Vec<f64>,
    /// `U` by rows without its diagonal, built on first use.
    u_rows: OnceLock<UpperRows>,
}

#[derive(Debug, Clone)]
struct UpperRows {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
    diag: Vec<f64>,
}

/// Sparse vector in the pivot numbering of a factorization.
struct Pivoted {
    idx: Vec<usize>,
    val: Vec<f64>,
}

/// Scratch space for the reach computation of sparse triangular solves.
struct Reach {
    mark: Vec<bool>,
    pstack: Vec<usize>,
    stack: Vec<usize>,
    out: Vec<usize>,
}

impl Reach {
    fn new(n: usize) -> Self {
        Reach { mark: vec![false; n], pstack: vec![0; n], stack: Vec::new(), out: Vec::new() }
    }

    /// Nodes reachable from `starts` in the graph `j -> idx[ptr[j]+skip..ptr[j+1]]`,
    /// in topological order. Marks are cleared before returning.
    fn run(&mut self, ptr: &[usize], idx: &[usize], skip: usize, starts: impl Iterator<Item = usize>) -> Vec<usize> {
        self.out.clear();
        for s in starts {
            if self.mark[s] {
                continue;
            }
            self.stack.push(s);
            self.mark[s] = true;
            self.pstack[s] = ptr[s] + skip;
            while let Some(&j) = self.stack.last() {
                let end = ptr[j + 1];
                let mut p = self.pstack[j];
                let mut descended = false;
                while p < end {
                    let i = idx[p];
                    p += 1;
                    if !self.mark[i] {
                        self.pstack[j] = p;
                        self.mark[i] = true;
                        self.pstack[i] = ptr[i] + skip;
                        self.stack.push(i);
                        descended = true;
                        break;
                    }
                }
                if !descended {
                    self.stack.pop();
                    self.out.push(j);
                }
            }
        }
        self.out.reverse();
        for &j in &self.out {
            self.mark[j] = false;
        }
        self.out.clone()
    }
}

impl SparseLu {
    /// Factorize with the default fill-reducing column order.
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        check_square(a)?;
        let q = fill_reducing_order(a);
        Self::with_order(a, q)
    }

    /// Factorize visiting columns in the order `q`.
    pub fn with_order(a: &SparseMatrix, q: Vec<usize>) -> Result<Self> {
        check_square(a)?;
        let n = a.nrows();
        assert_eq!(q.len(), n, "column order has wrong length");
        let zero_tol = ZERO_PIVOT_TOL * a.max_abs();
        // Columns of A are the rows of its transpose.
        let at = a.transpose();

        let mut pinv = vec![NONE; n];
        let mut lp = Vec::with_capacity(n + 1);
        let mut up = Vec::with_capacity(n + 1);
        let cap = 4 * a.nnz() + n;
        let mut li = Vec::with_capacity(cap);
        let mut lx = Vec::with_capacity(cap);
        let mut ui = Vec::with_capacity(cap);
        let mut ux = Vec::with_capacity(cap);

        let mut x = vec![0.0; n];
        let mut xi = vec![0usize; n];
        let mut mark = vec![NONE; n];
        let mut pstack = vec![0usize; n];
        let mut stack = Vec::with_capacity(n);

        for k in 0..n {
            lp.push(li.len());
            up.push(ui.len());
            let col = q[k];
            let (bi, bx) = at.row(col);

            // Pattern of L \ A(:, col) in topological order: xi[top..n].
            let mut top = n;
            for &i in bi {
                if mark[i] != k {
                    top = dfs(i, k, &lp, &li, &pinv, &mut xi, top, &mut mark, &mut pstack, &mut stack);
                }
            }
            for &j in &xi[top..n] {
                x[j] = 0.0;
            }
            for (&i, &v) in bi.iter().zip(bx) {
                x[i] = v;
            }
            for px in top..n {
                let j = xi[px];
                let jj = pinv[j];
                if jj == NONE {
                    continue;
                }
                let xj = x[j];
                for p in lp[jj] + 1..lp[jj + 1] {
                    x[li[p]] -= lx[p] * xj;
                }
            }

            let mut ipiv = NONE;
            let mut best = -1.0;
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    let t = x[i].abs();
                    if t > best {
                        best = t;
                        ipiv = i;
                    }
                } else {
                    ui.push(pinv[i]);
                    ux.push(x[i]);
                }
            }
            if ipiv == NONE || best <= zero_tol {
                return Err(Error::Singular { pivot: k });
            }
            if pinv[col] == NONE && mark[col] == k && x[col].abs() >= DIAGONAL_PREFERENCE * best {
                ipiv = col;
            }
            let pivot = x[ipiv];
            ui.push(k);
            ux.push(pivot);
            pinv[ipiv] = k;
            li.push(ipiv);
            lx.push(1.0);
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    li.push(i);
                    lx.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
        }
        lp.push(li.len());
        up.push(ui.len());
        for i in li.iter_mut() {
            *i = pinv[*i];
        }
        Ok(SparseLu { n, q, pinv, lp, li, lx, up, ui, ux, u_rows: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries in `L` and `U`.
    pub fn factor_nnz(&self) -> usize {
        self.li.len() + self.ui.len()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "rhs has wrong length");
        let mut x = vec![0.0; self.n];
        for (i, &v) in b.iter().enumerate() {
            x[self.pinv[i]] = v;
        }
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.lp[j] + 1..self.lp[j + 1] {
                    x[self.li[p]] -= self.lx[p] * xj;
                }
            }
        }
        for j in (0..self.n).rev() {
            let d = self.up[j + 1] - 1;
            x[j] /= self.ux[d];
            let xj = x[j];
            if xj != 0.0 {
                for p in self.up[j]..d {
                    x[self.ui[p]] -= self.ux[p] * xj;
                }
            }
        }
        let mut out = vec![0.0; self.n];
        for (k, &c) in self.q.iter().enumerate() {
            out[c] = x[k];
        }
        out
    }

    /// Solve and apply iterative refinement steps against `a`.
    pub fn solve_refined(&self, a: &SparseMatrix, b: &[f64], steps: usize) -> Vec<f64> {
        let mut x = self.solve(b);
        for _ in 0..steps {
            let ax = a.mul_vec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            if norm_inf(&r) == 0.0 {
                break;
            }
            let dx = self.solve(&r);
            x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
        }
        x
    }
}

impl SparseLu {
    fn upper_rows(&self) -> &UpperRows {
        self.u_rows.get_or_init(|| {
            let n = self.n;
            let mut count = vec![0usize; n + 1];
            let mut diag = vec![0.0; n];
            for k in 0..n {
                let d = self.up[k + 1] - 1;
                diag[k] = self.ux[d];
                for &i in &self.ui[self.up[k]..d] {
                    count[i + 1] += 1;
                }
            }
            for i in 0..n {
                count[i + 1] += count[i];
            }
            let mut next = count.clone();
            let mut idx = vec![0usize; count[n]];
            let mut val = vec![0.0; count[n]];
            for k in 0..n {
                let d = self.up[k + 1] - 1;
                for p in self.up[k]..d {
                    let i = self.ui[p];
                    idx[next[i]] = k;
                    val[next[i]] = self.ux[p];
                    next[i] += 1;
                }
            }
            UpperRows { ptr: count, idx, val, diag }
        })
    }

    /// `L⁻¹ P b` for a sparse `b` given in the original row numbering.
    fn lower_sparse(&self, reach: &mut Reach, work: &mut [f64], bi: &[usize], bx: &[f64]) -> Pivoted {
        let idx = reach.run(&self.lp, &self.li, 1, bi.iter().map(|&i| self.pinv[i]));
        for (&i, &v) in bi.iter().zip(bx) {
            work[self.pinv[i]] += v;
        }
        for &j in &idx {
            let xj = work[j];
            if xj != 0.0 {
                for p in self.lp[j] + 1..self.lp[j + 1] {
                    work[self.li[p]] -= self.lx[p] * xj;
                }
            }
        }
        let val = idx.iter().map(|&j| std::mem::take(&mut work[j])).collect();
        Pivoted { idx, val }
    }

    /// `U⁻ᵀ Qᵀ c` for a sparse `c` given in the original column numbering.
    fn upper_transpose_sparse(
        &self,
        reach: &mut Reach,
        work: &mut [f64],
        qinv: &[usize],
        ci: &[usize],
        cx: &[f64],
    ) -> Pivoted {
        let rows = self.upper_rows();
        let idx = reach.run(&rows.ptr, &rows.idx, 0, ci.iter().map(|&c| qinv[c]));
        for (&c, &v) in ci.iter().zip(cx) {
            work[qinv[c]] += v;
        }
        for &j in &idx {
            work[j] /= rows.diag[j];
            let yj = work[j];
            if yj != 0.0 {
                for p in rows.ptr[j]..rows.ptr[j + 1] {
                    work[rows.idx[p]] -= rows.val[p] * yj;
                }
            }
        }
        let val = idx.iter().map(|&j| std::mem::take(&mut work[j])).collect();
        Pivoted { idx, val }
    }

    /// Dense `C A⁻¹ E` (row-major, `C.nrows() × E.ncols()`) for sparse `C`
    /// and `E`, using sparse triangular solves so that the cost follows the
    /// reach of the border rather than the size of the factors.
    pub fn border_product(&self, c: &SparseMatrix, e: &SparseMatrix) -> Vec<f64> {
        assert_eq!(c.ncols(), self.n, "left border has wrong width");
        assert_eq!(e.nrows(), self.n, "right border has wrong height");
        let mut qinv = vec![0usize; self.n];
        for (k, &col) in self.q.iter().enumerate() {
            qinv[col] = k;
        }
        let mut reach = Reach::new(self.n);
        let mut work = vec![0.0; self.n];
        // Empty border rows and columns contribute nothing and are skipped.
        let left: Vec<(usize, Pivoted)> = (0..c.nrows())
            .filter(|&i| !c.row(i).0.is_empty())
            .map(|i| {
                let (ci, cx) = c.row(i);
                (i, self.upper_transpose_sparse(&mut reach, &mut work, &qinv, ci, cx))
            })
            .collect();
        let et = e.transpose();
        let (p, r) = (c.nrows(), e.ncols());
        let mut out = vec![0.0; p * r];
        for j in 0..r {
            let (bi, bx) = et.row(j);
            if bi.is_empty() {
                continue;
            }
            let z = self.lower_sparse(&mut reach, &mut work, bi, bx);
            for (&k, &v) in z.idx.iter().zip(&z.val) {
                work[k] = v;
            }
            for (i, y) in &left {
                out[i * r + j] = y.idx.iter().zip(&y.val).map(|(&k, &v)| v * work[k]).sum();
            }
            for &k in &z.idx {
                work[k] = 0.0;
            }
        }
        out
    }
}

fn check_square(a: &SparseMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "LU needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    root: usize,
    k: usize,
    lp: &[usize],
    li: &[usize],
    pinv: &[usize],
    xi: &mut [usize],
    mut top: usize,
    mark: &mut [usize],
    pstack: &mut [usize],
    stack: &mut Vec<usize>,
) -> usize {
    stack.clear();
    stack.push(root);
    while let Some(&j) = stack.last() {
        let jj = pinv[j];
        if mark[j] != k {
            mark[j] = k;
            pstack[j] = if jj == NONE { 0 } else { lp[jj] };
        }
        let end = if jj == NONE { 0 } else { lp[jj + 1] };
        let mut p = pstack[j];
        let mut descended = false;
        while p < end {
            let i = li[p];
            p += 1;
            if mark[i] != k {
                pstack[j] = p;
                stack.push(i);
                descended = true;
                break;
            }
        }
        if !descended {
            pstack[j] = end;
            stack.pop();
            top -= 1;
            xi[top] = j;
        }
    }
    top
}

/// Factorize and solve `A x = b` with one step of iterative refinement.
pub fn lu_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::InvalidArgument("rhs length does not match matrix".into()));
    }
    let lu = SparseLu::new(a)?;
    Ok(lu.solve_refined(a, b, 1))
}
