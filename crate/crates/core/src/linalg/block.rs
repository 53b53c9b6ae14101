use super::lu::{lu_solve, SparseLu};
use super::sparse::{SparseMatrix, Triplets};
use crate::{Error, Result};

/// Sizes and starting offsets of the unknown blocks of a composed system.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLayout {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockLayout {
    pub fn new(sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        offsets.push(0);
        for s in sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        BlockLayout { sizes: sizes.to_vec(), offsets }
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn size(&self, b: usize) -> usize {
        self.sizes[b]
    }

    pub fn offset(&self, b: usize) -> usize {
        self.offsets[b]
    }

    /// View of block `b` inside a full vector.
    pub fn part<'a>(&self, x: &'a [f64], b: usize) -> &'a [f64] {
        &x[self.offsets[b]..self.offsets[b + 1]]
    }
}

/// One matrix block placed at block position `(row, col)` with a scale.
#[derive(Debug, Clone, Copy)]
pub struct Block<'a> {
    pub row: usize,
    pub col: usize,
    pub scale: f64,
    pub matrix: &'a SparseMatrix,
}

impl<'a> Block<'a> {
    pub fn new(row: usize, col: usize, scale: f64, matrix: &'a SparseMatrix) -> Self {
        Block { row, col, scale, matrix }
    }
}

/// A composed sparse linear system.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub layout: BlockLayout,
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
}

/// Place scaled blocks into one sparse matrix and concatenate the right-hand
/// side parts. Blocks landing on the same position are summed.
pub fn compose_system(sizes: &[usize], blocks: &[Block<'_>], rhs: &[&[f64]]) -> Result<BlockSystem> {
    let layout = BlockLayout::new(sizes);
    if rhs.len() != sizes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} rhs parts for {} blocks",
            rhs.len(),
            sizes.len()
        )));
    }
    let mut nnz = 0;
    for b in blocks {
        if b.row >= sizes.len() || b.col >= sizes.len() {
            return Err(Error::InvalidArgument(format!("block ({}, {}) out of range", b.row, b.col)));
        }
        if b.matrix.nrows() != sizes[b.row] || b.matrix.ncols() != sizes[b.col] {
            return Err(Error::InvalidArgument(format!(
                "block ({}, {}) is {}x{}, expected {}x{}",
                b.row,
                b.col,
                b.matrix.nrows(),
                b.matrix.ncols(),
                sizes[b.row],
                sizes[b.col]
            )));
        }
        nnz += b.matrix.nnz();
    }
    let n = layout.total();
    let mut t = Triplets::with_capacity(n, n, nnz);
    for b in blocks {
        let (r0, c0) = (layout.offset(b.row), layout.offset(b.col));
        for i in 0..b.matrix.nrows() {
            let (cols, vals) = b.matrix.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                t.push(r0 + i, c0 + j, b.scale * v);
            }
        }
    }
    let mut full_rhs = Vec::with_capacity(n);
    for (k, part) in rhs.iter().enumerate() {
        if part.len() != sizes[k] {
            return Err(Error::InvalidArgument(format!(
                "rhs part {k} has length {}, expected {}",
                part.len(),
                sizes[k]
            )));
        }
        full_rhs.extend_from_slice(part);
    }
    Ok(BlockSystem { layout, matrix: t.build(), rhs: full_rhs })
}

impl BlockSystem {
    /// Factorize and solve with one refinement step.
    pub fn solve(&self) -> Result<Vec<f64>> {
        lu_solve(&self.matrix, &self.rhs)
    }

    /// Solve reusing an existing factorization of `self.matrix`.
    pub fn solve_with(&self, lu: &SparseLu) -> Vec<f64> {
        lu.solve_refined(&self.matrix, &self.rhs, 1)
    }
}
