//! Sparse matrices, orderings, direct solves and eigenvalue estimates.

mod block;
mod bordered;
mod eig;
mod lu;
mod ordering;
mod sparse;

pub use bordered::{BorderedFactor, BorderedSystem};
pub use block::{compose_system, Block, BlockLayout, BlockSystem};
pub use eig::{generalized_eig_max, rayleigh, EigEstimate, EIG_MAX_ITER, EIG_TOL};
pub use lu::{lu_solve, SparseLu, DIAGONAL_PREFERENCE, ZERO_PIVOT_TOL};
pub use ordering::{fill_reducing_order, nested_dissection, reverse_cuthill_mckee, Graph};
pub use sparse::{axpy, dot, norm_inf, SparseMatrix, Triplets};
