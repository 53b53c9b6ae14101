//! Unfitted finite element simulation of a viscous incompressible fluid
//! interacting with an immersed elastic curve.
//!
//! The fluid lives on a structured triangulation of the unit square and is
//! discretized with equal-order P1 velocity/pressure plus a pressure
//! stabilization. The solid is a closed polygonal chain whose motion is tied
//! to the fluid velocity through a Lagrange multiplier on the curve. Three
//! families of time discretization are provided: a monolithic backward Euler
//! coupling and two splittings that treat the elastic force explicitly.

// Validation uses `!(x > 0.0)` so that NaN is rejected along with
// non-positive values; numeric kernels index several arrays in lockstep.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod bench;
pub mod diagnostics;
mod error;
pub mod linalg;
pub mod mesh;
pub mod schemes;

pub use error::{Error, Result};

/// A point or vector in the plane.
pub type Point = [f64; 2];
