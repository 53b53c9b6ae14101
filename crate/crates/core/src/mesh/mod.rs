//! Fluid triangulation, solid chain and their geometric interaction.

mod cut;
mod fluid;
mod solid;

pub use cut::{cut_segment, CutPiece, SegmentCut};
pub use fluid::{build_unit_square, FluidMesh, Location, BARY_TOL};
pub use solid::{build_ellipse, ellipse_points, SolidMesh, MAX_QUASI_UNIFORMITY};
