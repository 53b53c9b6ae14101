use std::f64::consts::PI;
use std::io::Write;

use super::fluid::dist;
use crate::{Error, Point, Result};

/// Largest allowed ratio between the longest and shortest segment.
pub const MAX_QUASI_UNIFORMITY: f64 = 4.0;

/// Polygonal chain describing the reference configuration of the solid.
///
/// Segment `k` joins nodes `k` and `k+1`; a closed chain also joins the last
/// node back to node 0.
#[derive(Debug, Clone)]
pub struct SolidMesh {
    nodes: Vec<Point>,
    segments: Vec<[usize; 2]>,
    lengths: Vec<f64>,
    closed: bool,
}

impl SolidMesh {
    /// Build a chain through `nodes`, validating segment lengths and
    /// quasi-uniformity.
    pub fn new(nodes: Vec<Point>, closed: bool) -> Result<Self> {
        let m = nodes.len();
        if m < 2 || (closed && m < 3) {
            return Err(Error::InvalidMesh(format!("too few nodes ({m})")));
        }
        let nseg = if closed { m } else { m - 1 };
        let segments: Vec<[usize; 2]> = (0..nseg).map(|k| [k, (k + 1) % m]).collect();
        Self::from_segments(nodes, segments, closed)
    }

    /// Build a chain from an explicit segment list. Segment order is free;
    /// the list must still describe a valid chain over `nodes`.
    pub fn from_segments(nodes: Vec<Point>, segments: Vec<[usize; 2]>, closed: bool) -> Result<Self> {
        if nodes.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh("non-finite node coordinate".into()));
        }
        let mut lengths = Vec::with_capacity(segments.len());
        for s in &segments {
            if s[0] >= nodes.len() || s[1] >= nodes.len() {
                return Err(Error::InvalidMesh(format!("segment {s:?} references a missing node")));
            }
            let l = dist(nodes[s[0]], nodes[s[1]]);
            if !(l > 0.0) {
                return Err(Error::InvalidMesh(format!("segment {s:?} has zero length")));
            }
            lengths.push(l);
        }
        let lmax = lengths.iter().cloned().fold(0.0, f64::max);
        let lmin = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        if lmax / lmin > MAX_QUASI_UNIFORMITY {
            return Err(Error::InvalidMesh(format!(
                "quasi-uniformity ratio {:.3} exceeds {MAX_QUASI_UNIFORMITY}",
                lmax / lmin
            )));
        }
        Ok(SolidMesh { nodes, segments, lengths, closed })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn segments(&self) -> &[[usize; 2]] {
        &self.segments
    }

    /// Reference length of each segment.
    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Largest segment length.
    pub fn h(&self) -> f64 {
        self.lengths.iter().cloned().fold(0.0, f64::max)
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Reference arclength of each node measured along the chain from node 0.
    /// Only meaningful for chains whose segments follow node order.
    pub fn node_arclength(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.nodes.len()];
        for k in 1..self.nodes.len() {
            s[k] = s[k - 1] + dist(self.nodes[k - 1], self.nodes[k]);
        }
        s
    }

    /// Ratio between the longest and shortest segment.
    pub fn quasi_uniformity(&self) -> f64 {
        let lmin = self.lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        self.h() / lmin
    }

    /// Node positions after adding the interleaved displacement `d`.
    pub fn deformed(&self, d: &[f64]) -> Vec<Point> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(k, x)| [x[0] + d[2 * k], x[1] + d[2 * k + 1]])
            .collect()
    }

    /// Write node coordinates as `x,y` lines.
    pub fn write_nodes_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y")?;
        for v in &self.nodes {
            writeln!(w, "{:.16e},{:.16e}", v[0], v[1])?;
        }
        Ok(())
    }

    /// Write segment connectivity as `i,j` lines.
    pub fn write_segments_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "i,j")?;
        for s in &self.segments {
            writeln!(w, "{},{}", s[0], s[1])?;
        }
        Ok(())
    }
}

/// Closed chain with `m` nodes at equally spaced parameter angles on the
/// ellipse with semi-axes `a` (along x) and `b` (along y).
pub fn build_ellipse(center: Point, a: f64, b: f64, m: usize) -> Result<SolidMesh> {
    if m < 8 {
        return Err(Error::InvalidArgument(format!("ellipse needs at least 8 nodes, got {m}")));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument("ellipse semi-axes must be positive".into()));
    }
    let inside = center[0] - a > 0.0
        && center[0] + a < 1.0
        && center[1] - b > 0.0
        && center[1] + b < 1.0;
    if !inside {
        return Err(Error::InvalidArgument("ellipse is not strictly inside the unit square".into()));
    }
    let nodes = ellipse_points(center, a, b, m);
    SolidMesh::new(nodes, true)
}

/// Equal-angle sample points of an ellipse, without validation.
pub fn ellipse_points(center: Point, a: f64, b: f64, m: usize) -> Vec<Point> {
    (0..m)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / m as f64;
            [center[0] + a * th.cos(), center[1] + b * th.sin()]
        })
        .collect()
}
