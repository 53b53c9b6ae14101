use super::fluid::{dist, FluidMesh, BARY_TOL};
use crate::{Error, Point, Result};

/// One piece of a segment that lies inside a single fluid triangle.
///
/// `t_start` and `t_end` are arclength positions along the segment, measured
/// from its first endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPiece {
    pub t_start: f64,
    pub t_end: f64,
    pub triangle: usize,
}

/// Decomposition of a straight segment by the fluid triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCut {
    pub length: f64,
    pub pieces: Vec<CutPiece>,
}

impl SegmentCut {
    /// Piece bounds as fractions of the segment length.
    pub fn fractions(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        self.pieces
            .iter()
            .map(|p| (p.t_start / self.length, p.t_end / self.length, p.triangle))
    }
}

/// Split the segment `p0 -> p1` at every crossing with a triangle edge and
/// assign each sub-interval to the triangle containing its midpoint.
pub fn cut_segment(mesh: &FluidMesh, p0: Point, p1: Point) -> Result<SegmentCut> {
    for p in [p0, p1] {
        if !mesh.contains(p) {
            return Err(Error::OutOfDomain { x: p[0], y: p[1] });
        }
    }
    let length = dist(p0, p1);
    if !(length > 0.0) {
        return Err(Error::InvalidArgument("segment has zero length".into()));
    }
    let dir = [p1[0] - p0[0], p1[1] - p0[1]];
    let lo = [p0[0].min(p1[0]), p0[1].min(p1[1])];
    let hi = [p0[0].max(p1[0]), p0[1].max(p1[1])];

    let mut params = vec![0.0, 1.0];
    for t in mesh.candidates_in_box(lo, hi) {
        let c = mesh.corners(t);
        for e in 0..3 {
            if let Some(s) = crossing(p0, dir, c[e], c[(e + 1) % 3]) {
                params.push(s);
            }
        }
    }
    params.sort_by(f64::total_cmp);
    params.dedup_by(|b, a| (*b - *a).abs() <= 1e-13);
    // Keep the exact end parameter after deduplication.
    *params.last_mut().unwrap() = 1.0;

    let mut pieces: Vec<CutPiece> = Vec::with_capacity(params.len());
    for w in params.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let x = [p0[0] + mid * dir[0], p0[1] + mid * dir[1]];
        let tri = mesh.locate_point(x)?.triangle;
        let (a, b) = (w[0] * length, w[1] * length);
        match pieces.last_mut() {
            Some(last) if last.triangle == tri => last.t_end = b,
            _ => pieces.push(CutPiece { t_start: a, t_end: b, triangle: tri }),
        }
    }
    Ok(SegmentCut { length, pieces })
}

/// Parameter `s` in the open interval (0, 1) where `p0 + s*dir` crosses the
/// closed edge `a -> b`, if any. Parallel edges contribute no crossing.
fn crossing(p0: Point, dir: Point, a: Point, b: Point) -> Option<f64> {
    let e = [b[0] - a[0], b[1] - a[1]];
    let denom = dir[0] * e[1] - dir[1] * e[0];
    let scale = dir[0].hypot(dir[1]) * e[0].hypot(e[1]);
    if denom.abs() <= 1e-14 * scale {
        return None;
    }
    let w = [a[0] - p0[0], a[1] - p0[1]];
    let s = (w[0] * e[1] - w[1] * e[0]) / denom;
    let r = (w[0] * dir[1] - w[1] * dir[0]) / denom;
    let inside_edge = (-BARY_TOL..=1.0 + BARY_TOL).contains(&r);
    (inside_edge && s > 0.0 && s < 1.0).then_some(s)
}
