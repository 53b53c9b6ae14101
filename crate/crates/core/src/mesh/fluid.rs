use std::io::Write;

use crate::{Error, Point, Result};

/// Slack applied to barycentric coordinates and domain bounds when deciding
/// whether a point belongs to a triangle.
pub const BARY_TOL: f64 = 1e-12;

/// Structured triangulation of the unit square.
///
/// Vertex `(i, j)` sits at `(i/n, j/n)` and has index `j*(n+1) + i`. Every
/// square cell is split along the diagonal joining its lower-left and
/// upper-right corners; the triangle below the diagonal comes first.
#[derive(Debug, Clone)]
pub struct FluidMesh {
    n: usize,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    grid: CellGrid,
}

/// Pointer from a point to its containing triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub triangle: usize,
    pub bary: [f64; 3],
}

/// Uniform background grid that buckets triangles by bounding box.
#[derive(Debug, Clone)]
struct CellGrid {
    cells_per_side: usize,
    starts: Vec<usize>,
    entries: Vec<usize>,
}

impl CellGrid {
    fn build(vertices: &[Point], triangles: &[[usize; 3]], cells_per_side: usize) -> Self {
        let ncell = cells_per_side * cells_per_side;
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); ncell];
        for (t, tri) in triangles.iter().enumerate() {
            let (lo, hi) = bbox(tri.iter().map(|&v| vertices[v]));
            let (i0, j0) = Self::cell_of(cells_per_side, [lo[0] - BARY_TOL, lo[1] - BARY_TOL]);
            let (i1, j1) = Self::cell_of(cells_per_side, [hi[0] + BARY_TOL, hi[1] + BARY_TOL]);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * cells_per_side + i].push(t);
                }
            }
        }
        let mut starts = Vec::with_capacity(ncell + 1);
        let mut entries = Vec::new();
        starts.push(0);
        for b in buckets {
            entries.extend(b);
            starts.push(entries.len());
        }
        CellGrid { cells_per_side, starts, entries }
    }

    fn cell_of(cells_per_side: usize, x: Point) -> (usize, usize) {
        let c = cells_per_side as f64;
        let clamp = |v: f64| ((v * c).floor().max(0.0) as usize).min(cells_per_side - 1);
        (clamp(x[0]), clamp(x[1]))
    }

    fn candidates(&self, i: usize, j: usize) -> &[usize] {
        let c = j * self.cells_per_side + i;
        &self.entries[self.starts[c]..self.starts[c + 1]]
    }
}

fn bbox(points: impl Iterator<Item = Point>) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Build the structured triangulation of the unit square with `n`
/// subdivisions per side.
pub fn build_unit_square(n: usize) -> Result<FluidMesh> {
    if n < 1 {
        return Err(Error::InvalidArgument("fluid mesh needs n >= 1".into()));
    }
    let np = n + 1;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity(np * np);
    let mut boundary = Vec::with_capacity(np * np);
    for j in 0..np {
        for i in 0..np {
            vertices.push([i as f64 * h, j as f64 * h]);
            boundary.push(i == 0 || j == 0 || i == n || j == n);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = j * np + i;
            let v10 = v00 + 1;
            let v01 = v00 + np;
            let v11 = v01 + 1;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let grid = CellGrid::build(&vertices, &triangles, n);
    Ok(FluidMesh { n, vertices, triangles, boundary, grid })
}

impl FluidMesh {
    pub fn subdivisions(&self) -> usize {
        self.n
    }

    /// Mesh size `h_f = 1/n`.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    /// Corner coordinates of triangle `t`.
    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area of triangle `t` (positive for counter-clockwise order).
    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    /// Barycentric coordinates of `x` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, x: Point) -> [f64; 3] {
        barycentric(self.corners(t), x)
    }

    /// Whether `x` lies in the closed unit square, up to the barycentric slack.
    pub fn contains(&self, x: Point) -> bool {
        x.iter().all(|&v| v.is_finite() && (-BARY_TOL..=1.0 + BARY_TOL).contains(&v))
    }

    /// Find the triangle containing `x`. Points on shared edges or vertices
    /// go to the lowest triangle index that contains them.
    pub fn locate_point(&self, x: Point) -> Result<Location> {
        if !self.contains(x) {
            return Err(Error::OutOfDomain { x: x[0], y: x[1] });
        }
        let (i, j) = CellGrid::cell_of(self.grid.cells_per_side, x);
        let mut best: Option<Location> = None;
        for &t in self.grid.candidates(i, j) {
            if best.is_some_and(|b| b.triangle < t) {
                continue;
            }
            let bary = self.barycentric(t, x);
            if bary.iter().all(|&l| l >= -BARY_TOL) {
                best = Some(Location { triangle: t, bary });
            }
        }
        best.ok_or(Error::OutOfDomain { x: x[0], y: x[1] })
    }

    /// Triangles whose bounding boxes may intersect the box spanned by two points.
    pub(crate) fn candidates_in_box(&self, lo: Point, hi: Point) -> Vec<usize> {
        let c = self.grid.cells_per_side;
        let (i0, j0) = CellGrid::cell_of(c, lo);
        let (i1, j1) = CellGrid::cell_of(c, hi);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend_from_slice(self.grid.candidates(i, j));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Write vertex coordinates as `x,y` lines.
    pub fn write_vertices_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y")?;
        for v in &self.vertices {
            writeln!(w, "{:.16e},{:.16e}", v[0], v[1])?;
        }
        Ok(())
    }

    /// Write triangle connectivity as `i,j,k` lines.
    pub fn write_triangles_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "i,j,k")?;
        for t in &self.triangles {
            writeln!(w, "{},{},{}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

pub(crate) fn barycentric(c: [Point; 3], x: Point) -> [f64; 3] {
    let [a, b, cc] = c;
    let det = (b[0] - a[0]) * (cc[1] - a[1]) - (cc[0] - a[0]) * (b[1] - a[1]);
    let dx = x[0] - a[0];
    let dy = x[1] - a[1];
    let l1 = (dx * (cc[1] - a[1]) - (cc[0] - a[0]) * dy) / det;
    let l2 = ((b[0] - a[0]) * dy - dx * (b[1] - a[1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_areas() {
        for n in [1, 2, 5, 16] {
            let m = build_unit_square(n).unwrap();
            assert_eq!(m.num_triangles(), 2 * n * n);
            assert_eq!(m.num_vertices(), (n + 1) * (n + 1));
            let total: f64 = (0..m.num_triangles()).map(|t| m.area(t)).sum();
            assert!((total - 1.0).abs() < 1e-13);
            assert!((0..m.num_triangles()).all(|t| m.area(t) > 0.0));
        }
    }

    #[test]
    fn rejects_zero_subdivisions() {
        assert!(matches!(build_unit_square(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn n1_has_two_triangles() {
        let m = build_unit_square(1).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 3], [0, 3, 2]]);
    }

    #[test]
    fn centroid_found() {
        let m = build_unit_square(4).unwrap();
        for t in 0..m.num_triangles() {
            let [a, b, c] = m.corners(t);
            let x = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
            let loc = m.locate_point(x).unwrap();
            assert_eq!(loc.triangle, t);
            for l in loc.bary {
                assert!((l - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shared_vertex_goes_to_lowest_index() {
        let m = build_unit_square(2).unwrap();
        let loc = m.locate_point([0.5, 0.5]).unwrap();
        assert_eq!(loc.triangle, 0);
        let loc = m.locate_point([1.0, 1.0]).unwrap();
        assert_eq!(loc.triangle, 6);
    }

    #[test]
    fn outside_points_rejected() {
        let m = build_unit_square(3).unwrap();
        assert!(matches!(m.locate_point([1.1, 0.5]), Err(Error::OutOfDomain { .. })));
        assert!(matches!(m.locate_point([0.5, -1e-9]), Err(Error::OutOfDomain { .. })));
        assert!(m.locate_point([f64::NAN, 0.5]).is_err());
        assert!(m.locate_point([1.0 + 1e-13, 0.0]).is_ok());
    }

    #[test]
    fn csv_export_shapes() {
        let m = build_unit_square(2).unwrap();
        let mut v = Vec::new();
        let mut t = Vec::new();
        m.write_vertices_csv(&mut v).unwrap();
        m.write_triangles_csv(&mut t).unwrap();
        assert_eq!(String::from_utf8(v).unwrap().lines().count(), 10);
        assert_eq!(String::from_utf8(t).unwrap().lines().count(), 9);
    }
}
