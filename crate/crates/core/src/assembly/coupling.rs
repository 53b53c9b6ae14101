use super::quadrature::gauss3;
use crate::linalg::SparseMatrix;
use crate::mesh::{cut_segment, FluidMesh, SolidMesh};
use crate::{Error, Point, Result};

/// Assemble `L_f`, the multiplier-by-fluid coupling at the configuration
/// where node `k` of the solid sits at `positions[k]`.
///
/// Row `2*j + c` pairs solid basis function `j` (component `c`) with the
/// fluid velocity basis functions of the same component traced on the
/// deformed curve:
/// `(L_f)_{2j+c, 2v+c} = ∫_Σ ζ_j(s) ψ_v(φ(s)) ds`.
///
/// Each deformed segment is cut by the fluid triangulation and every piece is
/// integrated with three-point Gauss in reference arclength. Contributions are
/// summed in an order keyed by segment endpoints, so listing the segments in
/// a different order reproduces the matrix bit for bit.
pub fn assemble_coupling(fluid: &FluidMesh, solid: &SolidMesh, positions: &[Point]) -> Result<SparseMatrix> {
    if positions.len() != solid.num_nodes() {
        return Err(Error::InvalidArgument(format!(
            "{} positions for {} solid nodes",
            positions.len(),
            solid.num_nodes()
        )));
    }
    let rule = gauss3();
    // (row, col, segment key, sequence, value)
    type Entry = (usize, usize, (usize, usize), usize, f64);
    let mut entries: Vec<Entry> = Vec::new();
    for (seg, &l_ref) in solid.segments().iter().zip(solid.lengths()) {
        let (a, b) = (seg[0], seg[1]);
        let key = (a.min(b), a.max(b));
        let (pa, pb) = (positions[a], positions[b]);
        let cut = cut_segment(fluid, pa, pb)?;
        let mut seq = 0;
        for (s0, s1, tri) in cut.fractions() {
            let half = 0.5 * (s1 - s0);
            let verts = fluid.triangles()[tri];
            for (xi, w) in rule.points.iter().zip(&rule.weights) {
                let s = s0 + half * (1.0 + xi);
                let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                let bary = fluid.barycentric(tri, x);
                let weight = w * half * l_ref;
                for (node, zeta) in [(a, 1.0 - s), (b, s)] {
                    for (v, lam) in verts.iter().zip(bary) {
                        for c in 0..2 {
                            entries.push((2 * node + c, 2 * v + c, key, seq, weight * zeta * lam));
                            seq += 1;
                        }
                    }
                }
            }
        }
    }
    entries.sort_by_key(|e| (e.0, e.1, e.2, e.3));
    let triplets: Vec<(usize, usize, f64)> = entries.into_iter().map(|e| (e.0, e.1, e.4)).collect();
    Ok(SparseMatrix::from_triplets(2 * solid.num_nodes(), 2 * fluid.num_vertices(), &triplets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_ellipse, build_unit_square};

    #[test]
    fn partition_of_unity_per_component() {
        let f = build_unit_square(7).unwrap();
        let s = build_ellipse([0.47, 0.52], 0.23, 0.17, 20).unwrap();
        let l = assemble_coupling(&f, &s, s.nodes()).unwrap();
        let ex: Vec<f64> = (0..2 * f.num_vertices()).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let lx = l.mul_vec(&ex);
        for k in 0..s.num_nodes() {
            let seg_len: f64 = s
                .segments()
                .iter()
                .zip(s.lengths())
                .filter(|(sg, _)| sg.contains(&k))
                .map(|(_, &len)| 0.5 * len)
                .sum();
            assert!((lx[2 * k] - seg_len).abs() < 1e-14);
            assert!(lx[2 * k + 1].abs() < 1e-15);
        }
    }

    #[test]
    fn wrong_position_count() {
        let f = build_unit_square(4).unwrap();
        let s = build_ellipse([0.5, 0.5], 0.2, 0.2, 8).unwrap();
        assert!(assemble_coupling(&f, &s, &s.nodes()[..4]).is_err());
    }
}
