use crate::assembly::TriangleRule;
use crate::mesh::FluidMesh;
use crate::Point;

fn for_each_point(mesh: &FluidMesh, rule: &TriangleRule, mut f: impl FnMut(usize, [f64; 3], Point, f64)) {
    for t in 0..mesh.num_triangles() {
        let c = mesh.corners(t);
        let area = mesh.area(t);
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let x = [
                b[0] * c[0][0] + b[1] * c[1][0] + b[2] * c[2][0],
                b[0] * c[0][1] + b[1] * c[1][1] + b[2] * c[2][1],
            ];
            f(t, *b, x, area * w);
        }
    }
}

/// `‖u_h − u‖_{L²}` for an interleaved P1 vector field.
pub fn l2_error_vector(mesh: &FluidMesh, rule: &TriangleRule, uh: &[f64], exact: impl Fn(Point) -> [f64; 2]) -> f64 {
    let mut acc = 0.0;
    for_each_point(mesh, rule, |t, b, x, w| {
        let tri = mesh.triangles()[t];
        let e = exact(x);
        for c in 0..2 {
            let v: f64 = (0..3).map(|a| b[a] * uh[2 * tri[a] + c]).sum();
            acc += w * (v - e[c]).powi(2);
        }
    });
    acc.sqrt()
}

/// `‖p_h − p‖_{L²}` for a P1 scalar field.
pub fn l2_error_scalar(mesh: &FluidMesh, rule: &TriangleRule, ph: &[f64], exact: impl Fn(Point) -> f64) -> f64 {
    let mut acc = 0.0;
    for_each_point(mesh, rule, |t, b, x, w| {
        let tri = mesh.triangles()[t];
        let v: f64 = (0..3).map(|a| b[a] * ph[tri[a]]).sum();
        acc += w * (v - exact(x)).powi(2);
    });
    acc.sqrt()
}

/// `|u_h − u|_{H¹}` for an interleaved P1 vector field; `grad` returns
/// `[[∂x u_x, ∂y u_x], [∂x u_y, ∂y u_y]]`.
pub fn h1_seminorm_error(
    mesh: &FluidMesh,
    rule: &TriangleRule,
    uh: &[f64],
    grad: impl Fn(Point) -> [[f64; 2]; 2],
) -> f64 {
    let mut acc = 0.0;
    for_each_point(mesh, rule, |t, _, x, w| {
        let tri = mesh.triangles()[t];
        let g = crate::assembly::p1_gradients_of(mesh, t);
        let e = grad(x);
        for c in 0..2 {
            for k in 0..2 {
                let v: f64 = (0..3).map(|a| g[a][k] * uh[2 * tri[a] + c]).sum();
                acc += w * (v - e[c][k]).powi(2);
            }
        }
    });
    acc.sqrt()
}
