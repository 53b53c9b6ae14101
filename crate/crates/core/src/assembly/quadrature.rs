/// Quadrature on a triangle in barycentric coordinates. Weights sum to one
/// and are multiplied by the triangle area at the call site.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Quadrature on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Three edge midpoints, equal weights; exact for quadratics.
pub fn edge_midpoint_rule() -> TriangleRule {
    TriangleRule {
        points: vec![[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
        weights: vec![1.0 / 3.0; 3],
    }
}

/// Seven-point rule exact for polynomials of degree five.
pub fn seven_point_rule() -> TriangleRule {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let b1 = 1.0 - 2.0 * a1;
    let a2 = (6.0 + s15) / 21.0;
    let b2 = 1.0 - 2.0 * a2;
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    TriangleRule {
        points: vec![
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [a1, a1, b1],
            [a1, b1, a1],
            [b1, a1, a1],
            [a2, a2, b2],
            [a2, b2, a2],
            [b2, a2, a2],
        ],
        weights: vec![9.0 / 40.0, w1, w1, w1, w2, w2, w2],
    }
}

/// Three-point Gauss-Legendre rule; exact for degree five.
pub fn gauss3() -> LineRule {
    let p = (3.0f64 / 5.0).sqrt();
    LineRule { points: vec![-p, 0.0, p], weights: vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0] }
}
