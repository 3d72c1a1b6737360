//! Benchmark fixtures shared by the criterion suites.

use curvswim::scenarios::{triangle_body, triangle_fields, TriangleSpec};
use curvswim::{Body, Surface, VectorField};

/// The unit triangle on the sphere of metric parameter `r`, with its
/// projected controls.
pub fn unit_triangle(r: f64) -> (Body, Surface, [VectorField; 2]) {
    let surface = Surface::new(r).expect("finite curvature");
    let t = TriangleSpec::unit();
    let body = triangle_body(&t).expect("valid triangle");
    let fields = triangle_fields(&t, &surface).expect("non-degenerate Gram matrix");
    (body, surface, fields)
}
