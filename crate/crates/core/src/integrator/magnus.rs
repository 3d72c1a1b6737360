//! Fourth-order Magnus updates in the isometry group.

use crate::geometry::{Isometry, RigidAlgebra};

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6

/// Gauss–Legendre nodes on `[0, 1]`.
pub(crate) const GAUSS_NODES: [f64; 2] = [0.5 - GAUSS_OFFSET, 0.5 + GAUSS_OFFSET];

/// One step of `ġ = g A(t)` from the values `a1, a2` at the Gauss nodes.
pub(crate) fn right_gauss_step(r: f64, g: &Isometry, a1: &RigidAlgebra, a2: &RigidAlgebra, h: f64) -> Isometry {
    let mean = a1.plus(a2).scaled(0.5 * h);
    let correction = a1.bracket(a2, r).scaled(3f64.sqrt() / 12.0 * h * h);
    g.compose(&Isometry::exp_algebra(r, &mean.plus(&correction)))
}

/// One step of `ġ = A(t) g` from the values at the start, midpoint and end.
pub(crate) fn left_simpson_step(
    r: f64,
    g: &Isometry,
    a0: &RigidAlgebra,
    am: &RigidAlgebra,
    a1: &RigidAlgebra,
    h: f64,
) -> Isometry {
    let mean = a0.plus(&am.scaled(4.0)).plus(a1).scaled(h / 6.0);
    let correction = a0.bracket(a1, r).scaled(-h * h / 12.0);
    Isometry::exp_algebra(r, &mean.plus(&correction)).compose(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Surface;

    fn generator(t: f64) -> RigidAlgebra {
        RigidAlgebra::new([0.8 * (3.0 * t).cos(), 0.5 + t * t, 1.5 * (2.0 * t).sin() - 0.3])
    }

    fn exp_step(r: f64, x: &RigidAlgebra) -> Isometry {
        Isometry::exp_algebra(r, x)
    }

    /// Reference: many tiny exponential steps with midpoint sampling.
    fn reference(r: f64, right: bool) -> Isometry {
        let surface = Surface::new(r).unwrap();
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mut g = Isometry::identity(&surface);
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            let step = exp_step(r, &generator(t).scaled(h));
            g = if right { g.compose(&step) } else { step.compose(&g) };
        }
        g
    }

    fn magnus(r: f64, right: bool, n: usize) -> Isometry {
        let surface = Surface::new(r).unwrap();
        let h = 1.0 / n as f64;
        let mut g = Isometry::identity(&surface);
        for i in 0..n {
            let t = i as f64 * h;
            g = if right {
                let a1 = generator(t + GAUSS_NODES[0] * h);
                let a2 = generator(t + GAUSS_NODES[1] * h);
                right_gauss_step(r, &g, &a1, &a2, h)
            } else {
                left_simpson_step(
                    r,
                    &g,
                    &generator(t),
                    &generator(t + 0.5 * h),
                    &generator(t + h),
                    h,
                )
            };
        }
        g
    }

    #[test]
    fn both_schemes_are_fourth_order() {
        for &r in &[1.0, -0.7] {
            for right in [true, false] {
                let exact = reference(r, right);
                let e1 = magnus(r, right, 8).distance_to(&exact);
                let e2 = magnus(r, right, 16).distance_to(&exact);
                let order = (e1 / e2).log2();
                assert!(order > 3.7, "r={r} right={right} order={order} e1={e1:e}");
                assert!(e2 < 1e-5);
            }
        }
    }
}
