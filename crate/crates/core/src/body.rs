//! Point-mass bodies and their moments.

use log::warn;

use crate::error::{Result, SwimError};
use crate::field::VectorField;
use crate::geometry::{ChartPoint, Isometry, KillingIndex, Surface};

/// Newton steps allowed when moving the center of mass to the origin.
pub const BALANCE_MAX_ITERATIONS: usize = 50;

/// `|R| L²` above which balancing logs a warning.
pub const SMALL_BODY_THRESHOLD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub mass: f64,
    pub position: ChartPoint,
}

impl Particle {
    pub fn new(mass: f64, x: f64, y: f64) -> Self {
        Self {
            mass,
            position: ChartPoint::new(x, y),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Body {
    particles: Vec<Particle>,
}

impl Body {
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(SwimError::InvalidBody("a body needs at least one particle".into()));
        }
        for (n, p) in particles.iter().enumerate() {
            if !(p.mass > 0.0 && p.mass.is_finite()) {
                return Err(SwimError::InvalidBody(format!(
                    "particle {n} has non-positive or non-finite mass {}",
                    p.mass
                )));
            }
            if !p.position.is_finite() {
                return Err(SwimError::InvalidBody(format!(
                    "particle {n} has a non-finite position"
                )));
            }
        }
        Ok(Self { particles })
    }

    /// From `[mass, x, y]` triples.
    pub fn from_triples(triples: &[[f64; 3]]) -> Result<Self> {
        Self::new(
            triples
                .iter()
                .map(|t| Particle::new(t[0], t[1], t[2]))
                .collect(),
        )
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn positions(&self) -> Vec<ChartPoint> {
        self.particles.iter().map(|p| p.position).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.mass).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.mass).sum()
    }

    /// Largest chart radius of a particle.
    pub fn extent(&self) -> f64 {
        self.particles
            .iter()
            .map(|p| p.position.norm())
            .fold(0.0, f64::max)
    }

    pub fn check_in(&self, surface: &Surface) -> Result<()> {
        self.particles
            .iter()
            .try_for_each(|p| surface.check(p.position))
    }

    /// Same masses at new positions.
    pub fn with_positions(&self, positions: &[ChartPoint]) -> Result<Body> {
        if positions.len() != self.len() {
            return Err(SwimError::InvalidBody(format!(
                "expected {} positions, got {}",
                self.len(),
                positions.len()
            )));
        }
        Body::new(
            self.particles
                .iter()
                .zip(positions)
                .map(|(p, &x)| Particle {
                    mass: p.mass,
                    position: x,
                })
                .collect(),
        )
    }

    /// Positions multiplied by `factor` in the chart.
    pub fn scaled(&self, factor: f64) -> Result<Body> {
        let moved: Vec<_> = self
            .particles
            .iter()
            .map(|p| ChartPoint::new(p.position.x * factor, p.position.y * factor))
            .collect();
        self.with_positions(&moved)
    }

    pub fn transformed(&self, g: &Isometry) -> Result<Body> {
        let moved: Vec<_> = self.particles.iter().map(|p| g.apply(p.position)).collect();
        self.with_positions(&moved)
    }

    pub fn union(&self, other: &Body) -> Body {
        let mut particles = self.particles.clone();
        particles.extend_from_slice(&other.particles);
        Body { particles }
    }

    pub fn moments(&self) -> Moments {
        let mut m = Moments::default();
        for p in &self.particles {
            let x = p.position.coords();
            m.mass += p.mass;
            for j in 0..2 {
                m.first[j] += p.mass * x[j];
                for k in 0..2 {
                    m.second[j][k] += p.mass * x[j] * x[k];
                    for l in 0..2 {
                        m.third[j][k][l] += p.mass * x[j] * x[k] * x[l];
                    }
                }
            }
        }
        m
    }

    /// `(1/M) Σ m_n g(u, v)` at the particles.
    pub fn scalar_product(&self, surface: &Surface, u: &VectorField, v: &VectorField) -> f64 {
        let total: f64 = self
            .particles
            .iter()
            .map(|p| p.mass * surface.inner(p.position, u.value(p.position), v.value(p.position)))
            .sum();
        total / self.total_mass()
    }

    /// First moment over total mass, i.e. the chart center of mass.
    pub fn center_of_mass(&self) -> ChartPoint {
        let m = self.moments();
        ChartPoint::new(m.first[0] / m.mass, m.first[1] / m.mass)
    }

    /// `|Q^j| / M` relative to the body extent.
    pub fn balance_defect(&self) -> f64 {
        self.center_of_mass().norm() / self.extent().max(f64::MIN_POSITIVE)
    }

    /// Moves the body by an isometry so that its chart first moments vanish.
    ///
    /// Newton iteration on the translation coefficients `(τ₁, τ₂)`; the
    /// Jacobian of the center of mass is the mass-weighted mean of `ξ₁, ξ₂`.
    pub fn balance(&self, surface: &Surface) -> Result<(Body, Isometry)> {
        self.check_in(surface)?;
        let r = surface.metric_parameter();
        let extent = self.extent();
        if r.abs() * extent * extent > SMALL_BODY_THRESHOLD {
            warn!(
                "balancing a body with |R| L^2 = {:.3e}; chart center of mass is only approximate",
                r.abs() * extent * extent
            );
        }
        let xi1 = surface.killing_field(KillingIndex::TranslationX);
        let xi2 = surface.killing_field(KillingIndex::TranslationY);
        let mass = self.total_mass();
        let scale = extent.max(1e-300);
        let mut body = self.clone();
        let mut g = Isometry::identity(surface);
        for _ in 0..BALANCE_MAX_ITERATIONS {
            let c = body.center_of_mass();
            if c.norm() <= 1e-15 * scale {
                return Ok((body, g));
            }
            let mut jac = [[0.0; 2]; 2];
            for p in &body.particles {
                let a = xi1.value(p.position);
                let b = xi2.value(p.position);
                jac[0][0] += p.mass * a.vx / mass;
                jac[1][0] += p.mass * a.vy / mass;
                jac[0][1] += p.mass * b.vx / mass;
                jac[1][1] += p.mass * b.vy / mass;
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let t1 = -(jac[1][1] * c.x - jac[0][1] * c.y) / det;
            let t2 = -(-jac[1][0] * c.x + jac[0][0] * c.y) / det;
            let step = Isometry::exp_rigid(surface, [t1, t2, 0.0]);
            let moved = body.transformed(&step)?;
            moved.check_in(surface)?;
            let improved = moved.center_of_mass().norm();
            if improved >= c.norm() {
                // Round-off floor reached.
                if c.norm() <= 1e-12 * scale {
                    return Ok((body, g));
                }
                return Err(SwimError::BalanceDidNotConverge {
                    iterations: BALANCE_MAX_ITERATIONS,
                    residual: c.norm(),
                });
            }
            body = moved;
            g = step.compose(&g);
        }
        let residual = body.center_of_mass().norm();
        if residual <= 1e-12 * scale {
            Ok((body, g))
        } else {
            Err(SwimError::BalanceDidNotConverge {
                iterations: BALANCE_MAX_ITERATIONS,
                residual,
            })
        }
    }

    /// Rotates about the origin so that `Q^{xy} = 0` and `Q^{xx} ≥ Q^{yy}`.
    ///
    /// A body that is already diagonal is returned unchanged, as is one with
    /// isotropic second moments.
    pub fn principal_axes(&self, surface: &Surface) -> Result<(Body, Isometry)> {
        let q = self.moments().second;
        let trace = q[0][0] + q[1][1];
        let identity = Isometry::identity(surface);
        if q[0][1].abs() <= 1e-15 * trace {
            return Ok((self.clone(), identity));
        }
        let angle = -0.5 * (2.0 * q[0][1]).atan2(q[0][0] - q[1][1]);
        let g = Isometry::rotation(surface, angle);
        Ok((self.transformed(&g)?, g))
    }

    /// `balance` followed by `principal_axes`.
    pub fn normalized(&self, surface: &Surface) -> Result<(Body, Isometry)> {
        let (balanced, g1) = self.balance(surface)?;
        let (principal, g2) = balanced.principal_axes(surface)?;
        Ok((principal, g2.compose(&g1)))
    }
}

/// Chart moments `Q^{j…k} = Σ m x^j … x^k` up to order three.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Moments {
    pub mass: f64,
    pub first: [f64; 2],
    pub second: [[f64; 2]; 2],
    pub third: [[[f64; 2]; 2]; 2],
}

impl Moments {
    pub fn add(&self, other: &Moments) -> Moments {
        let mut out = self.clone();
        out.mass += other.mass;
        for j in 0..2 {
            out.first[j] += other.first[j];
            for k in 0..2 {
                out.second[j][k] += other.second[j][k];
                for l in 0..2 {
                    out.third[j][k][l] += other.third[j][k][l];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn three_masses() -> Body {
        Body::from_triples(&[[1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [1.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn rejects_bad_bodies() {
        assert!(Body::new(vec![]).is_err());
        assert!(Body::from_triples(&[[0.0, 0.0, 0.0]]).is_err());
        assert!(Body::from_triples(&[[1.0, f64::NAN, 0.0]]).is_err());
        let hyp = Surface::new(-1.0).unwrap();
        let outside = Body::from_triples(&[[1.0, 1.5, 0.0]]).unwrap();
        assert!(outside.check_in(&hyp).is_err());
    }

    #[test]
    fn scalar_product_by_direct_summation() {
        let flat = Surface::flat();
        let body = three_masses();
        let ks = flat.killing_fields();
        let xi1 = ks.get(KillingIndex::TranslationX);
        let xi3 = ks.get(KillingIndex::Rotation);
        assert_eq!(body.scalar_product(&flat, xi1, xi1), 1.0);
        // ξ₃ = (−y, x): its x-component is −y, so ⟨ξ₁|ξ₃⟩ = −Q^y / M.
        let expected = -(0.0 + 0.0 + 1.0) / 3.0;
        assert_relative_eq!(body.scalar_product(&flat, xi1, xi3), expected, epsilon = 1e-16);
        let balanced = Body::from_triples(&[[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]]).unwrap();
        assert_eq!(balanced.scalar_product(&flat, xi1, xi3), 0.0);
        let ex = VectorField::linear_map([[1.0, 0.0], [0.0, 0.0]]);
        let ey = VectorField::linear_map([[0.0, 0.0], [0.0, 1.0]]);
        assert_eq!(body.scalar_product(&flat, &ex, &ey), 0.0);
    }

    #[test]
    fn scalar_product_uses_exact_metric() {
        let s = Surface::new(1.0).unwrap();
        let body = Body::from_triples(&[[2.0, 1.0, 0.0]]).unwrap();
        let xi1 = s.killing_field(KillingIndex::TranslationX);
        // ξ₁(1,0) = (2,0), λ² = 1/4.
        assert_relative_eq!(body.scalar_product(&s, &xi1, &xi1), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn moments_examples() {
        let single = Body::from_triples(&[[1.0, 0.0, 0.0]]).unwrap().moments();
        assert_eq!(single.mass, 1.0);
        assert_eq!(single.first, [0.0; 2]);
        assert_eq!(single.second, [[0.0; 2]; 2]);
        let a = 0.7;
        let cross = Body::from_triples(&[
            [1.0, a, 0.0],
            [1.0, -a, 0.0],
            [1.0, 0.0, a],
            [1.0, 0.0, -a],
        ])
        .unwrap()
        .moments();
        assert!(cross.third.iter().flatten().flatten().all(|&q| q == 0.0));

        let (mass, m, h, b) = (1.0, 0.2, 0.8, 0.6);
        let xb = -(mass - 2.0 * m) * h / mass;
        let tri = Body::from_triples(&[
            [m, xb, b / 2.0],
            [m, xb, -b / 2.0],
            [mass - 2.0 * m, xb + h, 0.0],
        ])
        .unwrap()
        .moments();
        assert!(tri.first[0].abs() < 1e-16);
        let expected = -m * (mass - 2.0 * m) * h * b * b / (2.0 * mass);
        assert_relative_eq!(tri.third[0][1][1], expected, epsilon = 1e-16);
        assert_relative_eq!(tri.third[0][1][1], m * xb * b * b / 2.0, epsilon = 1e-16);
    }

    #[test]
    fn balance_examples() {
        let flat = Surface::flat();
        let two = Body::from_triples(&[[1.0, 0.0, 0.0], [1.0, 0.2, 0.0]]).unwrap();
        let (b, _) = two.balance(&flat).unwrap();
        assert_relative_eq!(b.particles()[0].position.x, -0.1, epsilon = 1e-15);
        assert_relative_eq!(b.particles()[1].position.x, 0.1, epsilon = 1e-15);

        let sphere = Surface::new(1.0).unwrap();
        let (b, g) = two.balance(&sphere).unwrap();
        assert!(b.moments().first.iter().all(|q| q.abs() < 1e-12));
        let d_before = sphere
            .geodesic_distance(two.particles()[0].position, two.particles()[1].position)
            .unwrap();
        let d_after = sphere
            .geodesic_distance(b.particles()[0].position, b.particles()[1].position)
            .unwrap();
        assert_relative_eq!(d_before, d_after, max_relative = 1e-12);
        let moved = g.apply(two.particles()[1].position);
        assert!((moved.x - b.particles()[1].position.x).abs() < 1e-15);

        let (again, _) = b.balance(&sphere).unwrap();
        for (p, q) in b.particles().iter().zip(again.particles()) {
            assert!((p.position.x - q.position.x).abs() < 1e-12);
        }
    }

    #[test]
    fn principal_axes_examples() {
        let flat = Surface::flat();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diag = Body::from_triples(&[[1.0, s, s], [1.0, -s, -s]]).unwrap();
        let (b, _) = diag.principal_axes(&flat).unwrap();
        assert_relative_eq!(b.particles()[0].position.x.abs(), 1.0, epsilon = 1e-15);
        assert!(b.particles()[0].position.y.abs() < 1e-15);

        let symmetric = Body::from_triples(&[[1.0, 0.5, 0.2], [1.0, 0.5, -0.2], [1.0, -1.0, 0.0]])
            .unwrap();
        let (b, _) = symmetric.principal_axes(&flat).unwrap();
        assert_eq!(b, symmetric);
    }

    fn arb_body() -> impl Strategy<Value = Body> {
        prop::collection::vec((0.1f64..2.0, -0.4f64..0.4, -0.4f64..0.4), 3..7).prop_map(|v| {
            Body::new(v.into_iter().map(|(m, x, y)| Particle::new(m, x, y)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalization_zeroes_first_and_cross_moments(body in arb_body(), r in -1.0f64..1.0) {
            let s = Surface::new(r).unwrap();
            let (b, _) = body.normalized(&s).unwrap();
            let q = b.moments();
            let tol = 1e-12 * b.extent().max(1.0);
            prop_assert!(q.first[0].abs() < tol && q.first[1].abs() < tol);
            prop_assert!(q.second[0][1].abs() < 1e-12 * (q.second[0][0] + q.second[1][1]));
            prop_assert!(q.second[0][0] >= q.second[1][1]);
        }

        #[test]
        fn moments_are_additive(a in arb_body(), b in arb_body()) {
            let sum = a.moments().add(&b.moments());
            let joint = a.union(&b).moments();
            prop_assert!((sum.mass - joint.mass).abs() < 1e-14);
            for j in 0..2 {
                for k in 0..2 {
                    prop_assert!((sum.second[j][k] - joint.second[j][k]).abs() < 1e-14);
                    for l in 0..2 {
                        prop_assert!((sum.third[j][k][l] - joint.third[j][k][l]).abs() < 1e-14);
                    }
                }
            }
        }

        #[test]
        fn scalar_product_is_symmetric_and_nonnegative(body in arb_body(), r in -1.0f64..1.0,
                                                     c in prop::array::uniform4(-2.0f64..2.0)) {
            let s = Surface::new(r).unwrap();
            let u = VectorField::linear_map([[c[0], c[1]], [c[2], c[3]]]);
            let v = s.killing_field(KillingIndex::TranslationY);
            let uv = body.scalar_product(&s, &u, &v);
            let vu = body.scalar_product(&s, &v, &u);
            prop_assert!((uv - vu).abs() < 1e-15);
            prop_assert!(body.scalar_product(&s, &u, &u) >= 0.0);
        }
    }
}
