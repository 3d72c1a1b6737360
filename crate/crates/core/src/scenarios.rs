//! Worked swimmers with closed-form answers.
//!
//! Triangles point their apex toward `+x` with the base at `x < 0`. A loop
//! with positive area in the `(height, base)` control plane then moves a
//! triangle on a sphere apex-first. Swapping the control order or the
//! orientation flips the sign.

use crate::body::{Body, Particle};
use crate::deformation::{gauge_fixed_linear_deformation, linear_deformation, project_gauge};
use crate::error::{Result, SwimError};
use crate::field::VectorField;
use crate::geometry::Surface;
use crate::holonomy::holonomy_general;

/// Isosceles triangle: two base masses `m` and an apex of mass `M − 2m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleSpec {
    pub total_mass: f64,
    pub base_mass: f64,
    pub height: f64,
    pub base: f64,
}

impl TriangleSpec {
    pub fn new(total_mass: f64, base_mass: f64, height: f64, base: f64) -> Result<Self> {
        let t = Self {
            total_mass,
            base_mass,
            height,
            base,
        };
        t.validate()?;
        Ok(t)
    }

    /// Unit triangle at the optimal mass split.
    pub fn unit() -> Self {
        Self {
            total_mass: 1.0,
            base_mass: 0.25,
            height: 1.0,
            base: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.total_mass.is_finite()
            && self.base_mass > 0.0
            && 2.0 * self.base_mass < self.total_mass
            && self.height > 0.0
            && self.height.is_finite()
            && self.base > 0.0
            && self.base.is_finite();
        if ok {
            Ok(())
        } else {
            Err(SwimError::InvalidBody(format!(
                "triangle needs 0 < 2m < M and h, b > 0, got {self:?}"
            )))
        }
    }

    pub fn apex_mass(&self) -> f64 {
        self.total_mass - 2.0 * self.base_mass
    }

    /// Chart abscissa of the base, chosen so that `Q^x = 0`.
    pub fn base_x(&self) -> f64 {
        -self.apex_mass() * self.height / self.total_mass
    }
}

pub fn triangle_body(t: &TriangleSpec) -> Result<Body> {
    t.validate()?;
    let xb = t.base_x();
    let half = 0.5 * t.base;
    Body::new(vec![
        Particle::new(t.base_mass, xb, half),
        Particle::new(t.base_mass, xb, -half),
        Particle::new(t.apex_mass(), xb + t.height, 0.0),
    ])
}

/// Unprojected controls `(x∂x, y∂y)`: stretching the height, then the base.
pub fn triangle_controls() -> [VectorField; 2] {
    [
        linear_deformation(1, 1).expect("valid indices"),
        linear_deformation(2, 2).expect("valid indices"),
    ]
}

/// Triangle controls made orthogonal to the Killing fields of `surface`.
pub fn triangle_fields(t: &TriangleSpec, surface: &Surface) -> Result<[VectorField; 2]> {
    let body = triangle_body(t)?;
    let ks = surface.killing_fields();
    let [h, b] = triangle_controls();
    Ok([
        project_gauge(&body, surface, &h, &ks)?,
        project_gauge(&body, surface, &b, &ks)?,
    ])
}

/// `δx / (R dA) = 4 m (M − 2m) h b² / M²`.
pub fn triangle_swim_coefficient(t: &TriangleSpec) -> f64 {
    let m = t.base_mass;
    let mm = t.total_mass;
    4.0 * m * (mm - 2.0 * m) * t.height * t.base * t.base / (mm * mm)
}

/// Base mass maximizing the swim coefficient for total mass `M`.
pub fn triangle_optimal_mass(total_mass: f64) -> Result<f64> {
    if total_mass > 0.0 && total_mass.is_finite() {
        Ok(0.25 * total_mass)
    } else {
        Err(SwimError::InvalidBody(format!(
            "total mass must be positive, got {total_mass}"
        )))
    }
}

/// Base mass on an even grid of `points` values in `(0, M/2)` with the
/// largest coefficient.
pub fn triangle_grid_optimum(total_mass: f64, points: usize) -> f64 {
    let step = 0.5 * total_mass / (points + 1) as f64;
    (1..=points)
        .map(|i| i as f64 * step)
        .map(|m| {
            let t = TriangleSpec {
                total_mass,
                base_mass: m,
                height: 1.0,
                base: 1.0,
            };
            (m, triangle_swim_coefficient(&t))
        })
        .fold((0.0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
        .0
}

/// Distance swum by one rectangular stroke of relative amplitudes
/// `δh/h` then `δb/b`.
pub fn rectangle_stroke_distance(t: &TriangleSpec, r: f64, delta_b: f64, delta_h: f64) -> f64 {
    r * triangle_swim_coefficient(t) * (delta_b / t.base) * (delta_h / t.height)
}

/// A ring of circumference `ℓ` splitting into two pieces. Piece 1 moves in
/// the `+` direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingSpec {
    pub circumference: f64,
    pub m1: f64,
    pub m2: f64,
}

impl RingSpec {
    pub fn new(circumference: f64, m1: f64, m2: f64) -> Result<Self> {
        let ok = circumference > 0.0
            && circumference.is_finite()
            && m1 > 0.0
            && m1.is_finite()
            && m2 > 0.0
            && m2.is_finite();
        if !ok {
            return Err(SwimError::InvalidBody(format!(
                "ring needs positive circumference and masses, got ℓ={circumference}, m1={m1}, m2={m2}"
            )));
        }
        Ok(Self {
            circumference,
            m1,
            m2,
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            m1: self.m2,
            m2: self.m1,
            ..*self
        }
    }
}

/// Where the pieces meet again, in `[0, ℓ)`.
pub fn ring_displacement(ring: &RingSpec) -> f64 {
    let l = ring.circumference;
    (l * ring.m2 / (ring.m1 + ring.m2)).rem_euclid(l)
}

/// Pair of linear deformations `((j, k), (j', k'))`, indices from 1.
pub type LinearPair = ((usize, usize), (usize, usize));

pub const LINEAR_PAIRS: [LinearPair; 3] = [((1, 1), (1, 2)), ((1, 1), (2, 2)), ((1, 2), (2, 2))];

#[derive(Clone, Debug, PartialEq)]
pub struct PairOutcome {
    pub pair: LinearPair,
    pub translation: [f64; 2],
    pub rotation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaronCatReport {
    pub outcomes: Vec<PairOutcome>,
    /// Largest translation component over all pairs.
    pub max_translation: f64,
}

impl BaronCatReport {
    /// Pairs whose rotation exceeds `threshold`.
    pub fn rotating_pairs(&self, threshold: f64) -> Vec<LinearPair> {
        self.outcomes
            .iter()
            .filter(|o| o.rotation.abs() > threshold)
            .map(|o| o.pair)
            .collect()
    }
}

/// Flat-space holonomy of every pair of gauge-fixed linear deformations.
///
/// The body is first moved to balanced principal axes; rotations are
/// unaffected and translations vanish either way.
pub fn baron_cat_report(body: &Body) -> Result<BaronCatReport> {
    let flat = Surface::flat();
    let (normal, _) = body.normalized(&flat)?;
    let mut outcomes = Vec::with_capacity(LINEAR_PAIRS.len());
    let mut max_translation: f64 = 0.0;
    for pair in LINEAR_PAIRS {
        let u = gauge_fixed_linear_deformation(&normal, pair.0 .0, pair.0 .1)?;
        let v = gauge_fixed_linear_deformation(&normal, pair.1 .0, pair.1 .1)?;
        let h = holonomy_general(&normal, &flat, &u, &v, 1.0)?;
        let translation = h.translation();
        max_translation = max_translation.max(translation[0].abs()).max(translation[1].abs());
        outcomes.push(PairOutcome {
            pair,
            translation,
            rotation: h.rotation(),
        });
    }
    Ok(BaronCatReport {
        outcomes,
        max_translation,
    })
}
