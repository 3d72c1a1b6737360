//! Constant-curvature surfaces in a single stereographic chart.

mod curvature;
mod isometry;
mod surface;

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub use curvature::{translation_killing_approx, CurvatureTensor};
pub use isometry::{Isometry, RigidAlgebra};
pub use surface::{
    numeric_exterior_derivative, Christoffel, KillingIndex, KillingSet, Surface, CHART_MARGIN,
};

/// A point `z = x + iy` of the chart.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChartPoint {
    pub x: f64,
    pub y: f64,
}

impl ChartPoint {
    pub const ORIGIN: ChartPoint = ChartPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn coords(self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `self + t * v`.
    pub fn offset(self, v: TangentVector, t: f64) -> ChartPoint {
        ChartPoint::new(self.x + t * v.vx, self.y + t * v.vy)
    }
}

/// Components in the coordinate basis `(∂_x, ∂_y)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TangentVector {
    pub vx: f64,
    pub vy: f64,
}

impl TangentVector {
    pub fn new(vx: f64, vy: f64) -> Self {
        Self { vx, vy }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn components(self) -> [f64; 2] {
        [self.vx, self.vy]
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.vx, self.vy)
    }

    pub fn from_complex(w: Complex64) -> Self {
        Self::new(w.re, w.im)
    }

    /// Coordinate (not metric) length.
    pub fn coord_norm(self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn dot(self, other: TangentVector) -> f64 {
        self.vx * other.vx + self.vy * other.vy
    }

    /// `u^x v^y - u^y v^x`.
    pub fn wedge(self, other: TangentVector) -> f64 {
        self.vx * other.vy - self.vy * other.vx
    }
}

impl Add for TangentVector {
    type Output = TangentVector;
    fn add(self, rhs: TangentVector) -> TangentVector {
        TangentVector::new(self.vx + rhs.vx, self.vy + rhs.vy)
    }
}

impl Sub for TangentVector {
    type Output = TangentVector;
    fn sub(self, rhs: TangentVector) -> TangentVector {
        TangentVector::new(self.vx - rhs.vx, self.vy - rhs.vy)
    }
}

impl Neg for TangentVector {
    type Output = TangentVector;
    fn neg(self) -> TangentVector {
        TangentVector::new(-self.vx, -self.vy)
    }
}

impl Mul<f64> for TangentVector {
    type Output = TangentVector;
    fn mul(self, k: f64) -> TangentVector {
        TangentVector::new(self.vx * k, self.vy * k)
    }
}
