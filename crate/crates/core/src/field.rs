//! Vector fields on the chart.
//!
//! Every field the library builds in closed form (Killing fields, linear
//! deformations, gauge-fixed deformations and their projections, approximate
//! translation fields) is a polynomial of degree at most two in the chart
//! coordinates, so it is stored as a [`QuadraticField`] with an exact Jacobian.
//! User-supplied fields are opaque closures and fall back to central
//! differences when no Jacobian is given.

use std::fmt;
use std::sync::Arc;

use crate::geometry::{ChartPoint, KillingIndex, TangentVector};

/// `jac[l][i] = ∂_i v^l`.
pub type Jacobian = [[f64; 2]; 2];

/// `v^l(x) = c^l + a[l][i] x^i + b[l][i][j] x^i x^j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadraticField {
    pub constant: [f64; 2],
    pub linear: [[f64; 2]; 2],
    pub quadratic: [[[f64; 2]; 2]; 2],
}

impl QuadraticField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_linear(matrix: [[f64; 2]; 2]) -> Self {
        Self {
            linear: matrix,
            ..Self::default()
        }
    }

    pub fn value(&self, p: ChartPoint) -> TangentVector {
        let x = [p.x, p.y];
        let mut v = self.constant;
        for (l, vl) in v.iter_mut().enumerate() {
            for i in 0..2 {
                *vl += self.linear[l][i] * x[i];
                for j in 0..2 {
                    *vl += self.quadratic[l][i][j] * x[i] * x[j];
                }
            }
        }
        TangentVector::new(v[0], v[1])
    }

    pub fn jacobian(&self, p: ChartPoint) -> Jacobian {
        let x = [p.x, p.y];
        let mut jac = self.linear;
        for (l, row) in jac.iter_mut().enumerate() {
            for (i, entry) in row.iter_mut().enumerate() {
                for (j, xj) in x.iter().enumerate() {
                    *entry += (self.quadratic[l][i][j] + self.quadratic[l][j][i]) * xj;
                }
            }
        }
        jac
    }

    /// `self + k * other`, coefficient-wise.
    pub fn plus_scaled(&self, k: f64, other: &QuadraticField) -> QuadraticField {
        let mut out = self.clone();
        for l in 0..2 {
            out.constant[l] += k * other.constant[l];
            for i in 0..2 {
                out.linear[l][i] += k * other.linear[l][i];
                for j in 0..2 {
                    out.quadratic[l][i][j] += k * other.quadratic[l][i][j];
                }
            }
        }
        out
    }
}

/// Symbolic descriptor carried alongside a field.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldTag {
    Killing(KillingIndex),
    KillingCombination,
    /// `2 η_(jk) = x^j ∂_k + x^k ∂_j`, indices 1-based.
    Linear(usize, usize),
    GaugeFixedLinear(usize, usize),
    /// Coordinate-scaling field `c_xx x∂_x + c_xy y∂_x + c_yx x∂_y + c_yy y∂_y`.
    LinearMap,
    GaugeProjected(Box<FieldTag>),
    ApproxTranslation(usize),
    Combination,
    Custom(String),
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Killing(k) => write!(f, "killing-{}", k.number()),
            FieldTag::KillingCombination => write!(f, "killing-combination"),
            FieldTag::Linear(j, k) => write!(f, "linear-({j}{k})"),
            FieldTag::GaugeFixedLinear(j, k) => write!(f, "gauge-linear-({j}{k})"),
            FieldTag::LinearMap => write!(f, "linear-map"),
            FieldTag::GaugeProjected(inner) => write!(f, "projected[{inner}]"),
            FieldTag::ApproxTranslation(k) => write!(f, "approx-translation-{k}"),
            FieldTag::Combination => write!(f, "combination"),
            FieldTag::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

type ValueFn = Arc<dyn Fn(ChartPoint) -> TangentVector + Send + Sync>;
type JacobianFn = Arc<dyn Fn(ChartPoint) -> Jacobian + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Quadratic(QuadraticField),
    Custom {
        value: ValueFn,
        jacobian: Option<JacobianFn>,
    },
    Sum(Vec<(f64, VectorField)>),
}

/// A tangent vector field on the chart.
#[derive(Clone)]
pub struct VectorField {
    repr: Repr,
    tag: FieldTag,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Quadratic(q) => f
                .debug_struct("VectorField")
                .field("tag", &self.tag)
                .field("coefficients", q)
                .finish(),
            Repr::Custom { jacobian, .. } => f
                .debug_struct("VectorField")
                .field("tag", &self.tag)
                .field("closed_form_jacobian", &jacobian.is_some())
                .finish(),
            Repr::Sum(terms) => f
                .debug_struct("VectorField")
                .field("tag", &self.tag)
                .field("terms", &terms.len())
                .finish(),
        }
    }
}

impl VectorField {
    pub fn quadratic(coefficients: QuadraticField, tag: FieldTag) -> Self {
        Self {
            repr: Repr::Quadratic(coefficients),
            tag,
        }
    }

    /// The field `v = A x` for a 2×2 matrix `A` (`v^l = A[l][i] x^i`).
    pub fn linear_map(matrix: [[f64; 2]; 2]) -> Self {
        Self::quadratic(QuadraticField::from_linear(matrix), FieldTag::LinearMap)
    }

    pub fn custom<F>(name: impl Into<String>, value: F) -> Self
    where
        F: Fn(ChartPoint) -> TangentVector + Send + Sync + 'static,
    {
        Self {
            repr: Repr::Custom {
                value: Arc::new(value),
                jacobian: None,
            },
            tag: FieldTag::Custom(name.into()),
        }
    }

    /// Attaches a closed-form Jacobian to a custom field. No-op for other kinds.
    pub fn with_jacobian<F>(mut self, jacobian: F) -> Self
    where
        F: Fn(ChartPoint) -> Jacobian + Send + Sync + 'static,
    {
        if let Repr::Custom { jacobian: slot, .. } = &mut self.repr {
            *slot = Some(Arc::new(jacobian));
        }
        self
    }

    pub fn tag(&self) -> &FieldTag {
        &self.tag
    }

    pub fn retagged(mut self, tag: FieldTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn as_quadratic(&self) -> Option<&QuadraticField> {
        match &self.repr {
            Repr::Quadratic(q) => Some(q),
            _ => None,
        }
    }

    pub fn has_closed_form_jacobian(&self) -> bool {
        match &self.repr {
            Repr::Quadratic(_) => true,
            Repr::Custom { jacobian, .. } => jacobian.is_some(),
            Repr::Sum(terms) => terms.iter().all(|(_, f)| f.has_closed_form_jacobian()),
        }
    }

    pub fn value(&self, p: ChartPoint) -> TangentVector {
        match &self.repr {
            Repr::Quadratic(q) => q.value(p),
            Repr::Custom { value, .. } => value(p),
            Repr::Sum(terms) => terms
                .iter()
                .fold(TangentVector::zero(), |acc, (k, f)| acc + f.value(p) * *k),
        }
    }

    pub fn jacobian(&self, p: ChartPoint) -> Jacobian {
        match &self.repr {
            Repr::Quadratic(q) => q.jacobian(p),
            Repr::Custom {
                jacobian: Some(jac),
                ..
            } => jac(p),
            Repr::Custom { value, .. } => central_difference_jacobian(|q| value(q), p),
            Repr::Sum(terms) => {
                let mut out = [[0.0; 2]; 2];
                for (k, f) in terms {
                    let jac = f.jacobian(p);
                    for l in 0..2 {
                        for i in 0..2 {
                            out[l][i] += k * jac[l][i];
                        }
                    }
                }
                out
            }
        }
    }

    /// `self + k * other`. Stays polynomial when both operands are.
    pub fn plus_scaled(&self, k: f64, other: &VectorField) -> VectorField {
        match (&self.repr, &other.repr) {
            (Repr::Quadratic(a), Repr::Quadratic(b)) => {
                VectorField::quadratic(a.plus_scaled(k, b), FieldTag::Combination)
            }
            _ => VectorField {
                repr: Repr::Sum(vec![(1.0, self.clone()), (k, other.clone())]),
                tag: FieldTag::Combination,
            },
        }
    }

    pub fn scaled(&self, k: f64) -> VectorField {
        match &self.repr {
            Repr::Quadratic(q) => {
                VectorField::quadratic(QuadraticField::zero().plus_scaled(k, q), self.tag.clone())
            }
            _ => VectorField {
                repr: Repr::Sum(vec![(k, self.clone())]),
                tag: self.tag.clone(),
            },
        }
    }
}

/// Central-difference Jacobian with step `1e-5 * max(1, |z|)`.
pub fn central_difference_jacobian<F>(f: F, p: ChartPoint) -> Jacobian
where
    F: Fn(ChartPoint) -> TangentVector,
{
    let h = 1e-5 * p.norm().max(1.0);
    let dx_plus = f(ChartPoint::new(p.x + h, p.y));
    let dx_minus = f(ChartPoint::new(p.x - h, p.y));
    let dy_plus = f(ChartPoint::new(p.x, p.y + h));
    let dy_minus = f(ChartPoint::new(p.x, p.y - h));
    let inv = 0.5 / h;
    [
        [
            (dx_plus.vx - dx_minus.vx) * inv,
            (dy_plus.vx - dy_minus.vx) * inv,
        ],
        [
            (dx_plus.vy - dx_minus.vy) * inv,
            (dy_plus.vy - dy_minus.vy) * inv,
        ],
    ]
}
