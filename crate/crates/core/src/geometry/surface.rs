use num_complex::Complex64;

use super::{ChartPoint, CurvatureTensor, TangentVector};
use crate::error::{Result, SwimError};
use crate::field::{FieldTag, QuadraticField, VectorField};

/// Relative margin kept from the boundary circle of the hyperbolic chart.
pub const CHART_MARGIN: f64 = 1e-9;

/// `gamma[i][j][k] = Γ^i_{jk}`.
pub type Christoffel = [[[f64; 2]; 2]; 2];

/// Surface with metric `|dz|² / (1 + R|z|²)²`.
///
/// `R` is the metric parameter. The Gaussian curvature is `4R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Surface {
    r: f64,
}

impl Surface {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(SwimError::BadMetricParameter(r));
        }
        Ok(Self { r })
    }

    pub fn flat() -> Self {
        Self { r: 0.0 }
    }

    pub fn metric_parameter(&self) -> f64 {
        self.r
    }

    /// Upper bound on `|z|²`, if the chart is not the whole plane.
    pub fn chart_limit(&self) -> Option<f64> {
        (self.r < 0.0).then(|| (1.0 - CHART_MARGIN) / -self.r)
    }

    pub fn contains(&self, p: ChartPoint) -> bool {
        p.is_finite() && self.chart_limit().is_none_or(|limit| p.norm_sqr() < limit)
    }

    pub fn check(&self, p: ChartPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(SwimError::OutsideChart {
                x: p.x,
                y: p.y,
                limit: self.chart_limit().unwrap_or(f64::INFINITY),
            })
        }
    }

    fn denom(&self, p: ChartPoint) -> f64 {
        1.0 + self.r * p.norm_sqr()
    }

    /// `λ²` with `g_ij = λ² δ_ij`. Unchecked.
    pub fn conformal_factor_sq(&self, p: ChartPoint) -> f64 {
        let d = self.denom(p);
        1.0 / (d * d)
    }

    /// Gradient of `φ = ln λ`.
    fn log_factor_gradient(&self, p: ChartPoint) -> [f64; 2] {
        let d = self.denom(p);
        [-2.0 * self.r * p.x / d, -2.0 * self.r * p.y / d]
    }

    pub fn metric_at(&self, p: ChartPoint) -> Result<[[f64; 2]; 2]> {
        self.check(p)?;
        let l2 = self.conformal_factor_sq(p);
        Ok([[l2, 0.0], [0.0, l2]])
    }

    /// Metric inner product of two vectors at `p`. Unchecked.
    pub fn inner(&self, p: ChartPoint, u: TangentVector, v: TangentVector) -> f64 {
        self.conformal_factor_sq(p) * u.dot(v)
    }

    pub fn lower(&self, p: ChartPoint, v: TangentVector) -> [f64; 2] {
        let l2 = self.conformal_factor_sq(p);
        [l2 * v.vx, l2 * v.vy]
    }

    pub fn christoffel_at(&self, p: ChartPoint) -> Result<Christoffel> {
        self.check(p)?;
        Ok(self.christoffel_unchecked(p))
    }

    fn christoffel_unchecked(&self, p: ChartPoint) -> Christoffel {
        let dphi = self.log_factor_gradient(p);
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut gamma = [[[0.0; 2]; 2]; 2];
        for (i, gi) in gamma.iter_mut().enumerate() {
            for (j, gij) in gi.iter_mut().enumerate() {
                for (k, g) in gij.iter_mut().enumerate() {
                    *g = delta(i, j) * dphi[k] + delta(i, k) * dphi[j] - delta(j, k) * dphi[i];
                }
            }
        }
        gamma
    }

    /// `K = -e^{-2φ} Δφ` evaluated from the second derivatives of `φ`.
    pub fn gaussian_curvature_at(&self, p: ChartPoint) -> Result<f64> {
        self.check(p)?;
        let r = self.r;
        let d = self.denom(p);
        let phi_xx = -2.0 * r / d + 4.0 * r * r * p.x * p.x / (d * d);
        let phi_yy = -2.0 * r / d + 4.0 * r * r * p.y * p.y / (d * d);
        Ok(-(d * d) * (phi_xx + phi_yy))
    }

    pub fn gaussian_curvature(&self) -> f64 {
        self.gaussian_curvature_at(ChartPoint::ORIGIN)
            .expect("origin lies in every chart")
    }

    /// Riemann tensor in the orthonormal frame at the origin.
    pub fn curvature_tensor(&self) -> CurvatureTensor {
        CurvatureTensor::constant_curvature(2, self.gaussian_curvature())
    }

    pub fn geodesic_distance(&self, p: ChartPoint, q: ChartPoint) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        let z = p.to_complex();
        let w = q.to_complex();
        let chord = (z - w).norm();
        if self.r == 0.0 {
            return Ok(chord);
        }
        let s = self.r.abs().sqrt();
        let cross = (Complex64::new(1.0, 0.0) + self.r * z.conj() * w).norm();
        if self.r > 0.0 {
            Ok((s * chord).atan2(cross) / s)
        } else {
            Ok((s * chord / cross).atanh() / s)
        }
    }

    pub fn killing_field(&self, index: KillingIndex) -> VectorField {
        let r = self.r;
        let mut q = QuadraticField::zero();
        match index {
            KillingIndex::TranslationX => {
                q.constant = [1.0, 0.0];
                q.quadratic[0][0][0] = r;
                q.quadratic[0][1][1] = -r;
                q.quadratic[1][0][1] = 2.0 * r;
            }
            KillingIndex::TranslationY => {
                q.constant = [0.0, 1.0];
                q.quadratic[0][0][1] = 2.0 * r;
                q.quadratic[1][0][0] = -r;
                q.quadratic[1][1][1] = r;
            }
            KillingIndex::Rotation => {
                q.linear = [[0.0, -1.0], [1.0, 0.0]];
            }
        }
        VectorField::quadratic(q, FieldTag::Killing(index))
    }

    pub fn killing_fields(&self) -> KillingSet {
        KillingSet {
            fields: KillingIndex::ALL.map(|k| self.killing_field(k)),
        }
    }

    pub fn killing_one_form(&self, index: KillingIndex, p: ChartPoint) -> Result<[f64; 2]> {
        self.check(p)?;
        Ok(self.lower(p, self.killing_field(index).value(p)))
    }

    /// The translation one-form written as `½(w dz̄ + w̄ dz)`, `w = (1 + R z²)/(1 + R|z|²)²`.
    pub fn translation_one_form_complex(&self, p: ChartPoint) -> Result<[f64; 2]> {
        self.check(p)?;
        let z = p.to_complex();
        let d = self.denom(p);
        let w = (1.0 + self.r * z * z) / (d * d);
        Ok([w.re, w.im])
    }

    /// Coefficient of `dx∧dy` in `dξ`.
    pub fn killing_two_form(&self, index: KillingIndex, p: ChartPoint) -> Result<f64> {
        self.check(p)?;
        let r = self.r;
        let d = self.denom(p);
        let d3 = d * d * d;
        Ok(match index {
            KillingIndex::TranslationX => 8.0 * r * p.y / d3,
            KillingIndex::TranslationY => -8.0 * r * p.x / d3,
            KillingIndex::Rotation => (2.0 - 2.0 * r * p.norm_sqr()) / d3,
        })
    }

    /// `∇_j f_k` of the lowered field, `[j][k]`.
    pub fn covariant_derivative_lowered(
        &self,
        f: &VectorField,
        p: ChartPoint,
    ) -> Result<[[f64; 2]; 2]> {
        self.check(p)?;
        let l2 = self.conformal_factor_sq(p);
        let dphi = self.log_factor_gradient(p);
        let gamma = self.christoffel_unchecked(p);
        let v = f.value(p).components();
        let jac = f.jacobian(p);
        let mut out = [[0.0; 2]; 2];
        for (j, row) in out.iter_mut().enumerate() {
            for (k, entry) in row.iter_mut().enumerate() {
                let connection: f64 = (0..2).map(|h| gamma[h][j][k] * v[h]).sum();
                *entry = l2 * (2.0 * dphi[j] * v[k] + jac[k][j] - connection);
            }
        }
        Ok(out)
    }

    /// Max-norm of `∇_j f_k + ∇_k f_j`.
    pub fn killing_residual(&self, f: &VectorField, p: ChartPoint) -> Result<f64> {
        let nabla = self.covariant_derivative_lowered(f, p)?;
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                worst = worst.max((nabla[j][k] + nabla[k][j]).abs());
            }
        }
        Ok(worst)
    }
}

/// Central-difference `∂_x f_y − ∂_y f_x` of a one-form.
///
/// `h` defaults to `1e-5 * max(1, |z|)`.
pub fn numeric_exterior_derivative<F>(
    surface: &Surface,
    form: F,
    p: ChartPoint,
    h: Option<f64>,
) -> Result<f64>
where
    F: Fn(ChartPoint) -> [f64; 2],
{
    let h = h.unwrap_or_else(|| 1e-5 * p.norm().max(1.0));
    let stencil = [
        ChartPoint::new(p.x + h, p.y),
        ChartPoint::new(p.x - h, p.y),
        ChartPoint::new(p.x, p.y + h),
        ChartPoint::new(p.x, p.y - h),
    ];
    if let Some(bad) = stencil.iter().find(|q| !surface.contains(**q)) {
        return Err(SwimError::StencilOutsideChart { x: bad.x, y: bad.y });
    }
    let dfy_dx = (form(stencil[0])[1] - form(stencil[1])[1]) / (2.0 * h);
    let dfx_dy = (form(stencil[2])[0] - form(stencil[3])[0]) / (2.0 * h);
    Ok(dfy_dx - dfx_dy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KillingIndex {
    TranslationX,
    TranslationY,
    Rotation,
}

impl KillingIndex {
    pub const ALL: [KillingIndex; 3] = [
        KillingIndex::TranslationX,
        KillingIndex::TranslationY,
        KillingIndex::Rotation,
    ];

    /// 1-based index.
    pub fn from_number(n: usize) -> Result<Self> {
        match n {
            1 => Ok(KillingIndex::TranslationX),
            2 => Ok(KillingIndex::TranslationY),
            3 => Ok(KillingIndex::Rotation),
            _ => Err(SwimError::BadIndex {
                what: "Killing field",
                index: n,
            }),
        }
    }

    pub fn number(self) -> usize {
        self.position() + 1
    }

    pub fn position(self) -> usize {
        match self {
            KillingIndex::TranslationX => 0,
            KillingIndex::TranslationY => 1,
            KillingIndex::Rotation => 2,
        }
    }
}

/// The three Killing fields `ξ₁, ξ₂, ξ₃` of a surface.
#[derive(Clone, Debug)]
pub struct KillingSet {
    pub fields: [VectorField; 3],
}

impl KillingSet {
    pub const COUNT: usize = 3;

    pub fn get(&self, index: KillingIndex) -> &VectorField {
        &self.fields[index.position()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &VectorField> {
        self.fields.iter()
    }

    /// `Σ τ^α ξ_α`.
    pub fn combination(&self, tau: [f64; 3]) -> VectorField {
        let mut acc = self.fields[0].scaled(tau[0]);
        for (k, f) in tau.iter().zip(&self.fields).skip(1) {
            acc = acc.plus_scaled(*k, f);
        }
        acc.retagged(FieldTag::KillingCombination)
    }
}
