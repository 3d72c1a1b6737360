use crate::error::{Result, SwimError};
use crate::field::{FieldTag, QuadraticField, VectorField};

/// Riemann tensor `R_{jlik}` in an orthonormal frame, any dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    components: Vec<f64>,
}

impl CurvatureTensor {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            components: vec![0.0; dim.pow(4)],
        }
    }

    /// `R_{jlik} = K (δ_ji δ_lk − δ_jk δ_li)`, so that `R_{1212} = K`.
    pub fn constant_curvature(dim: usize, k: f64) -> Self {
        Self::from_fn(dim, |j, l, i, m| {
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            k * (d(j, i) * d(l, m) - d(j, m) * d(l, i))
        })
    }

    pub fn from_fn<F>(dim: usize, f: F) -> Self
    where
        F: Fn(usize, usize, usize, usize) -> f64,
    {
        let mut c = Self::zero(dim);
        for j in 0..dim {
            for l in 0..dim {
                for i in 0..dim {
                    for k in 0..dim {
                        let idx = c.index(j, l, i, k);
                        c.components[idx] = f(j, l, i, k);
                    }
                }
            }
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, j: usize, l: usize, i: usize, k: usize) -> usize {
        ((j * self.dim + l) * self.dim + i) * self.dim + k
    }

    /// Zero-based component `R_{jlik}`.
    pub fn get(&self, j: usize, l: usize, i: usize, k: usize) -> f64 {
        self.components[self.index(j, l, i, k)]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            components: self.components.iter().map(|c| c * factor).collect(),
        }
    }

    /// Largest violation among antisymmetry in each pair, pair exchange and
    /// the first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for k in 0..n {
                        let r = self.get(j, l, i, k);
                        worst = worst
                            .max((r + self.get(l, j, i, k)).abs())
                            .max((r + self.get(j, l, k, i)).abs())
                            .max((r - self.get(i, k, j, l)).abs())
                            .max((r + self.get(j, i, k, l) + self.get(j, k, l, i)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Approximate translation Killing field `ξ_(k)` near the frame origin.
///
/// `ξ^l = δ^l_k − ⅔ R_{jlik} x^i x^j`: unit value and vanishing curl at the
/// origin, with curl `∂_j ξ_l − ∂_l ξ_j = −2 R_{jlik} x^i` to first order.
/// `axis` is 1-based.
pub fn translation_killing_approx(c: &CurvatureTensor, axis: usize) -> Result<VectorField> {
    if c.dim() != 2 {
        return Err(SwimError::DimensionMismatch {
            expected: 2,
            found: c.dim(),
        });
    }
    if !(1..=2).contains(&axis) {
        return Err(SwimError::BadIndex {
            what: "translation axis",
            index: axis,
        });
    }
    let k = axis - 1;
    let mut q = QuadraticField::zero();
    q.constant[k] = 1.0;
    for l in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                q.quadratic[l][i][j] = -2.0 / 3.0 * c.get(j, l, i, k);
            }
        }
    }
    Ok(VectorField::quadratic(q, FieldTag::ApproxTranslation(axis)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ChartPoint, KillingIndex, Surface};

    #[test]
    fn constant_curvature_symmetries_hold_exactly() {
        for dim in 2..=4 {
            let c = CurvatureTensor::constant_curvature(dim, 2.5);
            assert_eq!(c.symmetry_defect(), 0.0);
        }
        let c = CurvatureTensor::constant_curvature(2, 4.0);
        assert_eq!(c.get(0, 1, 0, 1), 4.0);
        assert_eq!(c.get(0, 1, 1, 0), -4.0);
    }

    #[test]
    fn symmetry_defect_detects_bad_tensor() {
        let bad = CurvatureTensor::from_fn(2, |j, l, _, _| if j == 0 && l == 1 { 1.0 } else { 0.0 });
        assert!(bad.symmetry_defect() > 0.5);
    }

    #[test]
    fn flat_tensor_gives_constant_translation() {
        let f = translation_killing_approx(&CurvatureTensor::zero(2), 1).unwrap();
        let v = f.value(ChartPoint::new(0.7, -1.3));
        assert_eq!((v.vx, v.vy), (1.0, 0.0));
    }

    #[test]
    fn approximate_field_reproduces_two_form() {
        let r = 1.0;
        let s = Surface::new(r).unwrap();
        let f = translation_killing_approx(&s.curvature_tensor(), 1).unwrap();
        let origin_jac = f.jacobian(ChartPoint::ORIGIN);
        assert_eq!(origin_jac[1][0] - origin_jac[0][1], 0.0);
        let mut previous_defect = f64::INFINITY;
        for n in 0..5 {
            let y = 0.2 / f64::from(1 << n);
            let p = ChartPoint::new(0.0, y);
            let jac = f.jacobian(p);
            let curl = jac[1][0] - jac[0][1];
            assert!((curl - 8.0 * r * y).abs() < 1e-15);
            let exact = s.killing_two_form(KillingIndex::TranslationX, p).unwrap();
            let defect = (curl / exact - 1.0).abs();
            assert!(defect < previous_defect);
            previous_defect = defect;
        }
    }

    #[test]
    fn approximate_field_is_close_to_exact_near_origin() {
        let s = Surface::new(1.0).unwrap();
        let approx = translation_killing_approx(&s.curvature_tensor(), 1).unwrap();
        let exact = s.killing_field(KillingIndex::TranslationX);
        let diff = |t: f64| {
            let p = ChartPoint::new(0.6 * t, -0.8 * t);
            (approx.value(p) - exact.value(p)).coord_norm()
        };
        let ratio = diff(0.1) / diff(0.05);
        assert!((ratio - 4.0).abs() < 1e-9, "ratio {ratio}");
        assert!(translation_killing_approx(&CurvatureTensor::zero(3), 1).is_err());
        assert!(translation_killing_approx(&CurvatureTensor::zero(2), 3).is_err());
    }
}
