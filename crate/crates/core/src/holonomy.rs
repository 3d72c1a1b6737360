//! Net rigid motion produced by an infinitesimal closed stroke.
//!
//! For an ordered pair of gauge-orthogonal deformation fields `(u, v)` and a
//! loop enclosing signed area `A` in the `(σ_u, σ_v)` control plane
//! (counter-clockwise positive), the rigid increment solves
//!
//! ```text
//! G δτ = −⟨dξ|u, v⟩ A,    ⟨dξ_β|u, v⟩ = (1/M) Σ m (dξ_β)_{12}(x) (u^x v^y − u^y v^x).
//! ```
//!
//! The curvature-tensor forms below are the small-body limit of the same
//! expression, with `R_{jlik}` taken in the orthonormal frame at the origin.

use nalgebra::{Matrix3, Vector3};

use crate::body::Body;
use crate::deformation::gauge_residuals;
use crate::error::{Result, SwimError};
use crate::field::VectorField;
use crate::geometry::{ChartPoint, CurvatureTensor, KillingIndex, Surface};

pub use crate::deformation::gram_matrix;

/// Largest normalized `⟨ξ|η⟩` accepted for a deformation field.
pub const GAUGE_GATE: f64 = 1e-8;

/// Eigenvalues of the Gram matrix below this fraction of the largest are
/// treated as zero.
pub const GRAM_RANK_CUTOFF: f64 = 1e-10;

/// Pseudo-inverse of a symmetric positive semi-definite 3×3 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GramSolver {
    pub pseudo_inverse: Matrix3<f64>,
    pub rank: usize,
    /// Largest over smallest retained eigenvalue.
    pub condition: f64,
    /// Unit eigenvectors spanning the discarded directions.
    pub null_directions: Vec<[f64; 3]>,
}

impl GramSolver {
    pub fn new(g: &Matrix3<f64>) -> Self {
        let eig = g.symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mut pinv = Matrix3::zeros();
        let mut smallest = f64::INFINITY;
        let mut rank = 0;
        let mut null_directions = Vec::new();
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            let vec = eig.eigenvectors.column(i);
            if lambda > GRAM_RANK_CUTOFF * top && lambda > 0.0 {
                pinv += vec * vec.transpose() / lambda;
                smallest = smallest.min(lambda);
                rank += 1;
            } else {
                null_directions.push([vec[0], vec[1], vec[2]]);
            }
        }
        let condition = if rank > 0 { top / smallest } else { f64::INFINITY };
        Self {
            pseudo_inverse: pinv,
            rank,
            condition,
            null_directions,
        }
    }

    pub fn solve(&self, rhs: [f64; 3]) -> [f64; 3] {
        let x = self.pseudo_inverse * Vector3::from(rhs);
        [x[0], x[1], x[2]]
    }
}

/// `(1/M) Σ m ω(x) (u^x v^y − u^y v^x)` for a two-form with `dx∧dy`
/// coefficient `ω`.
pub fn two_form_bracket<F>(body: &Body, two_form: F, u: &VectorField, v: &VectorField) -> f64
where
    F: Fn(ChartPoint) -> f64,
{
    let sum: f64 = body
        .particles()
        .iter()
        .map(|p| p.mass * two_form(p.position) * u.value(p.position).wedge(v.value(p.position)))
        .sum();
    sum / body.total_mass()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyResult {
    /// Killing coefficients `(translation-x, translation-y, rotation)`.
    pub delta_tau: [f64; 3],
    pub area: f64,
    pub gram_condition: f64,
    pub gram_rank: usize,
    /// Rigid directions the body cannot observe; `delta_tau` has no
    /// component along them.
    pub indeterminate: Vec<[f64; 3]>,
    /// Normalized `⟨ξ_α|u⟩` and `⟨ξ_α|v⟩`.
    pub gauge_residuals: [[f64; 3]; 2],
}

impl HolonomyResult {
    pub fn translation(&self) -> [f64; 2] {
        [self.delta_tau[0], self.delta_tau[1]]
    }

    pub fn rotation(&self) -> f64 {
        self.delta_tau[2]
    }

    /// `δτ / A`.
    pub fn per_unit_area(&self) -> [f64; 3] {
        self.delta_tau.map(|t| t / self.area)
    }
}

fn gate(residuals: &[f64; 3]) -> Result<()> {
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > GAUGE_GATE || worst.is_nan() {
        return Err(SwimError::GaugeViolation {
            residual: worst,
            limit: GAUGE_GATE,
        });
    }
    Ok(())
}

/// Rigid increment for a loop of signed area `area` in the `(u, v)` plane.
pub fn holonomy_general(
    body: &Body,
    surface: &Surface,
    u: &VectorField,
    v: &VectorField,
    area: f64,
) -> Result<HolonomyResult> {
    body.check_in(surface)?;
    let ru = gauge_residuals(body, surface, u);
    let rv = gauge_residuals(body, surface, v);
    gate(&ru)?;
    gate(&rv)?;
    let ks = surface.killing_fields();
    let solver = GramSolver::new(&gram_matrix(body, surface, &ks));
    if solver.rank == 0 {
        return Err(SwimError::SingularGram { rank: 0 });
    }
    let mut rhs = [0.0; 3];
    for (slot, index) in rhs.iter_mut().zip(KillingIndex::ALL) {
        let bracket = two_form_bracket(
            body,
            |p| {
                surface
                    .killing_two_form(index, p)
                    .expect("particles were checked against the chart")
            },
            u,
            v,
        );
        *slot = -bracket * area;
    }
    Ok(HolonomyResult {
        delta_tau: solver.solve(rhs),
        area,
        gram_condition: solver.condition,
        gram_rank: solver.rank,
        indeterminate: solver.null_directions,
        gauge_residuals: [ru, rv],
    })
}

/// Masses at points of a `d`-dimensional orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct MassCloud {
    masses: Vec<f64>,
    positions: Vec<Vec<f64>>,
    dim: usize,
}

impl MassCloud {
    pub fn new(masses: Vec<f64>, positions: Vec<Vec<f64>>) -> Result<Self> {
        if masses.is_empty() || masses.len() != positions.len() {
            return Err(SwimError::InvalidBody(format!(
                "{} masses for {} positions",
                masses.len(),
                positions.len()
            )));
        }
        if masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(SwimError::InvalidBody("masses must be positive".into()));
        }
        let dim = positions[0].len();
        if dim == 0 || positions.iter().any(|x| x.len() != dim) {
            return Err(SwimError::InvalidBody("positions must share one dimension".into()));
        }
        Ok(Self {
            masses,
            positions,
            dim,
        })
    }

    pub fn from_body(body: &Body) -> Self {
        Self {
            masses: body.masses(),
            positions: body
                .positions()
                .iter()
                .map(|p| vec![p.x, p.y])
                .collect(),
            dim: 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            masses: self.masses.clone(),
            positions: self
                .positions
                .iter()
                .map(|x| x.iter().map(|c| c * factor).collect())
                .collect(),
            dim: self.dim,
        }
    }

    fn extent(&self) -> f64 {
        self.positions
            .iter()
            .map(|x| x.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn first_moment(&self) -> Vec<f64> {
        let mut q = vec![0.0; self.dim];
        for (m, x) in self.masses.iter().zip(&self.positions) {
            for (qj, xj) in q.iter_mut().zip(x) {
                *qj += m * xj;
            }
        }
        q
    }

    /// `Q^{jk}` as a row-major `d×d` array.
    pub fn second_moment(&self) -> Vec<f64> {
        let d = self.dim;
        let mut q = vec![0.0; d * d];
        for (m, x) in self.masses.iter().zip(&self.positions) {
            for j in 0..d {
                for k in 0..d {
                    q[j * d + k] += m * x[j] * x[k];
                }
            }
        }
        q
    }

    /// `Q^{jkl}` as a row-major `d×d×d` array.
    pub fn third_moment(&self) -> Vec<f64> {
        let d = self.dim;
        let mut q = vec![0.0; d * d * d];
        for (m, x) in self.masses.iter().zip(&self.positions) {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        q[(j * d + k) * d + l] += m * x[j] * x[k] * x[l];
                    }
                }
            }
        }
        q
    }

    fn check_balanced(&self) -> Result<()> {
        let q = self.first_moment();
        let norm = q.iter().map(|c| c * c).sum::<f64>().sqrt() / self.total_mass();
        let defect = norm / self.extent().max(f64::MIN_POSITIVE);
        if defect > crate::deformation::NORMAL_FORM_TOLERANCE {
            return Err(SwimError::Unbalanced {
                first_moment: defect,
            });
        }
        Ok(())
    }

    fn check_principal(&self) -> Result<()> {
        let d = self.dim;
        let q = self.second_moment();
        let trace: f64 = (0..d).map(|j| q[j * d + j]).sum();
        for j in 0..d {
            for k in 0..d {
                if j != k
                    && q[j * d + k].abs() > crate::deformation::NORMAL_FORM_TOLERANCE * trace
                {
                    return Err(SwimError::NotPrincipal {
                        off_diagonal: q[j * d + k],
                    });
                }
            }
        }
        Ok(())
    }
}

fn check_dim(c: &CurvatureTensor, dim: usize) -> Result<()> {
    if c.dim() != dim {
        return Err(SwimError::DimensionMismatch {
            expected: dim,
            found: c.dim(),
        });
    }
    Ok(())
}

/// `δx^k = (2/M) R_{jlik} Σ m x^i u^j v^l · A` with field values given per
/// particle.
pub fn small_swimmer_contraction(
    cloud: &MassCloud,
    c: &CurvatureTensor,
    u_values: &[Vec<f64>],
    v_values: &[Vec<f64>],
    area: f64,
) -> Result<Vec<f64>> {
    let d = cloud.dim();
    check_dim(c, d)?;
    cloud.check_balanced()?;
    let n = cloud.masses().len();
    if u_values.len() != n || v_values.len() != n {
        return Err(SwimError::InvalidBody("one field value per particle is required".into()));
    }
    let mut dx = vec![0.0; d];
    for (((m, x), u), v) in cloud
        .masses()
        .iter()
        .zip(cloud.positions())
        .zip(u_values)
        .zip(v_values)
    {
        for (k, dxk) in dx.iter_mut().enumerate() {
            for j in 0..d {
                for l in 0..d {
                    let uv = u[j] * v[l];
                    if uv == 0.0 {
                        continue;
                    }
                    for i in 0..d {
                        *dxk += m * c.get(j, l, i, k) * x[i] * uv;
                    }
                }
            }
        }
    }
    let scale = 2.0 * area / cloud.total_mass();
    Ok(dx.into_iter().map(|v| v * scale).collect())
}

/// Small-body translation for a 2D body. Fields must satisfy the flat gauge
/// condition.
pub fn holonomy_small_swimmer(
    body: &Body,
    c: &CurvatureTensor,
    u: &VectorField,
    v: &VectorField,
    area: f64,
) -> Result<[f64; 2]> {
    check_dim(c, 2)?;
    let flat = Surface::flat();
    gate(&gauge_residuals(body, &flat, u))?;
    gate(&gauge_residuals(body, &flat, v))?;
    let values = |f: &VectorField| -> Vec<Vec<f64>> {
        body.positions()
            .iter()
            .map(|&p| f.value(p).components().to_vec())
            .collect()
    };
    let dx = small_swimmer_contraction(
        &MassCloud::from_body(body),
        c,
        &values(u),
        &values(v),
        area,
    )?;
    Ok([dx[0], dx[1]])
}

/// `A^j_m(ββ')`: the gauge-fixed linear field `η^j = A^j_m x^m`.
fn linear_coefficients(q2: &[f64], d: usize, pair: (usize, usize)) -> Result<Vec<f64>> {
    let (b, bp) = pair;
    if !(1..=d).contains(&b) || !(1..=d).contains(&bp) {
        return Err(SwimError::BadIndex {
            what: "linear deformation",
            index: b.max(bp),
        });
    }
    let (b, bp) = (b - 1, bp - 1);
    let mut a = vec![0.0; d * d];
    if b == bp {
        a[b * d + b] = 1.0;
        return Ok(a);
    }
    let sum = q2[b * d + b] + q2[bp * d + bp];
    if sum <= 0.0 {
        return Err(SwimError::DegenerateMoments {
            j: b + 1,
            k: bp + 1,
        });
    }
    a[bp * d + b] = q2[bp * d + bp] / sum;
    a[b * d + bp] = q2[b * d + b] / sum;
    Ok(a)
}

/// `M δx^k = 2 R_{jlik} Q^{imh} A^j_m(b) A^l_h(c) · A` for a balanced cloud
/// in principal axes. Pairs are 1-based.
pub fn holonomy_linear_cloud(
    cloud: &MassCloud,
    c: &CurvatureTensor,
    pair_b: (usize, usize),
    pair_c: (usize, usize),
    area: f64,
) -> Result<Vec<f64>> {
    let d = cloud.dim();
    check_dim(c, d)?;
    cloud.check_balanced()?;
    cloud.check_principal()?;
    let q2 = cloud.second_moment();
    let q3 = cloud.third_moment();
    let ab = linear_coefficients(&q2, d, pair_b)?;
    let ac = linear_coefficients(&q2, d, pair_c)?;
    // Contract the body part first: S^{ijl} = Q^{imh} A^j_m A^l_h.
    let mut s = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                let mut acc = 0.0;
                for m in 0..d {
                    let ajm = ab[j * d + m];
                    if ajm == 0.0 {
                        continue;
                    }
                    for h in 0..d {
                        acc += q3[(i * d + m) * d + h] * ajm * ac[l * d + h];
                    }
                }
                s[(i * d + j) * d + l] = acc;
            }
        }
    }
    let mut dx = vec![0.0; d];
    for (k, dxk) in dx.iter_mut().enumerate() {
        for j in 0..d {
            for l in 0..d {
                for i in 0..d {
                    *dxk += c.get(j, l, i, k) * s[(i * d + j) * d + l];
                }
            }
        }
    }
    let scale = 2.0 * area / cloud.total_mass();
    Ok(dx.into_iter().map(|v| v * scale).collect())
}

pub fn holonomy_linear(
    body: &Body,
    c: &CurvatureTensor,
    pair_b: (usize, usize),
    pair_c: (usize, usize),
    area: f64,
) -> Result<[f64; 2]> {
    check_dim(c, 2)?;
    let dx = holonomy_linear_cloud(&MassCloud::from_body(body), c, pair_b, pair_c, area)?;
    Ok([dx[0], dx[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::Particle;
    use crate::deformation::{gauge_fixed_linear_deformation, linear_deformation, project_gauge};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn triangle(m: f64, h: f64, b: f64) -> Body {
        let xb = -(1.0 - 2.0 * m) * h;
        Body::from_triples(&[[m, xb, b / 2.0], [m, xb, -b / 2.0], [1.0 - 2.0 * m, xb + h, 0.0]])
            .unwrap()
    }

    fn height() -> VectorField {
        VectorField::linear_map([[1.0, 0.0], [0.0, 0.0]])
    }

    fn base() -> VectorField {
        VectorField::linear_map([[0.0, 0.0], [0.0, 1.0]])
    }

    #[test]
    fn gram_of_single_point_and_balanced_body() {
        let flat = Surface::flat();
        let ks = flat.killing_fields();
        let point = Body::from_triples(&[[1.0, 0.0, 0.0]]).unwrap();
        let g = gram_matrix(&point, &flat, &ks);
        let solver = GramSolver::new(&g);
        assert_eq!(solver.rank, 2);
        assert_eq!(solver.null_directions.len(), 1);
        assert_relative_eq!(solver.null_directions[0][2].abs(), 1.0, epsilon = 1e-15);

        let g = gram_matrix(&triangle(0.25, 1.0, 1.0), &flat, &ks);
        assert!(g[(0, 2)].abs() < 1e-16 && g[(1, 2)].abs() < 1e-16);
    }

    #[test]
    fn bracket_examples() {
        let body = triangle(0.25, 1.0, 1.0);
        let r = 0.3;
        let u = base();
        let v = height();
        assert_eq!(two_form_bracket(&body, |p| 8.0 * r * p.y, &u, &u), 0.0);
        let got = two_form_bracket(&body, |p| 8.0 * r * p.y, &u, &v);
        let sum: f64 = body
            .particles()
            .iter()
            .map(|p| p.mass * p.position.x * p.position.y * p.position.y)
            .sum();
        assert_relative_eq!(got, -8.0 * r * sum, epsilon = 1e-15);
    }

    #[test]
    fn exact_and_approximate_two_forms_differ_at_order_rl2() {
        let s = Surface::new(1.0).unwrap();
        let body = triangle(0.25, 1.0, 1.0).scaled(0.1).unwrap();
        let exact = two_form_bracket(
            &body,
            |p| s.killing_two_form(KillingIndex::TranslationX, p).unwrap(),
            &base(),
            &height(),
        );
        let approx = two_form_bracket(&body, |p| 8.0 * p.y, &base(), &height());
        let rel = (exact / approx - 1.0).abs();
        assert!(rel > 1e-4 && rel < 0.03, "{rel}");
    }

    #[test]
    fn flat_translations_vanish_and_cat_turns() {
        let flat = Surface::flat();
        let body = Body::from_triples(&[[1.0, 0.9, 0.1], [2.0, -0.3, 0.4], [1.5, -0.2, -0.6]])
            .unwrap();
        let (body, _) = body.normalized(&flat).unwrap();
        let u = gauge_fixed_linear_deformation(&body, 1, 1).unwrap();
        let v = gauge_fixed_linear_deformation(&body, 1, 2).unwrap();
        let h = holonomy_general(&body, &flat, &u, &v, 1.0).unwrap();
        assert!(h.translation().iter().all(|t| t.abs() < 1e-12));
        assert!(h.rotation().abs() > 1e-3);
        assert_eq!(h.gram_rank, 3);
    }

    #[test]
    fn rejects_gauge_violating_fields() {
        let s = Surface::new(1.0).unwrap();
        let body = triangle(0.25, 1.0, 1.0);
        let e = holonomy_general(&body, &s, &base(), &height(), 1.0).unwrap_err();
        assert!(matches!(e, SwimError::GaugeViolation { .. }));
        let translating = VectorField::linear_map([[0.0, 1.0], [0.0, 0.0]]);
        let shifted = Body::from_triples(&[[1.0, 1.0, 0.0], [1.0, 2.0, 0.5]]).unwrap();
        assert!(holonomy_small_swimmer(
            &shifted,
            &CurvatureTensor::zero(2),
            &translating,
            &translating,
            1.0
        )
        .is_err());
    }

    #[test]
    fn small_triangle_matches_leading_order() {
        // Unit triangle at small curvature: δτ_x ≈ R·4m(M−2m)hb²/M²·A in the
        // (height, base) order.
        for &r in &[1e-3, -1e-3] {
            let s = Surface::new(r).unwrap();
            let body = triangle(0.25, 1.0, 1.0);
            let ks = s.killing_fields();
            let u = project_gauge(&body, &s, &height(), &ks).unwrap();
            let v = project_gauge(&body, &s, &base(), &ks).unwrap();
            let h = holonomy_general(&body, &s, &u, &v, 0.01).unwrap();
            let expected = r * 0.5 * 0.01;
            assert!((h.delta_tau[0] / expected - 1.0).abs() < 5e-3);
            assert!(h.delta_tau[1].abs() < 1e-15 && h.delta_tau[2].abs() < 1e-15);

            let c = s.curvature_tensor();
            let small = holonomy_small_swimmer(&body, &c, &height(), &base(), 0.01).unwrap();
            assert_relative_eq!(small[0], expected, max_relative = 1e-12);
            let linear = holonomy_linear(&body, &c, (1, 1), (2, 2), 0.01).unwrap();
            assert_relative_eq!(linear[0], small[0], max_relative = 1e-12);
        }
    }

    #[test]
    fn small_swimmer_examples() {
        let body = triangle(0.25, 1.0, 1.0);
        let zero = holonomy_small_swimmer(&body, &CurvatureTensor::zero(2), &height(), &base(), 1.0)
            .unwrap();
        assert_eq!(zero, [0.0, 0.0]);
        let c = CurvatureTensor::constant_curvature(2, 4.0);
        let forward = holonomy_small_swimmer(&body, &c, &height(), &base(), 1.0).unwrap();
        let backward = holonomy_small_swimmer(&body, &c, &base(), &height(), 1.0).unwrap();
        assert_eq!(forward[0], -backward[0]);
        let flipped = holonomy_small_swimmer(&body, &c.scaled(-1.0), &height(), &base(), 1.0)
            .unwrap();
        assert_eq!(forward[0], -flipped[0]);
    }

    #[test]
    fn linear_null_results() {
        let c = CurvatureTensor::constant_curvature(2, 4.0);
        let cross = Body::from_triples(&[
            [1.0, 0.4, 0.0],
            [1.0, -0.4, 0.0],
            [2.0, 0.0, 0.3],
            [2.0, 0.0, -0.3],
        ])
        .unwrap();
        let needle = Body::from_triples(&[[1.0, -0.6, 0.0], [3.0, 0.1, 0.0], [1.0, 0.3, 0.0]])
            .unwrap();
        for pb in [(1, 1), (1, 2), (2, 2)] {
            for pc in [(1, 1), (1, 2), (2, 2)] {
                let dx = holonomy_linear(&cross, &c, pb, pc, 1.0).unwrap();
                assert!(dx.iter().all(|v| v.abs() < 1e-12));
                let dx = holonomy_linear(&needle, &c, pb, pc, 1.0).unwrap();
                assert!(dx.iter().all(|v| v.abs() < 1e-15));
            }
        }
    }

    #[test]
    fn works_in_three_dimensions() {
        let c = CurvatureTensor::constant_curvature(3, 1.5);
        // Mirror-symmetric in y and z, balanced along x.
        let mut positions = Vec::new();
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                positions.push(vec![0.5, 0.4 * sy, 0.3 * sz]);
            }
        }
        positions.push(vec![-1.0, 0.0, 0.0]);
        let cloud = MassCloud::new(vec![1.0, 1.0, 1.0, 1.0, 2.0], positions).unwrap();
        let linear = holonomy_linear_cloud(&cloud, &c, (1, 1), (2, 2), 1.0).unwrap();
        let u: Vec<Vec<f64>> = cloud.positions().iter().map(|x| vec![x[0], 0.0, 0.0]).collect();
        let v: Vec<Vec<f64>> = cloud.positions().iter().map(|x| vec![0.0, x[1], 0.0]).collect();
        let direct = small_swimmer_contraction(&cloud, &c, &u, &v, 1.0).unwrap();
        assert!(linear[0].abs() > 0.1);
        for (a, b) in linear.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(holonomy_linear_cloud(&cloud, &CurvatureTensor::zero(2), (1, 1), (2, 2), 1.0)
            .is_err());
    }

    fn arb_normal_body() -> impl Strategy<Value = Body> {
        prop::collection::vec((0.1f64..2.0, -0.5f64..0.5, -0.5f64..0.5), 3..7).prop_map(|v| {
            let body =
                Body::new(v.into_iter().map(|(m, x, y)| Particle::new(m, x, y)).collect()).unwrap();
            body.normalized(&Surface::flat()).unwrap().0
        })
    }

    proptest! {
        #[test]
        fn holonomy_is_antisymmetric_and_linear_in_area(
            body in arb_normal_body(),
            r in -0.5f64..0.5,
            area in 0.001f64..0.1,
        ) {
            let s = Surface::new(r).unwrap();
            let ks = s.killing_fields();
            let u = project_gauge(&body, &s, &linear_deformation(1, 1).unwrap(), &ks).unwrap();
            let v = project_gauge(&body, &s, &linear_deformation(1, 2).unwrap(), &ks).unwrap();
            let uv = holonomy_general(&body, &s, &u, &v, area).unwrap();
            let vu = holonomy_general(&body, &s, &v, &u, area).unwrap();
            let doubled = holonomy_general(&body, &s, &u, &v, 2.0 * area).unwrap();
            for a in 0..3 {
                let scale = uv.delta_tau.iter().fold(1e-300f64, |m, t| m.max(t.abs()));
                prop_assert!((uv.delta_tau[a] + vu.delta_tau[a]).abs() <= 1e-12 * scale);
                prop_assert!((2.0 * uv.delta_tau[a] - doubled.delta_tau[a]).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn linear_formula_matches_direct_contraction(body in arb_normal_body(), k in -3.0f64..3.0) {
            let c = CurvatureTensor::constant_curvature(2, k);
            for pb in [(1, 1), (1, 2), (2, 2)] {
                for pc in [(1, 1), (1, 2), (2, 2)] {
                    let u = gauge_fixed_linear_deformation(&body, pb.0, pb.1).unwrap();
                    let v = gauge_fixed_linear_deformation(&body, pc.0, pc.1).unwrap();
                    let direct = holonomy_small_swimmer(&body, &c, &u, &v, 1.0).unwrap();
                    let linear = holonomy_linear(&body, &c, pb, pc, 1.0).unwrap();
                    for i in 0..2 {
                        prop_assert!((direct[i] - linear[i]).abs() < 1e-12);
                    }
                }
            }
        }

        #[test]
        fn reflection_symmetric_bodies_swim_along_axis(
            m in 0.05f64..0.45, h in 0.2f64..1.0, b in 0.2f64..1.0, r in -0.5f64..0.5,
        ) {
            let s = Surface::new(r).unwrap();
            let body = triangle(m, h, b);
            let ks = s.killing_fields();
            let u = project_gauge(&body, &s, &height(), &ks).unwrap();
            let v = project_gauge(&body, &s, &base(), &ks).unwrap();
            let res = holonomy_general(&body, &s, &u, &v, 1.0).unwrap();
            prop_assert!(res.delta_tau[1].abs() < 1e-14);
            prop_assert!(res.delta_tau[2].abs() < 1e-14);
        }

        #[test]
        fn axis_bodies_cannot_swim_along_their_axis(
            xs in prop::collection::vec((0.1f64..2.0, -0.5f64..0.5), 2..6),
            c in prop::array::uniform4(-1.0f64..1.0),
            d in prop::array::uniform4(-1.0f64..1.0),
            r in -0.5f64..0.5,
        ) {
            let s = Surface::new(r).unwrap();
            let raw = Body::new(xs.iter().map(|(m, x)| Particle::new(*m, *x, 0.0)).collect()).unwrap();
            let body = raw.balance(&s).unwrap().0;
            // Fields restricted to the axis: any field whose values on the body are along x.
            let u = VectorField::linear_map([[c[0], c[1]], [0.0, c[3]]]);
            let v = VectorField::linear_map([[d[0], d[1]], [0.0, d[3]]]);
            let ks = s.killing_fields();
            if let (Ok(u), Ok(v)) = (project_gauge(&body, &s, &u, &ks), project_gauge(&body, &s, &v, &ks)) {
                let res = holonomy_general(&body, &s, &u, &v, 1.0).unwrap();
                prop_assert!(res.delta_tau[0].abs() < 1e-12);
            }
        }
    }
}
