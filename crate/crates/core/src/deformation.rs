//! Strain-generating fields and the gauge condition.
//!
//! Strain is `∇_j η_k + ∇_k η_j`, without a factor ½. With this convention
//! `η_(12)` carries unit off-diagonal strain and `η_(11)` carries strain 2 in
//! the `xx` slot.

use nalgebra::{Matrix3, Vector3};

use crate::body::Body;
use crate::error::{Result, SwimError};
use crate::field::{FieldTag, QuadraticField, VectorField};
use crate::geometry::{ChartPoint, KillingSet, Surface};

/// Tolerance on `|Q^j| / (M L)` and `|Q^{xy}| / tr Q` for the closed-form gauge.
pub const NORMAL_FORM_TOLERANCE: f64 = 1e-9;

fn check_pair(j: usize, k: usize) -> Result<(usize, usize)> {
    for idx in [j, k] {
        if !(1..=2).contains(&idx) {
            return Err(SwimError::BadIndex {
                what: "linear deformation",
                index: idx,
            });
        }
    }
    Ok((j - 1, k - 1))
}

/// `η_(jk) = ½(x^j ∂_k + x^k ∂_j)`, indices 1-based.
pub fn linear_deformation(j: usize, k: usize) -> Result<VectorField> {
    let (a, b) = check_pair(j, k)?;
    let mut m = [[0.0; 2]; 2];
    // v^l = A[l][i] x^i
    m[b][a] += 0.5;
    m[a][b] += 0.5;
    Ok(VectorField::quadratic(
        QuadraticField::from_linear(m),
        FieldTag::Linear(j, k),
    ))
}

pub fn strain_of(surface: &Surface, f: &VectorField, p: ChartPoint) -> Result<[[f64; 2]; 2]> {
    let nabla = surface.covariant_derivative_lowered(f, p)?;
    let mut out = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            out[j][k] = nabla[j][k] + nabla[k][j];
        }
    }
    Ok(out)
}

/// Killing Gram matrix `G_{βα} = ⟨ξ_β|ξ_α⟩`.
pub fn gram_matrix(body: &Body, surface: &Surface, ks: &KillingSet) -> Matrix3<f64> {
    let mut g = Matrix3::zeros();
    for a in 0..3 {
        for b in a..3 {
            let v = body.scalar_product(surface, &ks.fields[a], &ks.fields[b]);
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    g
}

/// Numerical rank of a symmetric positive semi-definite matrix, with cutoff
/// relative to its largest eigenvalue.
pub(crate) fn psd_rank(g: &Matrix3<f64>, cutoff: f64) -> usize {
    let eig = g.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > cutoff * top)
        .count()
}

/// `f − Σ ξ_α (G⁻¹)^{αβ} ⟨ξ_β|f⟩`.
pub fn project_gauge(
    body: &Body,
    surface: &Surface,
    f: &VectorField,
    ks: &KillingSet,
) -> Result<VectorField> {
    let g = gram_matrix(body, surface, ks);
    let rank = psd_rank(&g, 1e-10);
    if rank < 3 {
        return Err(SwimError::SingularGram { rank });
    }
    let rhs = Vector3::from_iterator(ks.iter().map(|xi| body.scalar_product(surface, xi, f)));
    let coeffs = g
        .cholesky()
        .ok_or(SwimError::SingularGram { rank })?
        .solve(&rhs);
    let mut out = f.clone();
    for (c, xi) in coeffs.iter().zip(ks.iter()) {
        out = out.plus_scaled(-c, xi);
    }
    Ok(out.retagged(FieldTag::GaugeProjected(Box::new(f.tag().clone()))))
}

/// `|⟨ξ_α|f⟩| / sqrt(⟨ξ_α|ξ_α⟩⟨f|f⟩)` for each Killing field.
pub fn gauge_residuals(body: &Body, surface: &Surface, f: &VectorField) -> [f64; 3] {
    let ks = surface.killing_fields();
    let ff = body.scalar_product(surface, f, f);
    let mut out = [0.0; 3];
    for (slot, xi) in out.iter_mut().zip(ks.iter()) {
        let num = body.scalar_product(surface, xi, f).abs();
        let den = (body.scalar_product(surface, xi, xi) * ff).sqrt();
        *slot = if den > 0.0 { num / den } else { 0.0 };
    }
    out
}

/// Checks `Q^j = 0` and `Q^{xy} = 0` within [`NORMAL_FORM_TOLERANCE`].
pub fn check_normal_form(body: &Body) -> Result<()> {
    let q = body.moments();
    let first = body.balance_defect();
    if first > NORMAL_FORM_TOLERANCE {
        return Err(SwimError::Unbalanced {
            first_moment: first,
        });
    }
    let trace = q.second[0][0] + q.second[1][1];
    if q.second[0][1].abs() > NORMAL_FORM_TOLERANCE * trace {
        return Err(SwimError::NotPrincipal {
            off_diagonal: q.second[0][1],
        });
    }
    Ok(())
}

/// Gauge-fixed linear deformation for a balanced body in principal axes:
/// `(Q^{jj} + Q^{kk}) η = x^j Q^{kk} ∂_k + x^k Q^{jj} ∂_j`.
///
/// For `j = k` this is `x^j ∂_j`, whatever the moments.
pub fn gauge_fixed_linear_deformation(body: &Body, j: usize, k: usize) -> Result<VectorField> {
    let (a, b) = check_pair(j, k)?;
    check_normal_form(body)?;
    let q = body.moments().second;
    let mut m = [[0.0; 2]; 2];
    if a == b {
        m[a][a] = 1.0;
    } else {
        let sum = q[a][a] + q[b][b];
        if sum <= 0.0 {
            return Err(SwimError::DegenerateMoments { j, k });
        }
        m[b][a] = q[b][b] / sum;
        m[a][b] = q[a][a] / sum;
    }
    Ok(VectorField::quadratic(
        QuadraticField::from_linear(m),
        FieldTag::GaugeFixedLinear(j, k),
    ))
}
