//! Finite strokes under the zero-momentum constraint.
//!
//! The default [`Transport::Body`] scheme writes the lab positions as
//! `x_n(t) = g(t) · s_n(σ(t))`, where the shape map `s(σ)` is the time-one
//! flow of `σ^b η_b` from the initial positions and `g` is an isometry. The
//! constraint fixes the body-frame rigid velocity `Ω = g⁻¹ġ` from `s` and
//! `ṡ` alone, and `g` is advanced by a fourth-order Magnus step. Because
//! `s(σ(1)) = s(σ(0))`, the final shape is exactly `g(1)` applied to the
//! initial one.
//!
//! [`Transport::Lab`] instead evaluates the deformation fields at the current
//! lab positions and advances the particles with RK4. The fields are then not
//! carried along by the accumulated rigid motion, so the final shape is only
//! rigidly related to the initial one up to `O(σ² dσ)`; the
//! `closure_residual` of the record measures this.

mod magnus;
mod stroke;

use std::io::{self, Write};

use crate::body::Body;
use crate::deformation::gram_matrix;
use crate::error::{Result, SwimError};
use crate::field::VectorField;
use crate::geometry::{ChartPoint, Isometry, KillingSet, RigidAlgebra, Surface, TangentVector};
#[cfg(test)]
use crate::geometry::KillingIndex;
use crate::holonomy::{holonomy_general, GramSolver};

pub use stroke::{Side, Stroke, StrokePath};

/// Fixed step count used when a caller has no preference.
pub const DEFAULT_STEPS: usize = 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Transport {
    #[default]
    Body,
    Lab,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub transport: Transport,
    /// RK4 steps used to evaluate the shape map (body transport only).
    pub shape_substeps: usize,
    /// Keep per-step positions and rigid elements.
    pub record_trajectory: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            transport: Transport::Body,
            shape_substeps: 16,
            record_trajectory: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub transport: Transport,
    pub steps: usize,
    /// Times of the recorded states (empty unless recording).
    pub times: Vec<f64>,
    pub positions: Vec<Vec<ChartPoint>>,
    pub rigid: Vec<Isometry>,
    /// `P_ξ` for the three Killing fields at every accepted step.
    pub momentum: Vec<[f64; 3]>,
    /// `max_β |P_β| / (M max_n |ẋ_n|)` over the whole stroke.
    pub max_relative_momentum: f64,
    pub final_rigid: Isometry,
    /// Killing coefficients of `g(1)`.
    pub delta_tau: [f64; 3],
    /// Image of the origin under `g(1)`.
    pub net_translation: ChartPoint,
    /// Turn of a frame at the origin under `g(1)`.
    pub net_rotation: f64,
    /// `max_n |x_n(1) − g(1) x_n(0)|` in chart units.
    pub closure_residual: f64,
}

impl TrajectoryRecord {
    /// Rows `t,particle,x,y`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,particle,x,y")?;
        for (t, frame) in self.times.iter().zip(&self.positions) {
            for (n, p) in frame.iter().enumerate() {
                writeln!(out, "{t:.16e},{n},{:.16e},{:.16e}", p.x, p.y)?;
            }
        }
        Ok(())
    }
}

/// `P_ξ = Σ m_n g(ẋ_n, ξ(x_n))`.
pub fn momentum(
    body: &Body,
    surface: &Surface,
    xi: &VectorField,
    velocities: &[TangentVector],
) -> Result<f64> {
    if velocities.len() != body.len() {
        return Err(SwimError::InvalidBody(format!(
            "{} velocities for {} particles",
            velocities.len(),
            body.len()
        )));
    }
    Ok(body
        .particles()
        .iter()
        .zip(velocities)
        .map(|(p, v)| p.mass * surface.inner(p.position, *v, xi.value(p.position)))
        .sum())
}

/// Killing coefficients `τ̇` that cancel the momentum of the velocities `w`.
fn rigid_velocity(
    surface: &Surface,
    ks: &KillingSet,
    body: &Body,
    w: &[TangentVector],
) -> Result<[f64; 3]> {
    let solver = GramSolver::new(&gram_matrix(body, surface, ks));
    if solver.rank < 3 {
        return Err(SwimError::SingularGram { rank: solver.rank });
    }
    let mass = body.total_mass();
    let mut rhs = [0.0; 3];
    for (slot, xi) in rhs.iter_mut().zip(ks.iter()) {
        *slot = -momentum(body, surface, xi, w)? / mass;
    }
    Ok(solver.solve(rhs))
}

fn mass_weighted_speed(body: &Body, velocities: &[TangentVector]) -> f64 {
    let top = velocities.iter().map(|v| v.coord_norm()).fold(0.0, f64::max);
    body.total_mass() * top
}

/// Momentum of a lab state and its normalization.
fn momentum_check(
    surface: &Surface,
    ks: &KillingSet,
    lab: &Body,
    velocities: &[TangentVector],
) -> Result<([f64; 3], f64)> {
    let mut p = [0.0; 3];
    for (slot, xi) in p.iter_mut().zip(ks.iter()) {
        *slot = momentum(lab, surface, xi, velocities)?;
    }
    let scale = mass_weighted_speed(lab, velocities);
    let worst = p.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let rel = if scale > 0.0 { worst / scale } else { worst };
    Ok((p, rel))
}

/// Shape map `σ ↦ s(σ)` with its sensitivities `∂s/∂σ^b`.
struct ShapeMap<'a> {
    start: Vec<ChartPoint>,
    fields: &'a [VectorField; 2],
    substeps: usize,
}

impl ShapeMap<'_> {
    fn eval(&self, sigma: [f64; 2]) -> (Vec<ChartPoint>, Vec<[TangentVector; 2]>) {
        let h = 1.0 / self.substeps as f64;
        let mut points = Vec::with_capacity(self.start.len());
        let mut sens = Vec::with_capacity(self.start.len());
        for &x0 in &self.start {
            // State: position, ∂/∂σ¹, ∂/∂σ².
            let rhs = |z: ChartPoint, j: [TangentVector; 2]| {
                let v0 = self.fields[0].value(z);
                let v1 = self.fields[1].value(z);
                let d0 = self.fields[0].jacobian(z);
                let d1 = self.fields[1].jacobian(z);
                let dv = |a: usize, b: usize| sigma[0] * d0[a][b] + sigma[1] * d1[a][b];
                let apply = |t: TangentVector| {
                    TangentVector::new(
                        dv(0, 0) * t.vx + dv(0, 1) * t.vy,
                        dv(1, 0) * t.vx + dv(1, 1) * t.vy,
                    )
                };
                (
                    v0 * sigma[0] + v1 * sigma[1],
                    [apply(j[0]) + v0, apply(j[1]) + v1],
                )
            };
            let mut z = x0;
            let mut j = [TangentVector::zero(); 2];
            let shift = |z: ChartPoint, j: [TangentVector; 2], k: &(TangentVector, [TangentVector; 2]), c: f64| {
                (z.offset(k.0, c), [j[0] + k.1[0] * c, j[1] + k.1[1] * c])
            };
            for _ in 0..self.substeps {
                let k1 = rhs(z, j);
                let (z2, j2) = shift(z, j, &k1, 0.5 * h);
                let k2 = rhs(z2, j2);
                let (z3, j3) = shift(z, j, &k2, 0.5 * h);
                let k3 = rhs(z3, j3);
                let (z4, j4) = shift(z, j, &k3, h);
                let k4 = rhs(z4, j4);
                let c = h / 6.0;
                z = z.offset(k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0, c);
                for b in 0..2 {
                    j[b] = j[b] + (k1.1[b] + k2.1[b] * 2.0 + k3.1[b] * 2.0 + k4.1[b]) * c;
                }
            }
            points.push(z);
            sens.push(j);
        }
        (points, sens)
    }
}

struct BodyFrame<'a> {
    surface: &'a Surface,
    ks: KillingSet,
    template: &'a Body,
    shape: ShapeMap<'a>,
    stroke: &'a Stroke,
}

impl BodyFrame<'_> {
    /// Shape, shape velocity and body-frame rigid velocity at time `t`.
    fn state(&self, t: f64, side: Side) -> Result<(Body, Vec<TangentVector>, [f64; 3])> {
        let (sigma, sigma_dot) = self.stroke.eval(t, side);
        let (points, sens) = self.shape.eval(sigma);
        let shape = self.template.with_positions(&points)?;
        shape.check_in(self.surface)?;
        let sdot: Vec<TangentVector> = sens
            .iter()
            .map(|j| j[0] * sigma_dot[0] + j[1] * sigma_dot[1])
            .collect();
        let omega = rigid_velocity(self.surface, &self.ks, &shape, &sdot)?;
        Ok((shape, sdot, omega))
    }

    /// Lab positions and velocities of a body-frame state.
    fn lab(
        &self,
        g: &Isometry,
        shape: &Body,
        sdot: &[TangentVector],
        omega: [f64; 3],
    ) -> Result<(Body, Vec<TangentVector>)> {
        let alg = RigidAlgebra::new(omega);
        let r = self.surface.metric_parameter();
        let mut points = Vec::with_capacity(shape.len());
        let mut velocities = Vec::with_capacity(shape.len());
        for (p, w) in shape.positions().iter().zip(sdot) {
            points.push(g.apply(*p));
            velocities.push(g.push_forward(*p, alg.field_at(r, *p) + *w));
        }
        let lab = shape.with_positions(&points)?;
        lab.check_in(self.surface)?;
        Ok((lab, velocities))
    }
}

struct Accumulator {
    record: bool,
    times: Vec<f64>,
    positions: Vec<Vec<ChartPoint>>,
    rigid: Vec<Isometry>,
    momentum: Vec<[f64; 3]>,
    max_rel: f64,
}

impl Accumulator {
    fn new(record: bool) -> Self {
        Self {
            record,
            times: Vec::new(),
            positions: Vec::new(),
            rigid: Vec::new(),
            momentum: Vec::new(),
            max_rel: 0.0,
        }
    }

    fn push(&mut self, t: f64, lab: &Body, g: &Isometry, p: [f64; 3], rel: f64) {
        self.max_rel = self.max_rel.max(rel);
        self.momentum.push(p);
        if self.record {
            self.times.push(t);
            self.positions.push(lab.positions());
            self.rigid.push(*g);
        }
    }

    fn finish(
        self,
        transport: Transport,
        steps: usize,
        g: Isometry,
        closure_residual: f64,
    ) -> TrajectoryRecord {
        TrajectoryRecord {
            transport,
            steps,
            times: self.times,
            positions: self.positions,
            rigid: self.rigid,
            momentum: self.momentum,
            max_relative_momentum: self.max_rel,
            final_rigid: g,
            delta_tau: g.log(),
            net_translation: g.translation(),
            net_rotation: g.frame_angle(),
            closure_residual,
        }
    }
}

fn closure(start: &Body, end: &Body, g: &Isometry) -> f64 {
    start
        .positions()
        .iter()
        .zip(end.positions())
        .map(|(p, q)| {
            let expected = g.apply(*p);
            (expected.x - q.x).hypot(expected.y - q.y)
        })
        .fold(0.0, f64::max)
}

/// Runs one stroke from `body` and returns the accumulated rigid motion.
pub fn integrate_stroke(
    body: &Body,
    surface: &Surface,
    fields: &[VectorField; 2],
    stroke: &Stroke,
    options: &IntegratorOptions,
) -> Result<TrajectoryRecord> {
    stroke.validate()?;
    body.check_in(surface)?;
    if options.shape_substeps == 0 {
        return Err(SwimError::InvalidStroke("shape_substeps must be positive".into()));
    }
    match options.transport {
        Transport::Body => integrate_body_frame(body, surface, fields, stroke, options),
        Transport::Lab => integrate_lab_frame(body, surface, fields, stroke, options),
    }
}

fn integrate_body_frame(
    body: &Body,
    surface: &Surface,
    fields: &[VectorField; 2],
    stroke: &Stroke,
    options: &IntegratorOptions,
) -> Result<TrajectoryRecord> {
    let frame = BodyFrame {
        surface,
        ks: surface.killing_fields(),
        template: body,
        shape: ShapeMap {
            start: body.positions(),
            fields,
            substeps: options.shape_substeps,
        },
        stroke,
    };
    let r = surface.metric_parameter();
    let n = stroke.steps;
    let h = 1.0 / n as f64;
    let mut g = Isometry::identity(surface);
    let mut acc = Accumulator::new(options.record_trajectory);

    let (shape, sdot, omega) = frame.state(0.0, Side::After)?;
    let (lab, vel) = frame.lab(&g, &shape, &sdot, omega)?;
    let (p, rel) = momentum_check(surface, &frame.ks, &lab, &vel)?;
    acc.push(0.0, &lab, &g, p, rel);

    let mut last_lab = lab;
    for i in 0..n {
        let t0 = i as f64 * h;
        let mut nodes = [RigidAlgebra::default(); 2];
        for (slot, c) in nodes.iter_mut().zip(magnus::GAUSS_NODES) {
            *slot = RigidAlgebra::new(frame.state(t0 + c * h, Side::After)?.2);
        }
        g = magnus::right_gauss_step(r, &g, &nodes[0], &nodes[1], h);
        let t1 = if i + 1 == n { 1.0 } else { (i + 1) as f64 * h };
        let (shape, sdot, omega) = frame.state(t1, Side::Before)?;
        let (lab, vel) = frame.lab(&g, &shape, &sdot, omega)?;
        let (p, rel) = momentum_check(surface, &frame.ks, &lab, &vel)?;
        acc.push(t1, &lab, &g, p, rel);
        last_lab = lab;
    }
    let residual = closure(body, &last_lab, &g);
    Ok(acc.finish(Transport::Body, n, g, residual))
}

fn integrate_lab_frame(
    body: &Body,
    surface: &Surface,
    fields: &[VectorField; 2],
    stroke: &Stroke,
    options: &IntegratorOptions,
) -> Result<TrajectoryRecord> {
    let ks = surface.killing_fields();
    let r = surface.metric_parameter();
    let velocity = |state: &Body, t: f64, side: Side| -> Result<(Vec<TangentVector>, [f64; 3])> {
        state.check_in(surface)?;
        let sigma_dot = stroke.sigma_dot(t, side);
        let w: Vec<TangentVector> = state
            .positions()
            .iter()
            .map(|&p| fields[0].value(p) * sigma_dot[0] + fields[1].value(p) * sigma_dot[1])
            .collect();
        let tau = rigid_velocity(surface, &ks, state, &w)?;
        let alg = RigidAlgebra::new(tau);
        let v = state
            .positions()
            .iter()
            .zip(&w)
            .map(|(&p, &wi)| wi + alg.field_at(r, p))
            .collect();
        Ok((v, tau))
    };
    let shifted = |state: &Body, k: &[TangentVector], c: f64| -> Result<Body> {
        let moved: Vec<ChartPoint> = state
            .positions()
            .iter()
            .zip(k)
            .map(|(p, v)| p.offset(*v, c))
            .collect();
        state.with_positions(&moved)
    };

    let n = stroke.steps;
    let h = 1.0 / n as f64;
    let mut g = Isometry::identity(surface);
    let mut state = body.clone();
    let mut acc = Accumulator::new(options.record_trajectory);
    let (v0, _) = velocity(&state, 0.0, Side::After)?;
    let (p, rel) = momentum_check(surface, &ks, &state, &v0)?;
    acc.push(0.0, &state, &g, p, rel);

    for i in 0..n {
        let t0 = i as f64 * h;
        let (k1, a1) = velocity(&state, t0, Side::After)?;
        let (k2, a2) = velocity(&shifted(&state, &k1, 0.5 * h)?, t0 + 0.5 * h, Side::After)?;
        let (k3, a3) = velocity(&shifted(&state, &k2, 0.5 * h)?, t0 + 0.5 * h, Side::After)?;
        let (k4, a4) = velocity(&shifted(&state, &k3, h)?, t0 + h, Side::Before)?;
        let combined: Vec<TangentVector> = (0..state.len())
            .map(|m| k1[m] + k2[m] * 2.0 + k3[m] * 2.0 + k4[m])
            .collect();
        state = shifted(&state, &combined, h / 6.0)?;
        let mid = RigidAlgebra::new(a2).plus(&RigidAlgebra::new(a3)).scaled(0.5);
        g = magnus::left_simpson_step(
            r,
            &g,
            &RigidAlgebra::new(a1),
            &mid,
            &RigidAlgebra::new(a4),
            h,
        );
        let t1 = if i + 1 == n { 1.0 } else { (i + 1) as f64 * h };
        let (v, _) = velocity(&state, t1, Side::Before)?;
        let (p, rel) = momentum_check(surface, &ks, &state, &v)?;
        acc.push(t1, &state, &g, p, rel);
    }
    let residual = closure(body, &state, &g);
    Ok(acc.finish(Transport::Lab, n, g, residual))
}

/// Loop shapes used by [`convergence_study`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrokeFamily {
    Square,
    Circle,
}

impl StrokeFamily {
    pub fn stroke(self, area: f64, steps: usize) -> Stroke {
        match self {
            StrokeFamily::Square => Stroke::square(area, steps),
            StrokeFamily::Circle => Stroke::circle(area, steps),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub area: f64,
    pub dx_integrated: f64,
    pub dx_formula: f64,
    /// `dx_integrated / dx_formula`; 1 when both vanish.
    pub ratio: f64,
    /// Both values below `1e-12 · area`.
    pub exact_zero: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Empirical order of `|ratio − 1|` in the linear stroke size, between
    /// consecutive rows.
    pub defect_orders: Vec<f64>,
}

/// Compares integrated strokes of decreasing area with the infinitesimal
/// formula. `dx` is the x-component of the net translation.
pub fn convergence_study(
    body: &Body,
    surface: &Surface,
    fields: &[VectorField; 2],
    family: StrokeFamily,
    areas: &[f64],
    steps: usize,
    options: &IntegratorOptions,
) -> Result<ConvergenceStudy> {
    let options = IntegratorOptions {
        record_trajectory: false,
        ..options.clone()
    };
    let per_area = holonomy_general(body, surface, &fields[0], &fields[1], 1.0)?;
    let mut rows = Vec::with_capacity(areas.len());
    for &area in areas {
        let stroke = family.stroke(area, steps);
        let record = integrate_stroke(body, surface, fields, &stroke, &options)?;
        let dx_integrated = record.net_translation.x;
        let dx_formula = per_area.delta_tau[0] * area;
        let floor = 1e-12 * area.abs();
        let exact_zero = dx_integrated.abs() < floor && dx_formula.abs() < floor;
        let ratio = if exact_zero {
            1.0
        } else {
            dx_integrated / dx_formula
        };
        rows.push(ConvergenceRow {
            area,
            dx_integrated,
            dx_formula,
            ratio,
            exact_zero,
        });
    }
    let defect_orders = rows
        .windows(2)
        .map(|w| {
            let d0 = (w[0].ratio - 1.0).abs();
            let d1 = (w[1].ratio - 1.0).abs();
            (d0 / d1).ln() / (w[0].area / w[1].area).abs().sqrt().ln()
        })
        .collect();
    Ok(ConvergenceStudy {
        rows,
        defect_orders,
    })
}

/// Direct solve helper exposed for diagnostics: `τ̇` for given velocities.
pub fn rigid_rate(body: &Body, surface: &Surface, velocities: &[TangentVector]) -> Result<[f64; 3]> {
    rigid_velocity(surface, &surface.killing_fields(), body, velocities)
}
