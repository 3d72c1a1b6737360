//! The invariant suite behind `curvswim check`.
//!
//! Each check returns a short detail line. Random bodies come from a seeded
//! ChaCha stream, so a given seed always runs the same cases.

use curvswim::geometry::{numeric_exterior_derivative, translation_killing_approx, KillingSet};
use curvswim::integrator::{integrate_stroke, IntegratorOptions, Stroke, DEFAULT_STEPS};
use curvswim::scenarios::{
    baron_cat_report, ring_displacement, triangle_body, triangle_fields,
    triangle_swim_coefficient, RingSpec, TriangleSpec, LINEAR_PAIRS,
};
use curvswim::{
    gauge_fixed_linear_deformation, holonomy_general, holonomy_linear, holonomy_small_swimmer,
    Body, ChartPoint, CurvatureTensor, FieldTag, Isometry, KillingIndex, QuadraticField, Surface,
    VectorField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{sweep, SweepVariable};
use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Perturbs the first Killing field so that the Killing check must fail.
    pub fault_injection: bool,
    /// Only run checks that live on the flat plane.
    pub flat_only: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            fault_injection: false,
            flat_only: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

type CheckFn = fn(&CheckOptions) -> Result<String, String>;

pub struct Check {
    pub name: &'static str,
    pub flat: bool,
    run: CheckFn,
}

impl Check {
    pub fn run(&self, opts: &CheckOptions) -> CheckOutcome {
        let (passed, detail) = match (self.run)(opts) {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        CheckOutcome {
            name: self.name,
            passed,
            detail,
        }
    }
}

/// The twelve acceptance criteria, in order.
pub fn criteria() -> Vec<Check> {
    vec![
        Check { name: "1 killing-validity", flat: false, run: killing_validity },
        Check { name: "2 two-form-closed-form", flat: false, run: two_form_closed_form },
        Check { name: "3 curvature-consistency", flat: false, run: curvature_consistency },
        Check { name: "4 baron-and-cat", flat: true, run: baron_and_cat },
        Check { name: "5 triangle-optimum", flat: true, run: triangle_optimum },
        Check { name: "6 formula-vs-integrator", flat: false, run: formula_vs_integrator },
        Check { name: "7 sign-flip", flat: false, run: sign_flip },
        Check { name: "8 null-results", flat: false, run: null_results },
        Check { name: "9 cubic-scaling", flat: false, run: cubic_scaling },
        Check { name: "10 formula-cross-agreement", flat: false, run: cross_agreement },
        Check { name: "11 ring-swimmer", flat: true, run: ring_swimmer },
        Check { name: "12 sweep-determinism", flat: false, run: sweep_determinism },
    ]
}

/// Module invariants beyond the acceptance criteria.
pub fn invariants() -> Vec<Check> {
    vec![
        Check { name: "isometries-preserve-distance", flat: false, run: isometry_invariants },
        Check { name: "gram-symmetric-positive", flat: false, run: gram_invariants },
        Check { name: "flat-two-forms", flat: true, run: flat_two_forms },
    ]
}

pub fn run_suite(opts: &CheckOptions) -> Vec<CheckOutcome> {
    criteria()
        .into_iter()
        .chain(invariants())
        .filter(|c| c.flat || !opts.flat_only)
        .map(|c| c.run(opts))
        .collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rng(opts: &CheckOptions, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(opts.seed);
    r.set_stream(stream);
    r
}

const CURVATURES: [f64; 4] = [-1.0, -0.25, 0.25, 1.0];

fn grid_5x5() -> impl Iterator<Item = ChartPoint> {
    (0..5).flat_map(|i| (0..5).map(move |j| ChartPoint::new(-0.6 + 0.3 * i as f64, -0.6 + 0.3 * j as f64)))
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> ChartPoint {
    loop {
        let p = ChartPoint::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius));
        if p.norm() < radius {
            return p;
        }
    }
}

/// `n` random particles moved to balanced principal axes on the plane.
fn random_normal_body(rng: &mut ChaCha8Rng, n: usize) -> Result<Body, String> {
    let triples: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            [
                rng.random_range(0.5..2.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]
        })
        .collect();
    let body = Body::from_triples(&triples).map_err(err)?;
    Ok(body.normalized(&Surface::flat()).map_err(err)?.0)
}

fn gauge_pair(body: &Body, p: (usize, usize), q: (usize, usize)) -> Result<(VectorField, VectorField), String> {
    Ok((
        gauge_fixed_linear_deformation(body, p.0, p.1).map_err(err)?,
        gauge_fixed_linear_deformation(body, q.0, q.1).map_err(err)?,
    ))
}

fn killing_set(surface: &Surface, fault: bool) -> KillingSet {
    let mut ks = surface.killing_fields();
    if fault {
        let bump = QuadraticField {
            quadratic: [[[1e-3, 0.0], [0.0, 0.0]], [[0.0; 2]; 2]],
            ..QuadraticField::zero()
        };
        let bump = VectorField::quadratic(bump, FieldTag::Custom("fault".into()));
        ks.fields[0] = ks.fields[0].plus_scaled(1.0, &bump);
    }
    ks
}

fn killing_validity(opts: &CheckOptions) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for r in CURVATURES {
        let s = Surface::new(r).map_err(err)?;
        let ks = killing_set(&s, opts.fault_injection);
        for p in grid_5x5() {
            for f in ks.iter() {
                worst = worst.max(s.killing_residual(f, p).map_err(err)?);
            }
        }
    }
    let detail = format!("max residual {worst:.3e} over 5x5 grid, R in {CURVATURES:?}");
    if worst < 1e-8 { Ok(detail) } else { Err(detail) }
}

fn two_form_closed_form(opts: &CheckOptions) -> Result<String, String> {
    let mut rng = rng(opts, 2);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let s = Surface::new(CURVATURES[i % 4]).map_err(err)?;
        let p = random_point(&mut rng, 0.6);
        for index in KillingIndex::ALL {
            let numeric = numeric_exterior_derivative(
                &s,
                |q| s.killing_one_form(index, q).expect("inside the chart"),
                p,
                Some(1e-5),
            )
            .map_err(err)?;
            let closed = s.killing_two_form(index, p).map_err(err)?;
            worst = worst.max((numeric - closed).abs());
        }
    }
    let flat = Surface::flat();
    let mut exact = true;
    for _ in 0..20 {
        let p = random_point(&mut rng, 5.0);
        exact &= flat.killing_two_form(KillingIndex::TranslationX, p).map_err(err)? == 0.0;
        exact &= flat.killing_two_form(KillingIndex::TranslationY, p).map_err(err)? == 0.0;
        exact &= flat.killing_two_form(KillingIndex::Rotation, p).map_err(err)? == 2.0;
    }
    let detail = format!("max |FD - closed| {worst:.3e} at 20 points; flat forms exact: {exact}");
    if worst < 1e-6 && exact { Ok(detail) } else { Err(detail) }
}

fn curvature_consistency(_: &CheckOptions) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for r in CURVATURES {
        let s = Surface::new(r).map_err(err)?;
        for p in grid_5x5() {
            let k = s.gaussian_curvature_at(p).map_err(err)?;
            worst = worst.max((k / (4.0 * r) - 1.0).abs());
        }
    }
    // Curl of the approximate translation field against the exact two-form.
    let sphere = Surface::new(1.0).map_err(err)?;
    let approx = translation_killing_approx(&CurvatureTensor::constant_curvature(2, 4.0), 1).map_err(err)?;
    let defects: Vec<f64> = [1.0, 0.5, 0.25, 0.125]
        .iter()
        .map(|&t| {
            let p = ChartPoint::new(0.05 * t, 0.2 * t);
            let j = approx.jacobian(p);
            let curl = j[1][0] - j[0][1];
            let exact = sphere
                .killing_two_form(KillingIndex::TranslationX, p)
                .expect("inside the chart");
            (curl / exact - 1.0).abs()
        })
        .collect();
    let ratios: Vec<f64> = defects.windows(2).map(|w| w[0] / w[1]).collect();
    let quadratic = ratios.iter().all(|r| (3.0..5.0).contains(r));
    let detail = format!(
        "max |K/4R - 1| {worst:.3e}; approximate two-form defects {}, halving ratios {ratios:.3?}",
        defects.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(" ")
    );
    if worst < 1e-10 && quadratic { Ok(detail) } else { Err(detail) }
}

fn baron_and_cat(opts: &CheckOptions) -> Result<String, String> {
    let mut rng = rng(opts, 4);
    let flat = Surface::flat();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(3..=6);
        let body = random_normal_body(&mut rng, n)?;
        let (p, q) = LINEAR_PAIRS[rng.random_range(0..LINEAR_PAIRS.len())];
        let (u, v) = gauge_pair(&body, p, q)?;
        let h = holonomy_general(&body, &flat, &u, &v, 1.0).map_err(err)?;
        worst = worst.max(h.translation()[0].abs()).max(h.translation()[1].abs());
    }
    let cat = Body::from_triples(&[[1.0, 0.9, 0.1], [2.0, -0.3, 0.5], [1.5, -0.2, -0.7]]).map_err(err)?;
    let report = baron_cat_report(&cat).map_err(err)?;
    let turns = report
        .outcomes
        .iter()
        .map(|o| o.rotation.abs())
        .fold(0.0, f64::max);
    let detail = format!("max |translation| {worst:.3e} over 100 bodies; cat max |rotation| {turns:.3e}");
    if worst < 1e-12 && turns > 1e-6 { Ok(detail) } else { Err(detail) }
}

fn triangle_config(r: f64, amplitude: f64, steps: usize) -> Result<RunConfig, String> {
    RunConfig::from_json(&format!(
        r#"{{
            "schema": "curvswim/1",
            "surface": {{"R": {r:e}}},
            "body": {{"scenario": {{"triangle": {{"M": 1.0, "m": 0.25, "h": 1.0, "b": 1.0}}}}}},
            "fields": ["linear:11", "linear:22"],
            "stroke": {{"type": "rectangle", "amplitudes": [{amplitude:e}, {amplitude:e}], "steps": {steps}}}
        }}"#
    ))
    .map_err(err)
}

fn triangle_optimum(_: &CheckOptions) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut bounded = true;
    for (mm, h, b) in [(1.0, 1.0, 1.0), (2.5, 0.7, 1.3), (8.0, 2.0, 0.5)] {
        let best = TriangleSpec::new(mm, 0.25 * mm, h, b).map_err(err)?;
        let bound = 0.5 * h * b * b;
        worst = worst.max((triangle_swim_coefficient(&best) - bound).abs());
        for i in 1..100 {
            let t = TriangleSpec { base_mass: mm * 0.005 * i as f64, ..best };
            bounded &= triangle_swim_coefficient(&t) <= bound + 1e-12;
        }
    }
    // Formula sweep at small R L², where the curvature formula holds.
    let cfg = triangle_config(0.01, 0.01, 8)?;
    let values: Vec<f64> = (2..=9).map(|i| 0.05 * i as f64).collect();
    let csv = sweep(&cfg, SweepVariable::M, &values, None).map_err(err)?;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for line in csv.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').skip(1).map(|c| c.parse().unwrap_or(f64::NAN)).collect();
        if cells[1] > best.1 {
            best = (cells[0], cells[1]);
        }
    }
    let detail = format!(
        "max |c(M/4) - hb²/2| {worst:.1e}; bound holds: {bounded}; sweep argmax m = {}",
        best.0
    );
    if worst < 1e-12 && bounded && (best.0 - 0.25).abs() < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `(dx_integrated, dx_formula, max relative momentum)` for the projected
/// unit triangle and a square stroke.
fn triangle_run(r: f64, area: f64) -> Result<(f64, f64, f64), String> {
    let t = TriangleSpec::unit();
    let s = Surface::new(r).map_err(err)?;
    let body = triangle_body(&t).map_err(err)?;
    let fields = triangle_fields(&t, &s).map_err(err)?;
    let options = IntegratorOptions { record_trajectory: false, ..Default::default() };
    let rec = integrate_stroke(&body, &s, &fields, &Stroke::square(area, DEFAULT_STEPS), &options)
        .map_err(err)?;
    let formula = holonomy_general(&body, &s, &fields[0], &fields[1], area).map_err(err)?;
    Ok((rec.net_translation.x, formula.delta_tau[0], rec.max_relative_momentum))
}

fn formula_vs_integrator(_: &CheckOptions) -> Result<String, String> {
    let (i4, f4, p4) = triangle_run(1.0, 1e-4)?;
    let (i5, f5, p5) = triangle_run(1.0, 1e-5)?;
    let (d4, d5) = ((i4 / f4 - 1.0).abs(), (i5 / f5 - 1.0).abs());
    let momentum = p4.max(p5);
    let detail = format!(
        "|ratio - 1| = {d4:.3e} at dA=1e-4, {d5:.3e} at dA=1e-5; max momentum residual {momentum:.1e}"
    );
    if d4 < 0.05 && d5 < 0.01 && momentum < 1e-12 { Ok(detail) } else { Err(detail) }
}

fn sign_flip(_: &CheckOptions) -> Result<String, String> {
    let body = triangle_body(&TriangleSpec::unit()).map_err(err)?;
    let plus = CurvatureTensor::constant_curvature(2, 4.0);
    let minus = CurvatureTensor::constant_curvature(2, -4.0);
    let mut exact = true;
    for (p, q) in LINEAR_PAIRS {
        let (u, v) = gauge_pair(&body, p, q)?;
        let a = holonomy_small_swimmer(&body, &plus, &u, &v, 1e-5).map_err(err)?;
        let b = holonomy_small_swimmer(&body, &minus, &u, &v, 1e-5).map_err(err)?;
        exact &= a == b.map(|x| -x);
        let a = holonomy_linear(&body, &plus, p, q, 1e-5).map_err(err)?;
        let b = holonomy_linear(&body, &minus, p, q, 1e-5).map_err(err)?;
        exact &= a == b.map(|x| -x);
    }
    // The finite body swims an amount even in R at relative order R L², so
    // the integrator comparison runs where R L² is small.
    let r = 1e-7;
    let (a, _, _) = triangle_run(r, 1e-5)?;
    let (b, _, _) = triangle_run(-r, 1e-5)?;
    let rel = ((a + b) / a).abs();
    let (big_a, _, _) = triangle_run(1.0, 1e-5)?;
    let (big_b, _, _) = triangle_run(-1.0, 1e-5)?;
    let big = ((big_a + big_b) / big_a).abs();
    let detail = format!(
        "formula paths exact: {exact}; integrator |dx(R)+dx(-R)|/|dx(R)| = {rel:.3e} at R=1e-7 (for reference {big:.3e} at R=1)"
    );
    if exact && rel < 1e-6 { Ok(detail) } else { Err(detail) }
}

fn null_results(opts: &CheckOptions) -> Result<String, String> {
    let mut rng = rng(opts, 8);
    let c = CurvatureTensor::constant_curvature(2, 4.0);
    let mut symmetric: f64 = 0.0;
    let mut degenerate: f64 = 0.0;
    for _ in 0..20 {
        // Inversion-symmetric: particles in pairs at ±p.
        let mut triples = Vec::new();
        for _ in 0..rng.random_range(2..=4) {
            let m = rng.random_range(0.5..2.0);
            let (x, y) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            triples.push([m, x, y]);
            triples.push([m, -x, -y]);
        }
        let body = Body::from_triples(&triples).map_err(err)?;
        let (body, _) = body.normalized(&Surface::flat()).map_err(err)?;
        for (p, q) in LINEAR_PAIRS {
            let (u, v) = gauge_pair(&body, p, q)?;
            let direct = holonomy_small_swimmer(&body, &c, &u, &v, 1.0).map_err(err)?;
            let linear = holonomy_linear(&body, &c, p, q, 1.0).map_err(err)?;
            for x in direct.iter().chain(&linear) {
                symmetric = symmetric.max(x.abs());
            }
        }
        // Needle (collinear) and two-particle bodies.
        let (dx, dy) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let needle: Vec<[f64; 3]> = (0..rng.random_range(3..=5))
            .map(|_| {
                let t = rng.random_range(-1.0..1.0);
                [rng.random_range(0.5..2.0), t * dx, t * dy]
            })
            .collect();
        let pair = [
            [rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            [rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        ];
        for triples in [needle, pair.to_vec()] {
            let body = Body::from_triples(&triples).map_err(err)?;
            let (body, _) = body.normalized(&Surface::flat()).map_err(err)?;
            for (p, q) in LINEAR_PAIRS {
                let dx = holonomy_linear(&body, &c, p, q, 1.0).map_err(err)?;
                degenerate = degenerate.max(dx[0].abs()).max(dx[1].abs());
            }
        }
    }
    let detail = format!(
        "inversion-symmetric max |dx| {symmetric:.3e}; needle and two-particle max |dx| {degenerate:.3e}"
    );
    if symmetric < 1e-12 && degenerate < 1e-12 { Ok(detail) } else { Err(detail) }
}

fn cubic_scaling(opts: &CheckOptions) -> Result<String, String> {
    let mut rng = rng(opts, 9);
    let c = CurvatureTensor::constant_curvature(2, 4.0);
    let mut exact = true;
    let mut cases = 0;
    for _ in 0..10 {
        let body = random_normal_body(&mut rng, 4)?;
        let (u, v) = gauge_pair(&body, (1, 1), (1, 2))?;
        let base = holonomy_small_swimmer(&body, &c, &u, &v, 1.0).map_err(err)?;
        for lambda in [0.5, 2.0] {
            let scaled = body.scaled(lambda).map_err(err)?;
            let (u, v) = gauge_pair(&scaled, (1, 1), (1, 2))?;
            let dx = holonomy_small_swimmer(&scaled, &c, &u, &v, 1.0).map_err(err)?;
            exact &= dx == base.map(|x| x * lambda * lambda * lambda);
            cases += 1;
        }
    }
    let detail = format!("{cases} scaled bodies, all exactly λ³: {exact}");
    if exact { Ok(detail) } else { Err(detail) }
}

fn cross_agreement(opts: &CheckOptions) -> Result<String, String> {
    let mut rng = rng(opts, 10);
    let c = CurvatureTensor::constant_curvature(2, 4.0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(3..=6);
        let body = random_normal_body(&mut rng, n)?;
        let (p, q) = LINEAR_PAIRS[rng.random_range(0..LINEAR_PAIRS.len())];
        let (u, v) = gauge_pair(&body, p, q)?;
        let direct = holonomy_small_swimmer(&body, &c, &u, &v, 1.0).map_err(err)?;
        let linear = holonomy_linear(&body, &c, p, q, 1.0).map_err(err)?;
        for k in 0..2 {
            worst = worst.max((direct[k] - linear[k]).abs());
        }
    }
    let detail = format!("max |C-tensor - direct| {worst:.3e} over 50 bodies");
    if worst < 1e-10 { Ok(detail) } else { Err(detail) }
}

/// Event-driven two-piece simulation on a ring: piece 1 leaves at unit
/// speed, piece 2 at the speed cancelling the momentum, until the pieces
/// meet again.
pub fn simulate_ring(ring: &RingSpec) -> f64 {
    let l = ring.circumference;
    let v1 = 1.0;
    let v2 = -ring.m1 * v1 / ring.m2;
    let dt = l / 64.0;
    let (mut x1, mut x2) = (0.0f64, 0.0f64);
    loop {
        let gap = x1 - x2;
        if gap + (v1 - v2) * dt >= l {
            let tau = (l - gap) / (v1 - v2);
            return (x1 + v1 * tau).rem_euclid(l);
        }
        x1 += v1 * dt;
        x2 += v2 * dt;
    }
}

fn ring_swimmer(opts: &CheckOptions) -> Result<String, String> {
    let mut rng = rng(opts, 11);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let ring = RingSpec::new(
            rng.random_range(0.5..5.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
        )
        .map_err(err)?;
        worst = worst.max((simulate_ring(&ring) - ring_displacement(&ring)).abs());
    }
    let even = RingSpec::new(3.0, 1.7, 1.7).map_err(err)?;
    let half = ring_displacement(&even) == 1.5;
    let detail = format!("max |formula - simulation| {worst:.3e} over 20 rings; equal masses give ℓ/2: {half}");
    if worst < 1e-10 && half { Ok(detail) } else { Err(detail) }
}

/// The sweep used for the determinism check.
pub fn determinism_sweep() -> Result<String, String> {
    let cfg = triangle_config(1.0, 0.01, 64)?;
    sweep(&cfg, SweepVariable::Area, &[1e-4, 1e-5, 3e-5, 1e-4], None).map_err(err)
}

fn sweep_determinism(_: &CheckOptions) -> Result<String, String> {
    let a = determinism_sweep()?;
    let b = determinism_sweep()?;
    let detail = format!("{} bytes, identical: {}", a.len(), a == b);
    if a == b { Ok(detail) } else { Err(detail) }
}

fn isometry_invariants(opts: &CheckOptions) -> Result<String, String> {
    let mut rng = rng(opts, 20);
    let mut worst: f64 = 0.0;
    for r in CURVATURES {
        let s = Surface::new(r).map_err(err)?;
        for _ in 0..10 {
            let tau = [
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
                rng.random_range(-3.0..3.0),
            ];
            let g = Isometry::exp_rigid(&s, tau);
            let (p, q) = (random_point(&mut rng, 0.4), random_point(&mut rng, 0.4));
            let before = s.geodesic_distance(p, q).map_err(err)?;
            let after = s.geodesic_distance(g.apply(p), g.apply(q)).map_err(err)?;
            worst = worst.max((before - after).abs());
            let back = Isometry::exp_rigid(&s, g.log());
            worst = worst.max(back.distance_to(&g));
        }
    }
    let detail = format!("max distance or exp/log defect {worst:.3e}");
    if worst < 1e-12 { Ok(detail) } else { Err(detail) }
}

fn gram_invariants(_: &CheckOptions) -> Result<String, String> {
    let body = triangle_body(&TriangleSpec::unit()).map_err(err)?;
    let mut ok = true;
    let mut smallest = f64::INFINITY;
    for r in CURVATURES {
        let s = Surface::new(r).map_err(err)?;
        let g = curvswim::gram_matrix(&body, &s, &s.killing_fields());
        ok &= (g - g.transpose()).abs().max() < 1e-15;
        let eig = g.symmetric_eigen().eigenvalues.min();
        smallest = smallest.min(eig);
    }
    let detail = format!("symmetric: {ok}; smallest eigenvalue {smallest:.3e}");
    if ok && smallest > 0.0 { Ok(detail) } else { Err(detail) }
}

fn flat_two_forms(opts: &CheckOptions) -> Result<String, String> {
    let mut rng = rng(opts, 21);
    let flat = Surface::flat();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = random_point(&mut rng, 3.0);
        for (index, expected) in [
            (KillingIndex::TranslationX, 0.0),
            (KillingIndex::TranslationY, 0.0),
            (KillingIndex::Rotation, 2.0),
        ] {
            let numeric = numeric_exterior_derivative(
                &flat,
                |q| flat.killing_one_form(index, q).expect("plane has no boundary"),
                p,
                None,
            )
            .map_err(err)?;
            worst = worst.max((numeric - expected).abs());
        }
    }
    let detail = format!("max |FD - exact| {worst:.3e}");
    if worst < 1e-8 { Ok(detail) } else { Err(detail) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_injection_breaks_the_killing_check() {
        let faulty = CheckOptions { fault_injection: true, ..Default::default() };
        assert!(killing_validity(&faulty).is_err());
        assert!(killing_validity(&CheckOptions::default()).is_ok());
    }

    #[test]
    fn ring_simulation_matches_examples() {
        let r = RingSpec::new(1.0, 1.0, 3.0).unwrap();
        assert!((simulate_ring(&r) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn flat_subset_passes() {
        let opts = CheckOptions { flat_only: true, ..Default::default() };
        let outcomes = run_suite(&opts);
        assert!(outcomes.iter().any(|o| o.name.contains("baron")));
        assert!(outcomes.iter().all(|o| o.passed), "{outcomes:?}");
    }
}
