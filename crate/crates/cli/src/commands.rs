use std::str::FromStr;

use curvswim::integrator::{integrate_stroke, IntegratorOptions, Stroke, StrokePath};
use curvswim::scenarios::{
    rectangle_stroke_distance, ring_displacement, triangle_body, triangle_optimal_mass,
    triangle_swim_coefficient, RingSpec, TriangleSpec,
};
use curvswim::{holonomy_general, Surface};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::record::{sci, sci_array, to_csv, to_json, Sci};

#[derive(Debug, Serialize)]
pub struct HolonomyRecord {
    pub surface_r: Sci,
    pub area: Sci,
    pub delta_tau: [Sci; 3],
    pub per_unit_area: [Sci; 3],
    pub gram_condition: Sci,
    pub gram_rank: usize,
    pub gauge_residuals: [[Sci; 3]; 2],
}

pub fn holonomy(cfg: &RunConfig) -> Result<HolonomyRecord, CliError> {
    let surface = cfg.surface()?;
    let body = cfg.body()?;
    let [u, v] = cfg.fields(&body, &surface)?;
    let area = cfg.stroke(None)?.signed_area();
    let h = holonomy_general(&body, &surface, &u, &v, area)?;
    Ok(HolonomyRecord {
        surface_r: Sci(surface.metric_parameter()),
        area: Sci(area),
        delta_tau: sci_array(h.delta_tau),
        per_unit_area: sci_array(h.per_unit_area()),
        gram_condition: Sci(h.gram_condition),
        gram_rank: h.gram_rank,
        gauge_residuals: h.gauge_residuals.map(sci_array),
    })
}

pub fn render_holonomy(r: &HolonomyRecord, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => Ok(to_csv(
            &["R", "area", "tau_x", "tau_y", "tau_rot", "gram_condition", "gram_rank"],
            &[vec![
                sci(r.surface_r.0),
                sci(r.area.0),
                sci(r.delta_tau[0].0),
                sci(r.delta_tau[1].0),
                sci(r.delta_tau[2].0),
                sci(r.gram_condition.0),
                r.gram_rank.to_string(),
            ]],
        )),
    }
}

#[derive(Debug, Serialize)]
pub struct IntegrateRecord {
    pub surface_r: Sci,
    pub transport: &'static str,
    pub steps: usize,
    pub area: Sci,
    pub delta_tau: [Sci; 3],
    pub net_translation: [Sci; 2],
    pub net_rotation: Sci,
    pub dx_formula: Sci,
    pub ratio: Sci,
    pub max_relative_momentum: Sci,
    pub closure_residual: Sci,
}

/// Integrates the configured stroke. With `Format::Csv` the full trajectory
/// is returned instead of the summary.
pub fn integrate(cfg: &RunConfig, steps: Option<usize>, format: Format) -> Result<String, CliError> {
    let surface = cfg.surface()?;
    let body = cfg.body()?;
    let fields = cfg.fields(&body, &surface)?;
    let stroke = cfg.stroke(steps)?;
    let options = IntegratorOptions {
        transport: cfg.transport.into(),
        record_trajectory: format == Format::Csv,
        ..Default::default()
    };
    let rec = integrate_stroke(&body, &surface, &fields, &stroke, &options)?;
    if format == Format::Csv {
        let mut buf = Vec::new();
        rec.write_csv(&mut buf)
            .map_err(|e| CliError::Output(e.to_string()))?;
        return String::from_utf8(buf).map_err(|e| CliError::Output(e.to_string()));
    }
    let area = stroke.signed_area();
    let formula = holonomy_general(&body, &surface, &fields[0], &fields[1], area)?;
    let dx_formula = formula.delta_tau[0];
    let summary = IntegrateRecord {
        surface_r: Sci(surface.metric_parameter()),
        transport: match rec.transport {
            curvswim::Transport::Body => "body",
            curvswim::Transport::Lab => "lab",
        },
        steps: rec.steps,
        area: Sci(area),
        delta_tau: sci_array(rec.delta_tau),
        net_translation: sci_array([rec.net_translation.x, rec.net_translation.y]),
        net_rotation: Sci(rec.net_rotation),
        dx_formula: Sci(dx_formula),
        ratio: Sci(ratio(rec.net_translation.x, dx_formula, area)),
        max_relative_momentum: Sci(rec.max_relative_momentum),
        closure_residual: Sci(rec.closure_residual),
    };
    to_json(&summary)
}

/// `integrated / formula`, or 1 when both vanish at the `1e-12 · area` level.
fn ratio(integrated: f64, formula: f64, area: f64) -> f64 {
    let floor = 1e-12 * area.abs();
    if integrated.abs() < floor && formula.abs() < floor {
        1.0
    } else {
        integrated / formula
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepVariable {
    Area,
    M,
    R,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Area => "area",
            SweepVariable::M => "m",
            SweepVariable::R => "R",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "area" => Ok(SweepVariable::Area),
            "m" => Ok(SweepVariable::M),
            "R" | "r" => Ok(SweepVariable::R),
            other => Err(CliError::Config(format!("unknown sweep variable {other:?}"))),
        }
    }
}

pub const SWEEP_HEADER: [&str; 5] = ["variable", "value", "dx_formula", "dx_integrated", "ratio"];

/// Same loop shape, scaled to the given signed area.
pub fn rescale_stroke(stroke: &Stroke, area: f64) -> Result<Stroke, CliError> {
    let current = stroke.signed_area();
    if current == 0.0 {
        return Err(CliError::Config("cannot rescale a stroke of zero area".into()));
    }
    let k = (area / current).abs().sqrt();
    let mut out = stroke.clone();
    out.path = match &stroke.path {
        StrokePath::Rectangle { amplitudes } => StrokePath::Rectangle {
            amplitudes: amplitudes.map(|a| a * k),
        },
        StrokePath::Sinusoid { amplitudes } => StrokePath::Sinusoid {
            amplitudes: amplitudes.map(|a| a * k),
        },
        StrokePath::Polyline { vertices } => StrokePath::Polyline {
            vertices: vertices.iter().map(|v| v.map(|c| c * k)).collect(),
        },
    };
    if (area < 0.0) != (current < 0.0) {
        out = out.reverse();
    }
    Ok(out)
}

fn sweep_row(
    cfg: &RunConfig,
    variable: SweepVariable,
    value: f64,
    steps: Option<usize>,
) -> Result<(f64, f64, f64), CliError> {
    let mut surface = cfg.surface()?;
    let mut body = cfg.body()?;
    let mut stroke = cfg.stroke(steps)?;
    match variable {
        SweepVariable::Area => stroke = rescale_stroke(&stroke, value)?,
        SweepVariable::R => {
            surface = Surface::new(value).map_err(|e| CliError::Config(e.to_string()))?
        }
        SweepVariable::M => {
            let t = cfg.triangle().ok_or_else(|| {
                CliError::Config("sweeping m needs a triangle scenario body".into())
            })?;
            let t = TriangleSpec {
                base_mass: value,
                ..t
            };
            body = triangle_body(&t).map_err(|e| CliError::Config(e.to_string()))?;
        }
    }
    let fields = cfg.fields(&body, &surface)?;
    let area = stroke.signed_area();
    let formula = holonomy_general(&body, &surface, &fields[0], &fields[1], area)?.delta_tau[0];
    let options = IntegratorOptions {
        transport: cfg.transport.into(),
        record_trajectory: false,
        ..Default::default()
    };
    let integrated = integrate_stroke(&body, &surface, &fields, &stroke, &options)?
        .net_translation
        .x;
    Ok((formula, integrated, ratio(integrated, formula, area)))
}

/// Rows are computed in parallel and written in ascending order of value.
pub fn sweep(
    cfg: &RunConfig,
    variable: SweepVariable,
    values: &[f64],
    steps: Option<usize>,
) -> Result<String, CliError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("sweep values must be finite".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let results: Vec<_> = sorted
        .par_iter()
        .map(|&v| sweep_row(cfg, variable, v, steps).map(|r| (v, r)))
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<String>> = results
        .into_iter()
        .map(|(v, (f, i, r))| vec![variable.name().to_string(), sci(v), sci(f), sci(i), sci(r)])
        .collect();
    Ok(to_csv(&SWEEP_HEADER, &rows))
}

#[derive(Debug, Serialize)]
pub struct TriangleRecord {
    #[serde(rename = "M")]
    pub total_mass: Sci,
    pub m: Sci,
    pub h: Sci,
    pub b: Sci,
    /// `[mass, x, y]` per particle.
    pub particles: Vec<[Sci; 3]>,
    pub coefficient: Sci,
    pub optimal_mass: Sci,
    pub bound: Sci,
    pub surface_r: Sci,
    pub delta_b: Sci,
    pub delta_h: Sci,
    pub rectangle_stroke_distance: Sci,
}

pub fn triangle(
    t: &TriangleSpec,
    r: f64,
    delta_b: f64,
    delta_h: f64,
) -> Result<TriangleRecord, CliError> {
    t.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let body = triangle_body(t)?;
    Ok(TriangleRecord {
        total_mass: Sci(t.total_mass),
        m: Sci(t.base_mass),
        h: Sci(t.height),
        b: Sci(t.base),
        particles: body
            .particles()
            .iter()
            .map(|p| sci_array([p.mass, p.position.x, p.position.y]))
            .collect(),
        coefficient: Sci(triangle_swim_coefficient(t)),
        optimal_mass: Sci(triangle_optimal_mass(t.total_mass)?),
        bound: Sci(0.5 * t.height * t.base * t.base),
        surface_r: Sci(r),
        delta_b: Sci(delta_b),
        delta_h: Sci(delta_h),
        rectangle_stroke_distance: Sci(rectangle_stroke_distance(t, r, delta_b, delta_h)),
    })
}

#[derive(Debug, Serialize)]
pub struct RingRecord {
    pub circumference: Sci,
    pub m1: Sci,
    pub m2: Sci,
    pub displacement: Sci,
    pub swapped_displacement: Sci,
}

pub fn ring(circumference: f64, m1: f64, m2: f64) -> Result<RingRecord, CliError> {
    let spec = RingSpec::new(circumference, m1, m2).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(RingRecord {
        circumference: Sci(circumference),
        m1: Sci(m1),
        m2: Sci(m2),
        displacement: Sci(ring_displacement(&spec)),
        swapped_displacement: Sci(ring_displacement(&spec.swapped())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_config(r: f64, amplitude: f64) -> RunConfig {
        RunConfig::from_json(&format!(
            r#"{{
                "schema": "curvswim/1",
                "surface": {{"R": {r}}},
                "body": {{"scenario": {{"triangle": {{"M": 1.0, "m": 0.25, "h": 1.0, "b": 1.0}}}}}},
                "fields": ["linear:11", "linear:22"],
                "stroke": {{"type": "rectangle", "amplitudes": [{amplitude}, {amplitude}], "steps": 64}}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn holonomy_records() {
        // The unit triangle at R = 1 is far from the small-body limit; at
        // R = 1e-3 it swims R · ½ · area.
        let rec = holonomy(&triangle_config(1e-3, 0.1)).unwrap();
        let expected = 1e-3 * 0.005;
        assert!((rec.delta_tau[0].0 / expected - 1.0).abs() < 0.01, "{rec:?}");
        let flat = holonomy(&triangle_config(0.0, 0.1)).unwrap();
        assert!(flat.delta_tau.iter().all(|t| t.0 == 0.0));
        let text = render_holonomy(&flat, Format::Csv).unwrap();
        assert!(text.starts_with("R,area,tau_x"));
    }

    #[test]
    fn integrate_summary_and_trajectory() {
        let cfg = triangle_config(1.0, 0.01);
        let text = integrate(&cfg, None, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let ratio = v["ratio"].as_f64().unwrap();
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
        assert!(v["max_relative_momentum"].as_f64().unwrap() < 1e-12);
        let csv = integrate(&cfg, Some(4), Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 1 + 5 * 3);
    }

    #[test]
    fn sweep_is_sorted_and_deterministic() {
        let cfg = triangle_config(1.0, 0.01);
        let a = sweep(&cfg, SweepVariable::R, &[1.0, -1.0, 0.0], Some(16)).unwrap();
        let b = sweep(&cfg, SweepVariable::R, &[0.0, 1.0, -1.0], Some(16)).unwrap();
        assert_eq!(a, b);
        let lines: Vec<_> = a.lines().collect();
        assert_eq!(lines[0], "variable,value,dx_formula,dx_integrated,ratio");
        assert!(lines[1].starts_with("R,-1.0000000000000000e0,"));
        assert!(lines[2].starts_with("R,0.0000000000000000e0,"));
        let flat: Vec<_> = lines[2].split(',').collect();
        assert_eq!(flat[4], sci(1.0));
    }

    #[test]
    fn rescaling_keeps_shape() {
        let s = Stroke::rectangle(0.2, 0.1, 8);
        let r = rescale_stroke(&s, -0.5).unwrap();
        assert!((r.signed_area() + 0.5).abs() < 1e-15);
        assert!(rescale_stroke(&Stroke::rectangle(0.0, 1.0, 8), 1.0).is_err());
    }

    #[test]
    fn sweep_over_mass_needs_a_triangle() {
        let cfg = RunConfig::from_json(
            r#"{
                "schema": "curvswim/1",
                "surface": {"R": 1.0},
                "body": {"particles": [[1, 0.1, 0.0], [1, -0.1, 0.05], [1, 0.0, -0.05]]},
                "fields": ["linear:11", "linear:22"],
                "stroke": {"type": "rectangle", "amplitudes": [0.1, 0.1], "steps": 8}
            }"#,
        )
        .unwrap();
        assert!(matches!(
            sweep(&cfg, SweepVariable::M, &[0.1], None),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn closed_form_commands() {
        let t = TriangleSpec::unit();
        let rec = triangle(&t, 1.0, 0.1, 0.1).unwrap();
        assert_eq!(rec.coefficient.0, 0.5);
        assert_eq!(rec.optimal_mass.0, 0.25);
        assert!((rec.rectangle_stroke_distance.0 - 0.005).abs() < 1e-15);
        let ring = ring(1.0, 1.0, 3.0).unwrap();
        assert_eq!(ring.displacement.0, 0.75);
        assert_eq!(ring.swapped_displacement.0, 0.25);
        assert!(matches!(super::ring(1.0, -1.0, 1.0), Err(CliError::Config(_))));
    }
}
