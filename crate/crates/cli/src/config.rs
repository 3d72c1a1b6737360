//! Run configuration.
//!
//! ```json
//! {
//!   "schema": "curvswim/1",
//!   "surface": { "R": 1.0 },
//!   "body": { "scenario": { "triangle": { "M": 1.0, "m": 0.25, "h": 1.0, "b": 1.0 } } },
//!   "fields": ["linear:11", "linear:22"],
//!   "stroke": { "type": "rectangle", "amplitudes": [0.1, 0.1], "steps": 1024 },
//!   "outputs": { "format": "json", "path": "out.json" }
//! }
//! ```
//!
//! Bodies may instead list `"particles": [[mass, x, y], ...]`. Field specs
//! are `"linear:jk"` (projected onto the gauge of the body and surface),
//! `"gauge-fixed:jk"` (closed form; needs a balanced principal-axes body) or
//! `{"matrix": [[a, b], [c, d]]}` for the linear field `v^l = A[l][i] x^i`,
//! also projected.

use std::fs;
use std::path::{Path, PathBuf};

use curvswim::integrator::{Stroke, Transport, DEFAULT_STEPS};
use curvswim::scenarios::{triangle_body, TriangleSpec};
use curvswim::{
    gauge_fixed_linear_deformation, linear_deformation, project_gauge, Body, Surface, VectorField,
};
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA: &str = "curvswim/1";

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub surface: SurfaceConfig,
    pub body: BodyConfig,
    pub fields: Vec<FieldSpec>,
    pub stroke: StrokeConfig,
    #[serde(default)]
    pub transport: TransportConfig,
    #[serde(default)]
    pub outputs: Option<OutputConfig>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    #[serde(default)]
    pub particles: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum ScenarioConfig {
    Triangle(TriangleConfig),
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TriangleConfig {
    #[serde(rename = "M")]
    pub total_mass: f64,
    pub m: f64,
    pub h: f64,
    pub b: f64,
}

impl TriangleConfig {
    pub fn spec(&self) -> TriangleSpec {
        TriangleSpec {
            total_mass: self.total_mass,
            base_mass: self.m,
            height: self.h,
            base: self.b,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(String),
    Matrix(MatrixField),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixField {
    pub matrix: [[f64; 2]; 2],
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum StrokeKind {
    Rectangle,
    Sinusoid,
    Polyline,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StrokeConfig {
    #[serde(rename = "type")]
    pub kind: StrokeKind,
    #[serde(default)]
    pub amplitudes: Option<[f64; 2]>,
    #[serde(default)]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub warp: f64,
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TransportConfig {
    #[default]
    Body,
    Lab,
}

impl From<TransportConfig> for Transport {
    fn from(t: TransportConfig) -> Self {
        match t {
            TransportConfig::Body => Transport::Body,
            TransportConfig::Lab => Transport::Lab,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Structural checks that need no numerics.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(bad(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                self.schema
            )));
        }
        if !self.surface.r.is_finite() {
            return Err(bad("surface.R must be finite"));
        }
        match (&self.body.particles, &self.body.scenario) {
            (Some(p), None) if !p.is_empty() => {}
            (None, Some(ScenarioConfig::Triangle(t))) => {
                t.spec().validate().map_err(|e| bad(e.to_string()))?;
            }
            _ => return Err(bad("body needs exactly one of a non-empty `particles` or `scenario`")),
        }
        if self.fields.len() != 2 {
            return Err(bad(format!("expected 2 fields, got {}", self.fields.len())));
        }
        for f in &self.fields {
            if let FieldSpec::Named(name) = f {
                parse_named(name)?;
            }
        }
        self.stroke(None)?;
        Ok(())
    }

    pub fn surface(&self) -> Result<Surface, CliError> {
        Surface::new(self.surface.r).map_err(|e| bad(e.to_string()))
    }

    pub fn triangle(&self) -> Option<TriangleSpec> {
        self.body
            .scenario
            .as_ref()
            .map(|ScenarioConfig::Triangle(t)| t.spec())
    }

    pub fn body(&self) -> Result<Body, CliError> {
        if let Some(t) = self.triangle() {
            return triangle_body(&t).map_err(|e| bad(e.to_string()));
        }
        let particles = self.body.particles.as_deref().unwrap_or_default();
        Body::from_triples(particles).map_err(|e| bad(e.to_string()))
    }

    /// The two control fields, prepared for `body` on `surface`.
    pub fn fields(&self, body: &Body, surface: &Surface) -> Result<[VectorField; 2], CliError> {
        let ks = surface.killing_fields();
        let build = |spec: &FieldSpec| -> Result<VectorField, CliError> {
            match spec {
                FieldSpec::Named(name) => {
                    let (kind, j, k) = parse_named(name)?;
                    match kind {
                        NamedKind::Linear => {
                            let raw = linear_deformation(j, k).map_err(|e| bad(e.to_string()))?;
                            Ok(project_gauge(body, surface, &raw, &ks)?)
                        }
                        NamedKind::GaugeFixed => {
                            Ok(gauge_fixed_linear_deformation(body, j, k)?)
                        }
                    }
                }
                FieldSpec::Matrix(m) => {
                    let raw = VectorField::linear_map(m.matrix);
                    Ok(project_gauge(body, surface, &raw, &ks)?)
                }
            }
        };
        Ok([build(&self.fields[0])?, build(&self.fields[1])?])
    }

    /// The configured stroke, with an optional override of the step count.
    pub fn stroke(&self, steps: Option<usize>) -> Result<Stroke, CliError> {
        let s = &self.stroke;
        let steps = steps.or(s.steps).unwrap_or(DEFAULT_STEPS);
        let need_amplitudes = || s.amplitudes.ok_or_else(|| bad("stroke needs `amplitudes`"));
        let mut stroke = match s.kind {
            StrokeKind::Rectangle => {
                let [a, b] = need_amplitudes()?;
                Stroke::rectangle(a, b, steps)
            }
            StrokeKind::Sinusoid => {
                let [a, b] = need_amplitudes()?;
                Stroke::sinusoid(a, b, steps)
            }
            StrokeKind::Polyline => {
                let v = s.vertices.clone().ok_or_else(|| bad("polyline stroke needs `vertices`"))?;
                Stroke::polyline(v, steps)
            }
        };
        stroke = stroke.with_warp(s.warp);
        if s.reversed {
            stroke = stroke.reverse();
        }
        stroke.validate().map_err(|e| bad(e.to_string()))?;
        Ok(stroke)
    }

    pub fn format(&self) -> Option<Format> {
        self.outputs.as_ref().and_then(|o| o.format)
    }

    pub fn output_path(&self) -> Option<&Path> {
        self.outputs.as_ref().and_then(|o| o.path.as_deref())
    }
}

enum NamedKind {
    Linear,
    GaugeFixed,
}

fn parse_named(name: &str) -> Result<(NamedKind, usize, usize), CliError> {
    let (kind, idx) = name
        .split_once(':')
        .ok_or_else(|| bad(format!("field {name:?}: expected `linear:jk` or `gauge-fixed:jk`")))?;
    let kind = match kind {
        "linear" => NamedKind::Linear,
        "gauge-fixed" => NamedKind::GaugeFixed,
        other => return Err(bad(format!("unknown field family {other:?}"))),
    };
    let digits: Vec<usize> = idx
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()
        .unwrap_or_default();
    match digits[..] {
        [j, k] if (1..=2).contains(&j) && (1..=2).contains(&k) => Ok((kind, j, k)),
        _ => Err(bad(format!("field {name:?}: indices must be two digits in 1..=2"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TRIANGLE: &str = r#"{
        "schema": "curvswim/1",
        "surface": {"R": 1.0},
        "body": {"scenario": {"triangle": {"M": 1.0, "m": 0.25, "h": 1.0, "b": 1.0}}},
        "fields": ["linear:11", "linear:22"],
        "stroke": {"type": "rectangle", "amplitudes": [0.1, 0.1], "steps": 64}
    }"#;

    #[test]
    fn parses_triangle_config() {
        let cfg = RunConfig::from_json(TRIANGLE).unwrap();
        assert_eq!(cfg.surface.r, 1.0);
        assert_eq!(cfg.stroke(None).unwrap().signed_area(), 0.1 * 0.1);
        assert_eq!(cfg.stroke(Some(8)).unwrap().steps, 8);
        let body = cfg.body().unwrap();
        let s = cfg.surface().unwrap();
        assert_eq!(body.len(), 3);
        cfg.fields(&body, &s).unwrap();
    }

    #[test]
    fn particles_and_matrix_fields() {
        let text = r#"{
            "schema": "curvswim/1",
            "surface": {"R": -0.5},
            "body": {"particles": [[1, 0.1, 0.0], [1, -0.1, 0.05], [1, 0.0, -0.05]]},
            "fields": [{"matrix": [[1, 0], [0, 0]]}, "linear:12"],
            "stroke": {"type": "polyline", "vertices": [[0,0],[0.1,0],[0,0.1],[0,0]], "steps": 30},
            "transport": "lab",
            "outputs": {"format": "csv"}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.transport, TransportConfig::Lab);
        assert_eq!(cfg.format(), Some(Format::Csv));
        let body = cfg.body().unwrap();
        cfg.fields(&body, &cfg.surface().unwrap()).unwrap();
    }

    #[test]
    fn rejects_malformed_configs() {
        let cases = [
            TRIANGLE.replace("\"schema\": \"curvswim/1\"", "\"schema\": \"curvswim/0\""),
            TRIANGLE.replace("\"steps\": 64", "\"steps\": 64, \"colour\": 1"),
            TRIANGLE.replace("linear:22", "linear:23"),
            TRIANGLE.replace("linear:22", "bending:22"),
            TRIANGLE.replace("\"m\": 0.25", "\"m\": 0.5"),
            TRIANGLE.replace("\"steps\": 64", "\"steps\": 6"),
            TRIANGLE.replace("[\"linear:11\", \"linear:22\"]", "[\"linear:11\"]"),
            TRIANGLE.replace(
                "{\"type\": \"rectangle\", \"amplitudes\": [0.1, 0.1], \"steps\": 64}",
                "{\"type\": \"polyline\", \"vertices\": [[0,0],[1,0],[0,1]], \"steps\": 3}",
            ),
            "{".to_string(),
        ];
        for text in cases {
            assert!(matches!(RunConfig::from_json(&text), Err(CliError::Config(_))), "{text}");
        }
    }
}
