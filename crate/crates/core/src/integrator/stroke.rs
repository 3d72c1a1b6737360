use std::f64::consts::PI;

use crate::error::{Result, SwimError};

/// Closed loop in the plane of two control coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum StrokePath {
    /// Legs `+u`, `+v`, `−u`, `−v`, each taking a quarter of the period.
    Rectangle { amplitudes: [f64; 2] },
    /// `σ(s) = (a sin 2πs, b (1 − cos 2πs))`.
    Sinusoid { amplitudes: [f64; 2] },
    /// Straight segments of equal duration. The last vertex must repeat the first.
    Polyline { vertices: Vec<[f64; 2]> },
}

/// Which one-sided derivative to take at a corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stroke {
    pub path: StrokePath,
    pub steps: usize,
    /// Speed modulation `t ↦ t − ε/(2πn) sin(2πnt)` with `n` segments; the
    /// path itself is unchanged.
    pub warp: f64,
    pub reversed: bool,
}

impl Stroke {
    pub fn rectangle(a_u: f64, a_v: f64, steps: usize) -> Self {
        Self::from_path(StrokePath::Rectangle { amplitudes: [a_u, a_v] }, steps)
    }

    pub fn sinusoid(a_u: f64, a_v: f64, steps: usize) -> Self {
        Self::from_path(StrokePath::Sinusoid { amplitudes: [a_u, a_v] }, steps)
    }

    pub fn polyline(vertices: Vec<[f64; 2]>, steps: usize) -> Self {
        Self::from_path(StrokePath::Polyline { vertices }, steps)
    }

    fn from_path(path: StrokePath, steps: usize) -> Self {
        Self {
            path,
            steps,
            warp: 0.0,
            reversed: false,
        }
    }

    /// Square loop of the given signed area.
    pub fn square(area: f64, steps: usize) -> Self {
        let side = area.abs().sqrt();
        let s = Self::rectangle(side, side, steps);
        if area < 0.0 {
            s.reverse()
        } else {
            s
        }
    }

    /// Circular loop of the given signed area.
    pub fn circle(area: f64, steps: usize) -> Self {
        let radius = (area.abs() / PI).sqrt();
        let s = Self::sinusoid(radius, radius, steps);
        if area < 0.0 {
            s.reverse()
        } else {
            s
        }
    }

    pub fn with_warp(mut self, eps: f64) -> Self {
        self.warp = eps;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn reverse(mut self) -> Self {
        self.reversed = !self.reversed;
        self
    }

    pub fn segments(&self) -> usize {
        match &self.path {
            StrokePath::Rectangle { .. } => 4,
            StrokePath::Sinusoid { .. } => 1,
            StrokePath::Polyline { vertices } => vertices.len().saturating_sub(1),
        }
    }

    pub fn closure_gap(&self) -> f64 {
        match &self.path {
            StrokePath::Polyline { vertices } => match (vertices.first(), vertices.last()) {
                (Some(a), Some(b)) => (a[0] - b[0]).hypot(a[1] - b[1]),
                _ => 0.0,
            },
            _ => {
                let a = self.sigma(0.0);
                let b = self.sigma(1.0);
                (a[0] - b[0]).hypot(a[1] - b[1])
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(SwimError::InvalidStroke("steps must be positive".into()));
        }
        let n = self.segments();
        if n == 0 {
            return Err(SwimError::InvalidStroke("polyline needs at least two vertices".into()));
        }
        if !self.steps.is_multiple_of(n) {
            return Err(SwimError::InvalidStroke(format!(
                "steps ({}) must be a multiple of the segment count ({n})",
                self.steps
            )));
        }
        if self.warp.is_nan() || self.warp.abs() >= 1.0 {
            return Err(SwimError::InvalidStroke(format!(
                "warp must lie in (-1, 1), got {}",
                self.warp
            )));
        }
        let finite = match &self.path {
            StrokePath::Rectangle { amplitudes } | StrokePath::Sinusoid { amplitudes } => {
                amplitudes.iter().all(|a| a.is_finite())
            }
            StrokePath::Polyline { vertices } => vertices.iter().flatten().all(|a| a.is_finite()),
        };
        if !finite {
            return Err(SwimError::InvalidStroke("non-finite amplitude".into()));
        }
        if let StrokePath::Polyline { .. } = self.path {
            let gap = self.closure_gap();
            if gap != 0.0 {
                return Err(SwimError::NonClosedStroke { gap });
            }
        }
        Ok(())
    }

    /// Signed area, counter-clockwise positive.
    pub fn signed_area(&self) -> f64 {
        let area = match &self.path {
            StrokePath::Rectangle { amplitudes } => amplitudes[0] * amplitudes[1],
            StrokePath::Sinusoid { amplitudes } => PI * amplitudes[0] * amplitudes[1],
            StrokePath::Polyline { vertices } => {
                0.5 * vertices
                    .windows(2)
                    .map(|w| w[0][0] * w[1][1] - w[1][0] * w[0][1])
                    .sum::<f64>()
            }
        };
        if self.reversed {
            -area
        } else {
            area
        }
    }

    /// Path point and derivative at path parameter `s` of the unwarped loop.
    fn base(&self, s: f64, side: Side) -> ([f64; 2], [f64; 2]) {
        match &self.path {
            StrokePath::Sinusoid { amplitudes: [a, b] } => {
                let w = 2.0 * PI * s;
                (
                    [a * w.sin(), b * (1.0 - w.cos())],
                    [2.0 * PI * a * w.cos(), 2.0 * PI * b * w.sin()],
                )
            }
            StrokePath::Rectangle { amplitudes: [a, b] } => {
                let corners = [[0.0, 0.0], [*a, 0.0], [*a, *b], [0.0, *b], [0.0, 0.0]];
                piecewise_linear(&corners, s, side)
            }
            StrokePath::Polyline { vertices } => piecewise_linear(vertices, s, side),
        }
    }

    pub fn sigma(&self, t: f64) -> [f64; 2] {
        self.eval(t, Side::After).0
    }

    pub fn sigma_dot(&self, t: f64, side: Side) -> [f64; 2] {
        self.eval(t, side).1
    }

    /// `(σ(t), σ̇(t))`.
    pub fn eval(&self, t: f64, side: Side) -> ([f64; 2], [f64; 2]) {
        let (u, du, side) = if self.reversed {
            let flipped = match side {
                Side::Before => Side::After,
                Side::After => Side::Before,
            };
            (1.0 - t, -1.0, flipped)
        } else {
            (t, 1.0, side)
        };
        let n = self.segments().max(1) as f64;
        let w = 2.0 * PI * n * u;
        let s = u - self.warp / (2.0 * PI * n) * w.sin();
        let ds = 1.0 - self.warp * w.cos();
        let (p, dp) = self.base(s, side);
        let k = ds * du;
        (p, [dp[0] * k, dp[1] * k])
    }
}

/// Equal-duration segments through `vertices`.
fn piecewise_linear(vertices: &[[f64; 2]], s: f64, side: Side) -> ([f64; 2], [f64; 2]) {
    let n = vertices.len() - 1;
    let scaled = s * n as f64;
    let mut k = scaled.floor();
    if side == Side::Before && scaled == k && k > 0.0 {
        k -= 1.0;
    }
    let k = (k.max(0.0) as usize).min(n - 1);
    let lambda = scaled - k as f64;
    let (a, b) = (vertices[k], vertices[k + 1]);
    let nf = n as f64;
    (
        [a[0] + lambda * (b[0] - a[0]), a[1] + lambda * (b[1] - a[1])],
        [(b[0] - a[0]) * nf, (b[1] - a[1]) * nf],
    )
}
