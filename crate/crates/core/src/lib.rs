//! Swimming of deformable point-mass bodies on constant-curvature surfaces.
//!
//! A body changes shape along a closed loop of controls while its total
//! momentum along every Killing field stays zero. On a curved surface the loop
//! can leave a net rigid displacement. [`holonomy`] gives it for small loops in
//! closed form and [`integrator`] computes it for finite loops.

pub mod body;
pub mod deformation;
pub mod error;
pub mod field;
pub mod geometry;
pub mod holonomy;
pub mod integrator;
pub mod scenarios;

pub use body::{Body, Moments, Particle};
pub use deformation::{
    gauge_fixed_linear_deformation, gauge_residuals, linear_deformation, project_gauge, strain_of,
};
pub use error::{Result, SwimError};
pub use field::{FieldTag, QuadraticField, VectorField};
pub use geometry::{
    ChartPoint, CurvatureTensor, Isometry, KillingIndex, KillingSet, Surface, TangentVector,
};
pub use holonomy::{
    gram_matrix, holonomy_general, holonomy_linear, holonomy_small_swimmer, two_form_bracket,
    HolonomyResult, MassCloud,
};
pub use integrator::{
    convergence_study, integrate_stroke, momentum, IntegratorOptions, Stroke, StrokePath,
    TrajectoryRecord, Transport,
};
