//! Fixed-step simulation, references, scenarios and records.

pub mod integrator;
pub mod presets;
pub mod record;
pub mod reference;
pub mod scenario;

use thiserror::Error;

use crate::control::ControlError;
use crate::geometry::GeometryError;
use crate::model::ModelError;

pub use integrator::{rk4_step, GroupRate, GroupState};
pub use record::{Diagnostics, Row, TrajectoryRecord, CSV_HEADER};
pub use reference::{orientation_sinusoid, planar_curve, Reference};
pub use scenario::{run_batch, run_scenario, Controller, Form, ScenarioConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("dynamics blow-up at t = {t}")]
    BlowUp { t: f64 },
    #[error("invalid step size {0}")]
    InvalidStep(f64),
    #[error("reference velocity is not planar (vertical component {0})")]
    NonPlanarReference(f64),
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Control(#[from] ControlError),
}
