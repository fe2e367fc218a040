//! Built-in scenarios. Rotors start at rest unless noted.

use std::f64::consts::PI;

use crate::geometry::Gains;
use crate::liegroup::{compose_elementary, elem_rot, Axis, Rotation, Vec3};
use crate::model::RobotParams;

use super::reference::Reference;
use super::scenario::{rest_state, Controller, Form, ScenarioConfig, DEFAULT_DT};

/// `R_x(pi/9) R_y(pi/18) R_z(pi/3)`.
pub fn stabilization_target() -> Rotation {
    compose_elementary(&[(Axis::X, PI / 9.0), (Axis::Y, PI / 18.0), (Axis::Z, PI / 3.0)])
}

fn base(name: &str, reference: Reference, controller: Controller, duration: f64) -> ScenarioConfig {
    let params = RobotParams::default();
    ScenarioConfig {
        name: name.into(),
        params,
        gains: Gains::default(),
        reference,
        controller,
        init: rest_state(&params, Rotation::identity(), 0.0, 0.0),
        dt: DEFAULT_DT,
        duration,
        seed: 0,
        form: Form::Momentum,
    }
}

/// Constant target attitude from a spin of (12.5, 7, 1) rad/s.
pub fn orientation_stabilization() -> ScenarioConfig {
    let mut c = base(
        "orientation_stab",
        Reference::OrientationConstant { rotation: stabilization_target().to_row_major() },
        Controller::OrientationTracking,
        20.0,
    );
    c.init.omega = Vec3::new(12.5, 7.0, 1.0);
    c
}

/// Sinusoidal attitude reference about e2, from rest at
/// `exp(pi/4 e1) exp(pi/3 e3) exp(pi/6 e1)` (initial attitude is our choice).
pub fn orientation_tracking() -> ScenarioConfig {
    let mut c = base("orientation_track", Reference::OrientationSinusoid, Controller::OrientationTracking, 20.0);
    let r0 = compose_elementary(&[(Axis::X, PI / 4.0), (Axis::Z, PI / 3.0), (Axis::X, PI / 6.0)]);
    c.init = rest_state(&c.params, r0, 0.0, 0.0);
    c
}

/// Contact point to the origin with no spin; used for the energy identity.
pub fn position_stabilization() -> ScenarioConfig {
    let mut c = base("position_stab", Reference::Rest, Controller::PositionTracking, 20.0);
    c.init = rest_state(&c.params, elem_rot(Axis::X, PI / 6.0), 1.0, -0.5);
    c.init.omega = Vec3::new(0.5, -1.0, 0.3);
    c
}

/// Contact point to the origin while spinning at 1 rad/s about the vertical.
/// Uses k_p = 5, k_d = 0.3; with k_p = 1 the spiral toward the origin is
/// still about 0.4 m out at 40 s.
pub fn reduced_attitude() -> ScenarioConfig {
    let mut c = base("reduced_attitude", Reference::VerticalSpin { alpha: 1.0 }, Controller::ReducedAttitude, 40.0);
    c.init = rest_state(&c.params, elem_rot(Axis::X, PI / 6.0), 4.0, 2.0);
    c.gains.kp = 5.0;
    c.gains.kd = 0.3;
    c
}

/// Circle of the sphere's radius at 1 rad/s.
pub fn circle_tracking() -> ScenarioConfig {
    let r = RobotParams::default().radius;
    base("circle_track", Reference::Circle { radius: r, rate: 1.0 }, Controller::PositionTracking, 30.0)
}

/// Straight line `(0.2 t + 0.4, 0.3 t + 0.6)`.
pub fn line_tracking() -> ScenarioConfig {
    base(
        "line_track",
        Reference::Line { velocity: [0.2, 0.3], offset: [0.4, 0.6] },
        Controller::PositionTracking,
        30.0,
    )
}

/// Torque-free tumbling with spinning rotors.
pub fn free_motion() -> ScenarioConfig {
    let mut c = base("free_motion", Reference::Rest, Controller::OpenLoop { table: Vec::new() }, 10.0);
    c.init = rest_state(&c.params, elem_rot(Axis::Y, 0.4), 0.0, 0.0);
    c.init.omega = Vec3::new(2.0, -1.0, 3.0);
    c.init.theta_dot = Vec3::new(20.0, -10.0, 5.0);
    c
}

pub fn all() -> Vec<ScenarioConfig> {
    vec![
        orientation_stabilization(),
        orientation_tracking(),
        position_stabilization(),
        reduced_attitude(),
        circle_tracking(),
        line_tracking(),
        free_motion(),
    ]
}

pub fn by_name(name: &str) -> Option<ScenarioConfig> {
    all().into_iter().find(|c| c.name == name)
}
