//! Feedback laws and the rotor torque transform.
//!
//! All laws share the dynamics convention `M w' = (I_s w + J th') x w - u`.
//! For `H = P + e^T M e / 2` with a potential `P` whose rate along the
//! motion is `G . e`, the law `u = G + k e - f_FF` gives `H' = -k |e|^2`.
//! Both the attitude law (`P = V`, `G = dV`) and the position law
//! (`P = V_1`, `G = kp r R^T (e3 x (x - x_d))`, exact for `kp = 1`) use it.

use thiserror::Error;

use crate::geometry::{
    feedforward, feedforward_transported, grad_trace_potential, position_gradient_term,
    velocity_error, DesiredFrame, GeometryError, Gains,
};
use crate::liegroup::{Mat3, Vec3};
use crate::model::{lock_inertia, ModelError, RobotParams, RobotState};

/// Largest condition number accepted for the torque transform.
pub const TRANSFORM_COND_MAX: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("torque transform is ill-conditioned (cond = {0:e})")]
    IllConditioned(f64),
}

/// `u = dV + K_v e_w - f_FF`.
pub fn orientation_tracking_law(
    p: &RobotParams,
    s: &RobotState,
    d: &DesiredFrame,
    g: &Gains,
) -> Result<Vec3, ControlError> {
    let dv = grad_trace_potential(&s.rotation, &d.rotation, &g.kp_matrix())?;
    let e = velocity_error(&s.rotation, &s.omega, &d.rotation, &d.omega);
    let ff = feedforward(p, s, d)?;
    Ok(dv + e * g.kv - ff)
}

/// `u = kp r R^T (e3 x (x - x_d)) + k_d e_w - f_FF`.
///
/// Only `R_d w_d` enters, so planar references may use `R_d = I`.
pub fn position_tracking_law(
    p: &RobotParams,
    s: &RobotState,
    d: &DesiredFrame,
    g: &Gains,
) -> Result<Vec3, ControlError> {
    let pos = position_gradient_term(&s.rotation, &s.position, &d.position, p.radius);
    let e = velocity_error(&s.rotation, &s.omega, &d.rotation, &d.omega);
    let ff = feedforward(p, s, d)?;
    Ok(pos * g.kp + e * g.kd - ff)
}

/// Drive the contact point to the origin while spinning at `alpha` about
/// the vertical. This is the position law with `x_d = 0` and the constant
/// inertial reference `alpha e3`, whose body image is `alpha G`.
pub fn reduced_attitude_law(
    p: &RobotParams,
    s: &RobotState,
    g: &Gains,
) -> Result<Vec3, ControlError> {
    let m = lock_inertia(p, &s.gamma)?;
    let w = s.gamma * g.alpha;
    let pos = position_gradient_term(&s.rotation, &s.position, &Vec3::zeros(), p.radius);
    let ff = feedforward_transported(&m, &s.omega, &w, &Vec3::zeros());
    Ok(pos * g.kp + (s.omega - w) * g.kd - ff)
}

/// `Delta = J - J (M + J)^{-1} J`, mapping rotor torques to the equivalent
/// shell input.
pub fn torque_transform_matrix(p: &RobotParams, gamma: &Vec3) -> Result<Mat3, ControlError> {
    let m = lock_inertia(p, gamma)?;
    let j = p.rotor_inertia_matrix();
    let inv = (m + j)
        .cholesky()
        .ok_or(ModelError::SingularInertia)?
        .inverse();
    let delta = j - j * inv * j;
    let delta = (delta + delta.transpose()) * 0.5;
    let ev = delta.symmetric_eigenvalues();
    let (lo, hi) = (ev.min(), ev.max());
    if lo <= 0.0 || hi / lo > TRANSFORM_COND_MAX {
        return Err(ControlError::IllConditioned(if lo <= 0.0 { f64::INFINITY } else { hi / lo }));
    }
    Ok(delta)
}

/// `v = Delta u`.
pub fn torque_transform(p: &RobotParams, gamma: &Vec3, u: &Vec3) -> Result<Vec3, ControlError> {
    Ok(torque_transform_matrix(p, gamma)? * u)
}

/// `u = Delta^{-1} v`.
pub fn torque_transform_inverse(
    p: &RobotParams,
    gamma: &Vec3,
    v: &Vec3,
) -> Result<Vec3, ControlError> {
    let delta = torque_transform_matrix(p, gamma)?;
    Ok(delta
        .cholesky()
        .ok_or(ControlError::IllConditioned(f64::INFINITY))?
        .solve(v))
}
