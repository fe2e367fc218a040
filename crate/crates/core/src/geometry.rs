//! Error functions on SO(3) and the plane, their derivatives, the
//! transported velocity error, the metric connection and the feedforward
//! term of the tracking laws.
//!
//! Sign conventions. The gradient `dV` is defined by
//! `d/de V(R exp(e hat(eta)))|_0 = dV . eta`. With the shell dynamics
//! `M w' = (I_s w + J th') x w - u`, a positive torque `u` decelerates the
//! shell, so the restoring torque is `+dV` and damping is `+K_v e_w`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liegroup::{exp_so3, hat, vee_unchecked, Mat3, Rotation, Vec3};
use crate::model::{lock_inertia, ModelError, RobotParams, RobotState};

/// Largest disagreement tolerated between the two gradient formulas, per
/// unit of the largest weight.
pub const GRADIENT_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("gradient form inconsistency: {0:e}")]
    GradientInconsistency(f64),
    #[error("metric is not symmetric positive definite")]
    NotSpd,
    #[error("invalid gains: {0}")]
    InvalidGains(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Feedback gains shared by the attitude and position laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    /// Diagonal of K_p; positive and pairwise distinct.
    pub kp_diag: [f64; 3],
    /// Attitude damping K_v (N m s).
    pub kv: f64,
    /// Position stiffness k_p.
    pub kp: f64,
    /// Position damping k_d (N m s).
    pub kd: f64,
    /// Desired spin rate about the vertical (rad/s).
    pub alpha: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Gains {
            kp_diag: [2.0, 8.0, 1.0],
            kv: 0.5,
            kp: 1.0,
            kd: 0.1,
            alpha: 0.0,
        }
    }
}

impl Gains {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let [a, b, c] = self.kp_diag;
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(GeometryError::InvalidGains(format!(
                "K_p entries must be positive, got {:?}",
                self.kp_diag
            )));
        }
        if a == b || b == c || a == c {
            return Err(GeometryError::InvalidGains(format!(
                "K_p entries must be pairwise distinct, got {:?}",
                self.kp_diag
            )));
        }
        for (name, v) in [("kv", self.kv), ("kp", self.kp), ("kd", self.kd)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GeometryError::InvalidGains(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !self.alpha.is_finite() {
            return Err(GeometryError::InvalidGains("alpha must be finite".into()));
        }
        Ok(())
    }

    pub fn kp_matrix(&self) -> Mat3 {
        Mat3::from_diagonal(&Vec3::from(self.kp_diag))
    }
}

/// Reference at one instant: desired attitude with its body rate and
/// acceleration, and the desired contact point with its velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredFrame {
    pub rotation: Rotation,
    /// Body angular velocity of the reference, `vee(R_d^T R_d')`.
    pub omega: Vec3,
    pub omega_dot: Vec3,
    pub position: Vec3,
    pub velocity: Vec3,
}

impl DesiredFrame {
    /// Constant attitude, resting at the origin.
    pub fn fixed(rotation: Rotation) -> Self {
        DesiredFrame {
            rotation,
            omega: Vec3::zeros(),
            omega_dot: Vec3::zeros(),
            position: Vec3::zeros(),
            velocity: Vec3::zeros(),
        }
    }

    /// `R_d w_d`, the reference angular velocity in the inertial frame.
    pub fn inertial_omega(&self) -> Vec3 {
        self.rotation * self.omega
    }
}

/// `V = trace(K_p (I - R_d^T R_s))`.
pub fn trace_potential(rs: &Rotation, rd: &Rotation, kp: &Mat3) -> f64 {
    let re = rd.transpose() * *rs;
    (kp * (Mat3::identity() - re.matrix())).trace()
}

/// `sum_i l_i (R_s^T R_d e_i) x e_i`.
///
/// The variant `sum_i l_i (R_s^T e_i) x (R_d^T e_i)` agrees with this only
/// when `R_d = I` or the weights are equal.
pub fn gradient_sum_form(rs: &Rotation, rd: &Rotation, kp: &Mat3) -> Vec3 {
    let re_t = rs.transpose() * *rd;
    (0..3)
        .map(|i| {
            let e = Vec3::ith(i, 1.0);
            (re_t * e).cross(&e) * kp[(i, i)]
        })
        .sum()
}

/// `vee(A - A^T)` with `A = K_p R_d^T R_s`.
pub fn gradient_skew_form(rs: &Rotation, rd: &Rotation, kp: &Mat3) -> Vec3 {
    let a = kp * (rd.transpose() * *rs).matrix();
    // vee_unchecked takes the skew part, so this is vee(A - A^T).
    vee_unchecked(&a) * 2.0
}

/// Body-frame gradient `dV` of [`trace_potential`] with respect to `R_s`.
/// Both closed forms are evaluated and must agree.
pub fn grad_trace_potential(
    rs: &Rotation,
    rd: &Rotation,
    kp: &Mat3,
) -> Result<Vec3, GeometryError> {
    let sum = gradient_sum_form(rs, rd, kp);
    let skew = gradient_skew_form(rs, rd, kp);
    let gap = (sum - skew).norm();
    if gap > GRADIENT_FORM_TOL * kp.amax().max(1.0) {
        return Err(GeometryError::GradientInconsistency(gap));
    }
    Ok(sum)
}

/// Second derivative of `V(R_s exp(hat(eta)))` at `eta = 0`:
/// `trace(A) I - sym(A)` with `A = K_p R_d^T R_s`.
pub fn hessian_trace_potential(rs: &Rotation, rd: &Rotation, kp: &Mat3) -> Mat3 {
    let a = kp * (rd.transpose() * *rs).matrix();
    Mat3::identity() * a.trace() - (a + a.transpose()) * 0.5
}

/// `sqrt(V)`, the attitude error norm.
pub fn error_norm(rs: &Rotation, rd: &Rotation, kp: &Mat3) -> f64 {
    trace_potential(rs, rd, kp).max(0.0).sqrt()
}

/// Reference velocity carried to the body frame of the shell by the right
/// transport map: `R_e^T w_d = R_s^T R_d w_d`.
pub fn transported_velocity(rs: &Rotation, d: &DesiredFrame) -> Vec3 {
    rs.transpose() * d.inertial_omega()
}

/// `e_w = w - R_e^T w_d`.
pub fn velocity_error(rs: &Rotation, omega: &Vec3, rd: &Rotation, omega_d: &Vec3) -> Vec3 {
    omega - rs.transpose() * (rd * omega_d)
}

/// Body-frame bilinear part of the metric connection:
/// `M^{-1} (xi x M eta + eta x M xi) / 2`.
pub fn connection_product(m: &Mat3, xi: &Vec3, eta: &Vec3) -> Result<Vec3, GeometryError> {
    if (m - m.transpose()).norm() > 1e-12 * m.norm().max(1.0) {
        return Err(GeometryError::NotSpd);
    }
    let chol = m.cholesky().ok_or(GeometryError::NotSpd)?;
    Ok(chol.solve(&((xi.cross(&(m * eta)) + eta.cross(&(m * xi))) * 0.5)))
}

/// Feedforward for a transported reference `w(t)` in body coordinates:
/// `M (w' + conn(w_s, w))` where `w' = -w_s x w + accel` and `accel`
/// is the transported reference acceleration `R_e^T w_d'`.
pub fn feedforward_transported(m: &Mat3, omega: &Vec3, w: &Vec3, accel: &Vec3) -> Vec3 {
    // M conn(omega, w) expanded so no solve is needed.
    let bilinear = (omega.cross(&(m * w)) - (m * omega).cross(w)) * 0.5;
    bilinear - m * omega.cross(w) + m * accel
}

/// `f_FF = M (d/dt(R_e^T w_d) + conn(w_s, R_e^T w_d))` at the current state.
pub fn feedforward(
    p: &RobotParams,
    s: &RobotState,
    d: &DesiredFrame,
) -> Result<Vec3, GeometryError> {
    let m = lock_inertia(p, &s.gamma)?;
    let w = transported_velocity(&s.rotation, d);
    let accel = s.rotation.transpose() * (d.rotation * d.omega_dot);
    Ok(feedforward_transported(&m, &s.omega, &w, &accel))
}

/// `H = V(R_e) + e_w^T M e_w / 2`.
pub fn tracking_energy(
    p: &RobotParams,
    s: &RobotState,
    d: &DesiredFrame,
    kp: &Mat3,
) -> Result<f64, GeometryError> {
    let m = lock_inertia(p, &s.gamma)?;
    let e = velocity_error(&s.rotation, &s.omega, &d.rotation, &d.omega);
    Ok(trace_potential(&s.rotation, &d.rotation, kp) + 0.5 * e.dot(&(m * e)))
}

/// `V_1 = |x - x_d|^2 / 2`.
pub fn position_potential(x: &Vec3, xd: &Vec3) -> f64 {
    0.5 * (x - xd).norm_squared()
}

/// `r R_s^T (e3 x (x - x_d))`.
///
/// Along rolling motion `V_1' = term . e_w`, since
/// `(x - x_d) . ((R e_w) x r e3) = (R e_w) . (r e3 x (x - x_d))`.
pub fn position_gradient_term(rs: &Rotation, x: &Vec3, xd: &Vec3, radius: f64) -> Vec3 {
    rs.transpose() * Vec3::z().cross(&(x - xd)) * radius
}

/// Directional derivative of `V` along `R exp(t hat(eta))` by central differences.
pub fn potential_directional_fd(rs: &Rotation, rd: &Rotation, kp: &Mat3, eta: &Vec3, h: f64) -> f64 {
    let vp = trace_potential(&(*rs * exp_so3(&(eta * h))), rd, kp);
    let vm = trace_potential(&(*rs * exp_so3(&(eta * -h))), rd, kp);
    (vp - vm) / (2.0 * h)
}

/// Skew part helper used by diagnostics.
pub fn skew(v: &Vec3) -> Mat3 {
    hat(v)
}
