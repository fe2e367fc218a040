//! Scenario configuration and the closed-loop runner.

use nalgebra::SVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{orientation_tracking_law, position_tracking_law, reduced_attitude_law};
use crate::geometry::{
    grad_trace_potential, position_gradient_term, position_potential, trace_potential, transported_velocity,
    velocity_error, DesiredFrame, Gains,
};
use crate::liegroup::{Rotation, Vec3};
use crate::model::{
    advected_vertical, body_momentum, dynamics_momentum_form, dynamics_velocity_form, inertial_momentum,
    lock_inertia, lock_inertia_rate, MomentumState, RobotParams, RobotState,
};

use super::integrator::{rk4_step, GroupRate, GroupState};
use super::record::{Row, TrajectoryRecord};
use super::reference::Reference;
use super::SimError;

/// Largest accepted step (s).
pub const MAX_DT: f64 = 0.01;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Controller {
    OrientationTracking,
    PositionTracking,
    /// Needs a `vertical_spin` reference, which supplies `alpha`.
    ReducedAttitude,
    /// Rows `[t, u1, u2, u3]`, linearly interpolated and held at the ends.
    OpenLoop { table: Vec<[f64; 4]> },
}

impl Controller {
    pub fn name(&self) -> &'static str {
        match self {
            Controller::OrientationTracking => "orientation_tracking",
            Controller::PositionTracking => "position_tracking",
            Controller::ReducedAttitude => "reduced_attitude",
            Controller::OpenLoop { .. } => "open_loop",
        }
    }
}

/// Which form of the equations of motion is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    #[default]
    Momentum,
    Velocity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub params: RobotParams,
    pub gains: Gains,
    pub reference: Reference,
    pub controller: Controller,
    pub init: RobotState,
    pub dt: f64,
    pub duration: f64,
    /// Recorded with the run; the integration itself is deterministic.
    pub seed: u64,
    pub form: Form,
}

fn open_loop_torque(table: &[[f64; 4]], t: f64) -> Vec3 {
    let at = |r: &[f64; 4]| Vec3::new(r[1], r[2], r[3]);
    match table {
        [] => Vec3::zeros(),
        [only] => at(only),
        _ => {
            let k = table.partition_point(|r| r[0] <= t);
            if k == 0 {
                return at(&table[0]);
            }
            if k == table.len() {
                return at(&table[k - 1]);
            }
            let (a, b) = (&table[k - 1], &table[k]);
            let s = (t - a[0]) / (b[0] - a[0]);
            at(a) * (1.0 - s) + at(b) * s
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        self.params.validate()?;
        self.gains.validate()?;
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return bad(format!("dt must lie in (0, {MAX_DT}], got {}", self.dt));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            return bad(format!("duration must be at least dt, got {}", self.duration));
        }
        let s = &self.init;
        let finite = [s.omega, s.theta, s.theta_dot, s.position, s.gamma]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()));
        if !finite {
            return bad("initial state has non-finite entries".into());
        }
        if s.rotation.orthogonality_error() > 1e-9 || (s.rotation.determinant() - 1.0).abs() > 1e-9 {
            return bad("initial rotation is not in SO(3)".into());
        }
        if (s.gamma - advected_vertical(&s.rotation)).norm() > 1e-9 {
            return bad("initial gamma does not match the rotation".into());
        }
        if (s.position.z - self.params.radius).abs() > 1e-9 {
            return bad(format!("initial height must equal the radius {}", self.params.radius));
        }
        match (&self.controller, &self.reference) {
            (Controller::ReducedAttitude, Reference::VerticalSpin { .. }) => {}
            (Controller::ReducedAttitude, _) => {
                return bad("reduced_attitude needs a vertical_spin reference".into());
            }
            (Controller::OpenLoop { table }, _) => {
                if table.iter().flatten().any(|x| !x.is_finite()) {
                    return bad("open-loop table has non-finite entries".into());
                }
                if table.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return bad("open-loop table times must increase".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Number of recorded rows, `floor(duration / dt) + 1`.
    pub fn row_count(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize + 1
    }

    fn gains_for_run(&self) -> Gains {
        let mut g = self.gains;
        if let Reference::VerticalSpin { alpha } = self.reference {
            g.alpha = alpha;
        }
        g
    }

    fn frame(&self, t: f64) -> Result<DesiredFrame, SimError> {
        self.reference.frame(t, self.params.radius)
    }

    /// Control torque at `(t, s)` and the reference frame it used.
    pub fn control(&self, t: f64, s: &RobotState) -> Result<(Vec3, DesiredFrame), SimError> {
        let d = self.frame(t)?;
        let g = self.gains_for_run();
        let p = &self.params;
        let u = match &self.controller {
            Controller::OrientationTracking => orientation_tracking_law(p, s, &d, &g)?,
            Controller::PositionTracking => position_tracking_law(p, s, &d, &g)?,
            Controller::ReducedAttitude => reduced_attitude_law(p, s, &g)?,
            Controller::OpenLoop { table } => open_loop_torque(table, t),
        };
        Ok((u, d))
    }

    /// Storage energy `H`, attitude error norm, `rho = H' + k |e_w|^2` from
    /// the exact rates, and `|e_w|^2`.
    pub fn energy_terms(&self, s: &RobotState, d: &DesiredFrame, u: &Vec3) -> Result<(f64, f64, f64, f64), SimError> {
        let p = &self.params;
        let g = self.gains_for_run();
        let kp = g.kp_matrix();
        let m = lock_inertia(p, &s.gamma)?;
        let e = velocity_error(&s.rotation, &s.omega, &d.rotation, &d.omega);
        let w = transported_velocity(&s.rotation, d);
        let accel = s.rotation.transpose() * (d.rotation * d.omega_dot);
        let v = trace_potential(&s.rotation, &d.rotation, &kp);
        let (potential, grad, k) = match self.controller {
            Controller::PositionTracking | Controller::ReducedAttitude => (
                g.kp * position_potential(&s.position, &d.position),
                position_gradient_term(&s.rotation, &s.position, &d.position, p.radius) * g.kp,
                g.kd,
            ),
            Controller::OrientationTracking => (v, grad_trace_potential(&s.rotation, &d.rotation, &kp)?, g.kv),
            Controller::OpenLoop { .. } => (v, grad_trace_potential(&s.rotation, &d.rotation, &kp)?, 0.0),
        };
        let rates = dynamics_velocity_form(p, s, u)?;
        let e_dot = rates.omega_dot + s.omega.cross(&w) - accel;
        let m_dot = lock_inertia_rate(p, &s.gamma, &rates.gamma_dot);
        let h_dot = grad.dot(&e) + e.dot(&(m * e_dot)) + 0.5 * e.dot(&(m_dot * e));
        let h = potential + 0.5 * e.dot(&(m * e));
        Ok((h, v.max(0.0).sqrt(), h_dot + k * e.norm_squared(), e.norm_squared()))
    }

    fn row(&self, t: f64, s: &RobotState) -> Result<Row, SimError> {
        let (u, d) = self.control(t, s)?;
        let (h, e_r, rho, e_sq) = self.energy_terms(s, &d, &u)?;
        let pi_body = body_momentum(&self.params, &s.omega, &s.theta_dot, &s.gamma)?;
        Ok(Row {
            t,
            omega: s.omega,
            theta: s.theta,
            theta_dot: s.theta_dot,
            position: s.position,
            rotation: s.rotation.to_row_major(),
            gamma: s.gamma,
            u,
            h,
            e_r,
            pi: inertial_momentum(&s.rotation, &pi_body),
            rho,
            x_d: d.position,
            e_omega_sq: e_sq,
        })
    }
}

type Vec12 = SVector<f64, 12>;

fn stack(parts: [&Vec3; 4]) -> Vec12 {
    Vec12::from_iterator(parts.iter().flat_map(|v| v.iter().copied()))
}

fn part(v: &Vec12, k: usize) -> Vec3 {
    v.fixed_rows::<3>(3 * k).into_owned()
}

fn momentum_pack(p: &RobotParams, s: &RobotState) -> Result<GroupState<12>, SimError> {
    let m = MomentumState::from_velocity(p, s)?;
    Ok(GroupState { rotation: s.rotation, vector: stack([&m.pi_shell, &m.pi_rotor, &m.theta, &m.position]) })
}

fn momentum_unpack(p: &RobotParams, y: &GroupState<12>) -> Result<RobotState, SimError> {
    let m = MomentumState {
        rotation: y.rotation,
        pi_shell: part(&y.vector, 0),
        pi_rotor: part(&y.vector, 1),
        theta: part(&y.vector, 2),
        position: part(&y.vector, 3),
        gamma: advected_vertical(&y.rotation),
    };
    Ok(m.to_velocity(p)?)
}

fn velocity_pack(s: &RobotState) -> GroupState<12> {
    GroupState { rotation: s.rotation, vector: stack([&s.omega, &s.theta, &s.theta_dot, &s.position]) }
}

fn velocity_unpack(y: &GroupState<12>) -> RobotState {
    RobotState {
        rotation: y.rotation,
        omega: part(&y.vector, 0),
        theta: part(&y.vector, 1),
        theta_dot: part(&y.vector, 2),
        position: part(&y.vector, 3),
        gamma: advected_vertical(&y.rotation),
    }
}

fn unpack(cfg: &ScenarioConfig, y: &GroupState<12>) -> Result<RobotState, SimError> {
    match cfg.form {
        Form::Momentum => momentum_unpack(&cfg.params, y),
        Form::Velocity => Ok(velocity_unpack(y)),
    }
}

fn closed_loop_rate(cfg: &ScenarioConfig, t: f64, y: &GroupState<12>) -> Result<GroupRate<12>, SimError> {
    let p = &cfg.params;
    let s = unpack(cfg, y)?;
    let (u, _) = cfg.control(t, &s)?;
    match cfg.form {
        Form::Momentum => {
            let m = MomentumState::from_velocity(p, &s)?;
            let r = dynamics_momentum_form(p, &m, &u)?;
            Ok(GroupRate { omega: r.omega, vector: stack([&r.pi_shell_dot, &r.pi_rotor_dot, &r.theta_dot, &r.position_dot]) })
        }
        Form::Velocity => {
            let r = dynamics_velocity_form(p, &s, &u)?;
            Ok(GroupRate { omega: s.omega, vector: stack([&r.omega_dot, &r.theta_dot, &r.theta_ddot, &r.position_dot]) })
        }
    }
}

/// Integrates the closed loop and records every step.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<TrajectoryRecord, SimError> {
    cfg.validate()?;
    let mut init = cfg.init;
    init.resync_gamma();
    let mut y = match cfg.form {
        Form::Momentum => momentum_pack(&cfg.params, &init)?,
        Form::Velocity => velocity_pack(&init),
    };
    let n = cfg.row_count();
    let mut rows = Vec::with_capacity(n);
    let mut rhs = |t: f64, y: &GroupState<12>| closed_loop_rate(cfg, t, y);
    for k in 0..n {
        let t = k as f64 * cfg.dt;
        rows.push(cfg.row(t, &unpack(cfg, &y)?)?);
        if k + 1 < n {
            y = rk4_step(&mut rhs, t, &y, cfg.dt)?;
        }
    }
    Ok(TrajectoryRecord { rows })
}

/// Thread cap from `ROLLCTL_THREADS`, if set to a positive integer.
pub fn thread_cap_from_env() -> Option<usize> {
    std::env::var("ROLLCTL_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs scenarios concurrently; results keep the input order.
pub fn run_batch(configs: &[ScenarioConfig], threads: Option<usize>) -> Vec<Result<TrajectoryRecord, SimError>> {
    let run = || configs.par_iter().map(run_scenario).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => configs.iter().map(run_scenario).collect(),
    }
}

/// Initial state at rest on the plane at `(x, y)`.
pub fn rest_state(params: &RobotParams, rotation: Rotation, x: f64, y: f64) -> RobotState {
    RobotState::at_rest(rotation, Vec3::new(x, y, params.radius))
}
