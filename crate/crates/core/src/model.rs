//! Physical parameters, state, and reduced equations of motion of the
//! rotor-driven rolling sphere.
//!
//! Two equivalent forms are provided. The momentum form evolves the shell
//! momentum `Pi_s` (with `Pi_s' = Pi_s x w`) and the rotor momenta
//! (`Pi_r' = u`); it is what the simulator integrates. The velocity form
//! evolves `w` directly through `M(G) w' = (I_s w + J th') x w - u` and is
//! what the controllers are written against.
//!
//! `M(G) = I_s - m_T r^2 hat(G)hat(G) = I_s + m_T r^2 (I - G G^T)` is the
//! inertia of the shell once the rolling constraint is imposed. Expanding
//! `d/dt (M w + J(w + th'))` with `G' = -w x G` shows the two forms agree
//! exactly: `M' w = -w x M w` cancels the metric part of `Pi_s x w`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liegroup::{hat, Mat3, Rotation, Vec3};

/// Tolerance on `|gamma| = 1` accepted by the constrained-inertia routines.
pub const GAMMA_UNIT_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("gamma not on sphere: |gamma| = {0}")]
    GammaNotUnit(f64),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("locked inertia is singular")]
    SingularInertia,
}

/// Masses, radius and inertias of the robot, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotParams {
    /// Shell mass (kg).
    pub shell_mass: f64,
    /// Mass of each of the three rotor assemblies (kg).
    pub rotor_mass: f64,
    /// Sphere radius (m).
    pub radius: f64,
    /// Diagonal of the shell inertia (kg m^2); the three entries must agree.
    pub shell_inertia: [f64; 3],
    /// Rotor spin inertia J_a (kg m^2).
    pub rotor_spin_inertia: f64,
    /// Rotor transverse inertia J_b (kg m^2), with J_a = 2 J_b.
    pub rotor_transverse_inertia: f64,
}

impl Default for RobotParams {
    /// The laboratory prototype: 1 kg shell, 0.672 kg rotors, r = 0.176 m,
    /// I_s = 0.0153 kg m^2, J_a = 0.672 kg cm^2.
    fn default() -> Self {
        RobotParams {
            shell_mass: 1.0,
            rotor_mass: 0.672,
            radius: 0.176,
            shell_inertia: [0.0153; 3],
            rotor_spin_inertia: 6.72e-5,
            rotor_transverse_inertia: 3.36e-5,
        }
    }
}

impl RobotParams {
    /// Builds parameters with `J_b = J_a / 2` and validates them.
    pub fn new(
        shell_mass: f64,
        rotor_mass: f64,
        radius: f64,
        shell_inertia: f64,
        rotor_spin_inertia: f64,
    ) -> Result<Self, ModelError> {
        let p = RobotParams {
            shell_mass,
            rotor_mass,
            radius,
            shell_inertia: [shell_inertia; 3],
            rotor_spin_inertia,
            rotor_transverse_inertia: rotor_spin_inertia / 2.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("shell_mass", self.shell_mass),
            ("rotor_mass", self.rotor_mass),
            ("radius", self.radius),
            ("shell_inertia", self.shell_inertia[0]),
            ("rotor_spin_inertia", self.rotor_spin_inertia),
            ("rotor_transverse_inertia", self.rotor_transverse_inertia),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::InvalidParam {
                    name,
                    reason: format!("must be finite and positive, got {value}"),
                });
            }
        }
        let i0 = self.shell_inertia[0];
        if self
            .shell_inertia
            .iter()
            .any(|&i| (i - i0).abs() > 1e-12 * i0.max(1.0))
        {
            return Err(ModelError::InvalidParam {
                name: "shell_inertia",
                reason: format!("entries must be equal, got {:?}", self.shell_inertia),
            });
        }
        if (self.rotor_spin_inertia - 2.0 * self.rotor_transverse_inertia).abs() > 1e-12 {
            return Err(ModelError::InvalidParam {
                name: "rotor_transverse_inertia",
                reason: "rotor inertias must satisfy J_a = 2 J_b".into(),
            });
        }
        Ok(())
    }

    /// m_T = m_s + 3 m_rotor.
    pub fn total_mass(&self) -> f64 {
        self.shell_mass + 3.0 * self.rotor_mass
    }

    /// The scalar m_T r^2 coupling the rolling constraint into the inertia.
    pub fn rolling_inertia(&self) -> f64 {
        self.total_mass() * self.radius * self.radius
    }

    pub fn shell_inertia_matrix(&self) -> Mat3 {
        Mat3::from_diagonal(&Vec3::from(self.shell_inertia))
    }

    /// J = J_a I.
    pub fn rotor_inertia_matrix(&self) -> Mat3 {
        Mat3::identity() * self.rotor_spin_inertia
    }
}

/// Full simulation state in velocity variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    /// Body-to-inertial rotation of the shell.
    pub rotation: Rotation,
    /// Shell body angular velocity (rad/s).
    pub omega: Vec3,
    /// Rotor angles relative to the shell (rad), unwrapped.
    pub theta: Vec3,
    /// Rotor rates (rad/s).
    pub theta_dot: Vec3,
    /// Sphere centre in the inertial frame (m).
    pub position: Vec3,
    /// Inertial vertical seen from the body, `R^T e3`.
    pub gamma: Vec3,
}

impl RobotState {
    /// State at rest at `position` with the given attitude; gamma is derived.
    pub fn at_rest(rotation: Rotation, position: Vec3) -> Self {
        RobotState {
            rotation,
            omega: Vec3::zeros(),
            theta: Vec3::zeros(),
            theta_dot: Vec3::zeros(),
            position,
            gamma: advected_vertical(&rotation),
        }
    }

    pub fn with_omega(mut self, omega: Vec3) -> Self {
        self.omega = omega;
        self
    }

    /// Recomputes gamma from the rotation.
    pub fn resync_gamma(&mut self) {
        self.gamma = advected_vertical(&self.rotation);
    }
}

/// State in momentum variables (shell momentum and rotor momenta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumState {
    pub rotation: Rotation,
    /// Shell body momentum `Pi_s` (kg m^2/s).
    pub pi_shell: Vec3,
    /// Rotor momenta `Pi_i = J_a (w_i + th'_i)`.
    pub pi_rotor: Vec3,
    pub theta: Vec3,
    pub position: Vec3,
    pub gamma: Vec3,
}

impl MomentumState {
    pub fn from_velocity(p: &RobotParams, s: &RobotState) -> Result<Self, ModelError> {
        Ok(MomentumState {
            rotation: s.rotation,
            pi_shell: body_momentum(p, &s.omega, &s.theta_dot, &s.gamma)?,
            pi_rotor: rotor_momentum(p, &s.omega, &s.theta_dot),
            theta: s.theta,
            position: s.position,
            gamma: s.gamma,
        })
    }

    /// Recovers `(w, th')` from the momenta.
    pub fn velocities(&self, p: &RobotParams) -> Result<(Vec3, Vec3), ModelError> {
        // Pi_s = (M + J) w + J th' and Pi_r = J (w + th') give M w = Pi_s - Pi_r.
        let m = lock_inertia(p, &self.gamma)?;
        let omega = m
            .cholesky()
            .ok_or(ModelError::SingularInertia)?
            .solve(&(self.pi_shell - self.pi_rotor));
        let theta_dot = self.pi_rotor / p.rotor_spin_inertia - omega;
        Ok((omega, theta_dot))
    }

    pub fn to_velocity(&self, p: &RobotParams) -> Result<RobotState, ModelError> {
        let (omega, theta_dot) = self.velocities(p)?;
        Ok(RobotState {
            rotation: self.rotation,
            omega,
            theta: self.theta,
            theta_dot,
            position: self.position,
            gamma: self.gamma,
        })
    }
}

/// `R^T e3`.
pub fn advected_vertical(r: &Rotation) -> Vec3 {
    r.transpose() * Vec3::z()
}

fn check_unit(gamma: &Vec3) -> Result<(), ModelError> {
    let n = gamma.norm();
    if (n - 1.0).abs() > GAMMA_UNIT_TOL || !n.is_finite() {
        return Err(ModelError::GammaNotUnit(n));
    }
    Ok(())
}

/// Constrained shell inertia `M(G) = I_s + m_T r^2 (I - G G^T)`.
pub fn lock_inertia(p: &RobotParams, gamma: &Vec3) -> Result<Mat3, ModelError> {
    check_unit(gamma)?;
    let g = hat(gamma);
    Ok(p.shell_inertia_matrix() - g * g * p.rolling_inertia())
}

/// `dM/dt` along `G' = gamma_dot`.
pub fn lock_inertia_rate(p: &RobotParams, gamma: &Vec3, gamma_dot: &Vec3) -> Mat3 {
    -(gamma_dot * gamma.transpose() + gamma * gamma_dot.transpose()) * p.rolling_inertia()
}

/// Shell momentum `Pi_s = (M(G) + J) w + J th'`.
pub fn body_momentum(
    p: &RobotParams,
    omega: &Vec3,
    theta_dot: &Vec3,
    gamma: &Vec3,
) -> Result<Vec3, ModelError> {
    let m = lock_inertia(p, gamma)?;
    let j = p.rotor_inertia_matrix();
    Ok((m + j) * omega + j * theta_dot)
}

/// Rotor momenta `J (w + th')`.
pub fn rotor_momentum(p: &RobotParams, omega: &Vec3, theta_dot: &Vec3) -> Vec3 {
    (omega + theta_dot) * p.rotor_spin_inertia
}

/// Centre velocity enforced by rolling without slipping: `x' = (R w) x r e3`.
pub fn rolling_velocity(rotation: &Rotation, omega: &Vec3, radius: f64) -> Vec3 {
    let w = rotation * omega;
    // (w x r e3) written out so the vertical component is exactly zero.
    Vec3::new(w.y * radius, -w.x * radius, 0.0)
}

/// Contact velocity in body coordinates, `r w x G`.
pub fn body_rolling_velocity(omega: &Vec3, gamma: &Vec3, radius: f64) -> Vec3 {
    omega.cross(gamma) * radius
}

/// `G' = -w x G`.
pub fn advection_rate(omega: &Vec3, gamma: &Vec3) -> Vec3 {
    -omega.cross(gamma)
}

/// Time derivatives in velocity variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityRates {
    pub rotation_dot: Mat3,
    pub omega_dot: Vec3,
    pub theta_ddot: Vec3,
    pub theta_dot: Vec3,
    pub position_dot: Vec3,
    pub gamma_dot: Vec3,
}

/// Time derivatives in momentum variables, plus the recovered velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumRates {
    pub rotation_dot: Mat3,
    pub pi_shell_dot: Vec3,
    pub pi_rotor_dot: Vec3,
    pub theta_dot: Vec3,
    pub position_dot: Vec3,
    pub gamma_dot: Vec3,
    /// Shell angular velocity the rates were evaluated at.
    pub omega: Vec3,
}

/// Recast equations: `M w' = (I_s w + J th') x w - u`, `J(w' + th'') = u`.
pub fn dynamics_velocity_form(
    p: &RobotParams,
    s: &RobotState,
    u: &Vec3,
) -> Result<VelocityRates, ModelError> {
    let m = lock_inertia(p, &s.gamma)?;
    let gyro = (p.shell_inertia_matrix() * s.omega + p.rotor_inertia_matrix() * s.theta_dot)
        .cross(&s.omega);
    let omega_dot = m
        .cholesky()
        .ok_or(ModelError::SingularInertia)?
        .solve(&(gyro - u));
    Ok(VelocityRates {
        rotation_dot: s.rotation.matrix() * hat(&s.omega),
        omega_dot,
        theta_ddot: u / p.rotor_spin_inertia - omega_dot,
        theta_dot: s.theta_dot,
        position_dot: rolling_velocity(&s.rotation, &s.omega, p.radius),
        gamma_dot: advection_rate(&s.omega, &s.gamma),
    })
}

/// Momentum equations: `Pi_s' = Pi_s x w`, `Pi_r' = u`.
pub fn dynamics_momentum_form(
    p: &RobotParams,
    s: &MomentumState,
    u: &Vec3,
) -> Result<MomentumRates, ModelError> {
    let (omega, theta_dot) = s.velocities(p)?;
    Ok(MomentumRates {
        rotation_dot: s.rotation.matrix() * hat(&omega),
        pi_shell_dot: s.pi_shell.cross(&omega),
        pi_rotor_dot: *u,
        theta_dot,
        position_dot: rolling_velocity(&s.rotation, &omega, p.radius),
        gamma_dot: advection_rate(&omega, &s.gamma),
        omega,
    })
}

/// Inertial shell momentum `pi_s = R Pi_s`, conserved for any rotor torque.
pub fn inertial_momentum(rotation: &Rotation, pi_shell: &Vec3) -> Vector3<f64> {
    rotation * pi_shell
}

/// Convenience for tests and diagnostics.
pub fn is_symmetric(m: &Matrix3<f64>, tol: f64) -> bool {
    (m - m.transpose()).norm() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::exp_so3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_unit(rng: &mut ChaCha8Rng) -> Vec3 {
        loop {
            let v = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if v.norm() > 0.1 {
                return v.normalize();
            }
        }
    }

    fn rand_vec(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
        Vec3::new(
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
        )
    }

    #[test]
    fn default_params_are_valid() {
        let p = RobotParams::default();
        p.validate().unwrap();
        assert!((p.total_mass() - 3.016).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(RobotParams::new(-1.0, 0.672, 0.176, 0.0153, 6.72e-5).is_err());
        let mut p = RobotParams::default();
        p.shell_inertia = [0.0153, 0.0153, 0.02];
        assert!(p.validate().is_err());
        let mut p = RobotParams::default();
        p.rotor_transverse_inertia = 1e-5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn lock_inertia_with_prototype_parameters() {
        let p = RobotParams::default();
        // I_s + m_T r^2 = 0.0153 + 3.016 * 0.176^2
        let big = 0.0153 + 3.016 * 0.176 * 0.176;
        let m = lock_inertia(&p, &Vec3::z()).unwrap();
        let expected = Mat3::from_diagonal(&Vec3::new(big, big, 0.0153));
        assert!((m - expected).norm() < 1e-15);
        assert!((big - 0.10872).abs() < 5e-6);
        let m = lock_inertia(&p, &Vec3::x()).unwrap();
        let expected = Mat3::from_diagonal(&Vec3::new(0.0153, big, big));
        assert!((m - expected).norm() < 1e-15);
    }

    #[test]
    fn lock_inertia_spectrum_and_symmetry() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let big = 0.0153 + p.rolling_inertia();
        for _ in 0..50 {
            let g = rand_unit(&mut rng);
            let m = lock_inertia(&p, &g).unwrap();
            assert!(is_symmetric(&m, 1e-15));
            let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((ev[0] - 0.0153).abs() < 1e-12);
            assert!((ev[1] - big).abs() < 1e-12);
            assert!((ev[2] - big).abs() < 1e-12);
        }
    }

    #[test]
    fn lock_inertia_rejects_non_unit_gamma() {
        let p = RobotParams::default();
        assert!(matches!(
            lock_inertia(&p, &Vec3::new(0.0, 0.0, 1.1)),
            Err(ModelError::GammaNotUnit(_))
        ));
    }

    #[test]
    fn body_momentum_examples() {
        let p = RobotParams::default();
        let z = Vec3::zeros();
        assert_eq!(body_momentum(&p, &z, &z, &Vec3::z()).unwrap(), z);
        let pi = body_momentum(&p, &Vec3::z(), &z, &Vec3::z()).unwrap();
        assert!((pi - Vec3::new(0.0, 0.0, 0.0153672)).norm() < 1e-15);
    }

    #[test]
    fn body_momentum_is_affine_in_rates() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = rand_unit(&mut rng);
            let (w1, w2, td) = (
                rand_vec(&mut rng, 3.0),
                rand_vec(&mut rng, 3.0),
                rand_vec(&mut rng, 3.0),
            );
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let z = Vec3::zeros();
            let lhs = body_momentum(&p, &(w1 * a + w2 * b), &td, &g).unwrap();
            let rhs = body_momentum(&p, &w1, &z, &g).unwrap() * a
                + body_momentum(&p, &w2, &z, &g).unwrap() * b
                + td * p.rotor_spin_inertia;
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn rolling_velocity_examples() {
        let r = Rotation::identity();
        assert_eq!(rolling_velocity(&r, &Vec3::z(), 0.176), Vec3::zeros());
        let v = rolling_velocity(&r, &Vec3::x(), 0.176);
        assert!((v - Vec3::new(0.0, -0.176, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn rolling_velocity_frame_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let rot = exp_so3(&rand_vec(&mut rng, 3.0));
            let w = rand_vec(&mut rng, 5.0);
            let xdot = rolling_velocity(&rot, &w, 0.176);
            assert_eq!(xdot.z, 0.0);
            let gamma = advected_vertical(&rot);
            let ybar = rot.transpose() * xdot;
            assert!((ybar - body_rolling_velocity(&w, &gamma, 0.176)).norm() < 1e-13);
            // componentwise cross product oracle
            let wi = rot * w;
            let c = Vec3::new(wi.y * 0.176, -wi.x * 0.176, 0.0);
            assert!((xdot - c).norm() < 1e-15);
        }
    }

    #[test]
    fn advection_examples() {
        let g = Vec3::new(0.3, -0.4, 0.5).normalize();
        assert!(advection_rate(&(g * 2.0), &g).norm() < 1e-15);
        assert_eq!(advection_rate(&Vec3::x(), &Vec3::z()), Vec3::new(0.0, 1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let g = rand_unit(&mut rng);
            let w = rand_vec(&mut rng, 4.0);
            assert!(g.dot(&advection_rate(&w, &g)).abs() < 1e-14);
        }
    }

    #[test]
    fn advection_matches_reconstruction() {
        // d/dt (R^T e3) with R' = R hat(w), by central differences.
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let r = exp_so3(&rand_vec(&mut rng, 3.0));
            let w = rand_vec(&mut rng, 3.0);
            let h = 1e-6;
            let rp = r * exp_so3(&(w * h));
            let rm = r * exp_so3(&(w * -h));
            let fd = (advected_vertical(&rp) - advected_vertical(&rm)) / (2.0 * h);
            let g = advected_vertical(&r);
            assert!((fd - advection_rate(&w, &g)).norm() < 1e-8);
        }
    }

    #[test]
    fn rest_is_equilibrium() {
        let p = RobotParams::default();
        let r = exp_so3(&Vec3::new(0.3, -0.2, 1.0));
        let s = RobotState::at_rest(r, Vec3::new(1.0, 2.0, 0.176));
        let rates = dynamics_velocity_form(&p, &s, &Vec3::zeros()).unwrap();
        assert_eq!(rates.omega_dot, Vec3::zeros());
        assert_eq!(rates.theta_ddot, Vec3::zeros());
        assert_eq!(rates.position_dot, Vec3::zeros());
        assert_eq!(rates.gamma_dot, Vec3::zeros());
        assert_eq!(rates.rotation_dot, Mat3::zeros());
        let ms = MomentumState::from_velocity(&p, &s).unwrap();
        let mr = dynamics_momentum_form(&p, &ms, &Vec3::zeros()).unwrap();
        assert_eq!(mr.pi_shell_dot, Vec3::zeros());
        assert_eq!(mr.position_dot, Vec3::zeros());
    }

    #[test]
    fn steady_vertical_spin() {
        let p = RobotParams::default();
        let s = RobotState::at_rest(Rotation::identity(), Vec3::zeros()).with_omega(Vec3::z());
        let rates = dynamics_velocity_form(&p, &s, &Vec3::zeros()).unwrap();
        assert!(rates.omega_dot.norm() < 1e-15);
        assert_eq!(rates.position_dot, Vec3::zeros());
        assert_eq!(rates.gamma_dot, Vec3::zeros());
    }

    #[test]
    fn momentum_round_trip() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20 {
            let r = exp_so3(&rand_vec(&mut rng, 3.0));
            let mut s = RobotState::at_rest(r, Vec3::zeros());
            s.omega = rand_vec(&mut rng, 5.0);
            s.theta_dot = rand_vec(&mut rng, 50.0);
            let ms = MomentumState::from_velocity(&p, &s).unwrap();
            let back = ms.to_velocity(&p).unwrap();
            assert!((back.omega - s.omega).norm() < 1e-12);
            assert!((back.theta_dot - s.theta_dot).norm() < 1e-9);
        }
    }

    #[test]
    fn forms_agree_on_instantaneous_rates() {
        // d/dt Pi_s computed from the velocity form must equal Pi_s x w.
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let r = exp_so3(&rand_vec(&mut rng, 3.0));
            let mut s = RobotState::at_rest(r, Vec3::zeros());
            s.omega = rand_vec(&mut rng, 5.0);
            s.theta_dot = rand_vec(&mut rng, 50.0);
            let u = rand_vec(&mut rng, 0.1);
            let vr = dynamics_velocity_form(&p, &s, &u).unwrap();
            let m = lock_inertia(&p, &s.gamma).unwrap();
            let mdot = lock_inertia_rate(&p, &s.gamma, &vr.gamma_dot);
            let j = p.rotor_spin_inertia;
            let pi_dot_from_velocity =
                mdot * s.omega + m * vr.omega_dot + (vr.omega_dot + vr.theta_ddot) * j;
            let ms = MomentumState::from_velocity(&p, &s).unwrap();
            let mr = dynamics_momentum_form(&p, &ms, &u).unwrap();
            assert!((pi_dot_from_velocity - mr.pi_shell_dot).norm() < 1e-12);
            assert!((mr.omega - s.omega).norm() < 1e-12);
        }
    }

    #[test]
    fn inertial_momentum_rate_vanishes() {
        // d/dt (R Pi_s) = R (w x Pi_s + Pi_s x w) = 0
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let r = exp_so3(&rand_vec(&mut rng, 3.0));
            let mut s = RobotState::at_rest(r, Vec3::zeros());
            s.omega = rand_vec(&mut rng, 5.0);
            s.theta_dot = rand_vec(&mut rng, 20.0);
            let ms = MomentumState::from_velocity(&p, &s).unwrap();
            let mr = dynamics_momentum_form(&p, &ms, &rand_vec(&mut rng, 1.0)).unwrap();
            let d = mr.rotation_dot * ms.pi_shell + r.matrix() * mr.pi_shell_dot;
            assert!(d.norm() < 1e-13);
            let pi = inertial_momentum(&r, &ms.pi_shell);
            assert!((pi.norm() - ms.pi_shell.norm()).abs() < 1e-14);
        }
        assert_eq!(
            inertial_momentum(&Rotation::identity(), &Vec3::new(1.0, 2.0, 3.0)),
            Vec3::new(1.0, 2.0, 3.0)
        );
    }
}
