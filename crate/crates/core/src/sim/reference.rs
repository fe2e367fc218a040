//! Reference trajectories.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::DesiredFrame;
use crate::liegroup::{exp_so3, Rotation, Vec3};

use super::SimError;

/// `R_d(t) = exp(2 pi (1 - cos pi t) e2)` with analytic rate and acceleration.
pub fn orientation_sinusoid(t: f64) -> DesiredFrame {
    let angle = 2.0 * PI * (1.0 - (PI * t).cos());
    DesiredFrame {
        rotation: exp_so3(&(Vec3::y() * angle)),
        omega: Vec3::y() * (2.0 * PI * PI * (PI * t).sin()),
        omega_dot: Vec3::y() * (2.0 * PI.powi(3) * (PI * t).cos()),
        position: Vec3::zeros(),
        velocity: Vec3::zeros(),
    }
}

/// Frame for a planar contact-point reference.
///
/// The no-spin angular velocity that rolls the sphere along `x_d` is
/// `e3 x x_d' / r`; `R_d = I`, so body and inertial reference rates agree.
pub fn planar_curve(x: Vec3, xdot: Vec3, xddot: Vec3, radius: f64) -> Result<DesiredFrame, SimError> {
    if xdot.z != 0.0 || xddot.z != 0.0 {
        return Err(SimError::NonPlanarReference(xdot.z));
    }
    Ok(DesiredFrame {
        rotation: Rotation::identity(),
        omega: Vec3::z().cross(&xdot) / radius,
        omega_dot: Vec3::z().cross(&xddot) / radius,
        position: Vec3::new(x.x, x.y, radius),
        velocity: xdot,
    })
}

/// Reference selection for a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reference {
    /// Identity attitude at the origin.
    Rest,
    /// Constant attitude, given row-major.
    OrientationConstant { rotation: [f64; 9] },
    OrientationSinusoid,
    /// `x_d = (c sin(k t), c cos(k t))`.
    Circle { radius: f64, rate: f64 },
    /// `x_d = offset + velocity t`.
    Line { velocity: [f64; 2], offset: [f64; 2] },
    /// Spin at `alpha` about the vertical while resting at the origin.
    VerticalSpin { alpha: f64 },
}

impl Reference {
    pub fn frame(&self, t: f64, sphere_radius: f64) -> Result<DesiredFrame, SimError> {
        match self {
            Reference::Rest => planar_curve(Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), sphere_radius),
            Reference::OrientationConstant { rotation } => {
                let r = Rotation::from_row_slice(rotation).map_err(|e| SimError::Config(e.to_string()))?;
                let mut d = DesiredFrame::fixed(r);
                d.position.z = sphere_radius;
                Ok(d)
            }
            Reference::OrientationSinusoid => Ok(orientation_sinusoid(t)),
            Reference::Circle { radius, rate } => {
                let (s, c) = (rate * t).sin_cos();
                let k = *rate;
                planar_curve(
                    Vec3::new(radius * s, radius * c, 0.0),
                    Vec3::new(radius * k * c, -radius * k * s, 0.0),
                    Vec3::new(-radius * k * k * s, -radius * k * k * c, 0.0),
                    sphere_radius,
                )
            }
            Reference::Line { velocity, offset } => planar_curve(
                Vec3::new(offset[0] + velocity[0] * t, offset[1] + velocity[1] * t, 0.0),
                Vec3::new(velocity[0], velocity[1], 0.0),
                Vec3::zeros(),
                sphere_radius,
            ),
            Reference::VerticalSpin { alpha } => {
                let mut d = planar_curve(Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), sphere_radius)?;
                d.omega = Vec3::z() * *alpha;
                Ok(d)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::hat;
    use crate::model::rolling_velocity;

    #[test]
    fn sinusoid_examples() {
        let d = orientation_sinusoid(0.0);
        assert!((d.rotation.matrix() - Rotation::identity().matrix()).norm() < 1e-15);
        assert_eq!(d.omega, Vec3::zeros());
        assert!((d.omega_dot - Vec3::y() * 2.0 * PI.powi(3)).norm() < 1e-12);
        let d = orientation_sinusoid(1.0);
        assert!((d.rotation.matrix() - Rotation::identity().matrix()).norm() < 1e-12);
    }

    #[test]
    fn sinusoid_rates_match_finite_differences() {
        let h = 1e-6;
        for &t in &[0.1, 0.37, 0.8, 1.45, 3.2] {
            let d = orientation_sinusoid(t);
            let rdot = (orientation_sinusoid(t + h).rotation.matrix() - orientation_sinusoid(t - h).rotation.matrix())
                / (2.0 * h);
            assert!((rdot - d.rotation.matrix() * hat(&d.omega)).norm() < 1e-6 * (1.0 + d.omega.norm()));
            let wdot = (orientation_sinusoid(t + h).omega - orientation_sinusoid(t - h).omega) / (2.0 * h);
            assert!((wdot - d.omega_dot).norm() < 1e-6 * (1.0 + d.omega_dot.norm()));
        }
    }

    #[test]
    fn circle_rate_from_constraint() {
        let r = 0.176;
        let c = Reference::Circle { radius: r, rate: 1.0 };
        let d = c.frame(0.0, r).unwrap();
        assert!((d.omega - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        for &t in &[0.3, 1.7, 4.0] {
            let d = c.frame(t, r).unwrap();
            assert!((d.omega - Vec3::new(t.sin(), t.cos(), 0.0)).norm() < 1e-14);
            // the reference rolls consistently: x_d' = (R_d w_d) x r e3
            assert!((rolling_velocity(&d.rotation, &d.omega, r) - d.velocity).norm() < 1e-15);
            let h = 1e-6;
            let fd = (c.frame(t + h, r).unwrap().omega - c.frame(t - h, r).unwrap().omega) / (2.0 * h);
            assert!((fd - d.omega_dot).norm() < 1e-8);
        }
    }

    #[test]
    fn line_rate_from_constraint() {
        let r = 0.176;
        let l = Reference::Line { velocity: [0.2, 0.3], offset: [0.4, 0.6] };
        let d = l.frame(2.0, r).unwrap();
        assert!((d.omega - Vec3::new(-1.7045, 1.1364, 0.0)).norm() < 1e-4);
        assert_eq!(d.omega_dot, Vec3::zeros());
        assert!((d.position - Vec3::new(0.8, 1.2, r)).norm() < 1e-15);
    }

    #[test]
    fn rest_and_non_planar() {
        let d = Reference::Rest.frame(3.0, 0.176).unwrap();
        assert_eq!(d.omega, Vec3::zeros());
        assert!(planar_curve(Vec3::zeros(), Vec3::z(), Vec3::zeros(), 0.176).is_err());
    }
}
