//! Fixed-step fourth-order Runge-Kutta on `SO(3) x R^N`.
//!
//! The rotation is advanced in the exponential chart at the start of the
//! step (Munthe-Kaas form), so each stage velocity is mapped through
//! `dexpinv` before being combined. The vector part is classical RK4.

use nalgebra::SVector;

use crate::liegroup::{dexpinv, exp_so3, project_so3, Rotation, Vec3};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupState<const N: usize> {
    pub rotation: Rotation,
    pub vector: SVector<f64, N>,
}

/// Body angular velocity of the rotation and rate of the vector part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupRate<const N: usize> {
    pub omega: Vec3,
    pub vector: SVector<f64, N>,
}

impl<const N: usize> GroupRate<N> {
    fn is_finite(&self) -> bool {
        self.omega.iter().chain(self.vector.iter()).all(|x| x.is_finite())
    }
}

fn checked<const N: usize>(rate: GroupRate<N>, t: f64) -> Result<GroupRate<N>, SimError> {
    if rate.is_finite() {
        Ok(rate)
    } else {
        Err(SimError::BlowUp { t })
    }
}

fn advance<const N: usize>(y: &GroupState<N>, u: &Vec3, dv: SVector<f64, N>) -> GroupState<N> {
    GroupState {
        rotation: y.rotation * exp_so3(u),
        vector: y.vector + dv,
    }
}

/// One step of size `dt` from `(t, y)`.
pub fn rk4_step<const N: usize, F>(rhs: &mut F, t: f64, y: &GroupState<N>, dt: f64) -> Result<GroupState<N>, SimError>
where
    F: FnMut(f64, &GroupState<N>) -> Result<GroupRate<N>, SimError>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::InvalidStep(dt));
    }
    let h2 = dt / 2.0;

    let f1 = checked(rhs(t, y)?, t)?;
    let k1 = f1.omega;

    let u2 = k1 * h2;
    let y2 = advance(y, &u2, f1.vector * h2);
    let f2 = checked(rhs(t + h2, &y2)?, t + h2)?;
    let k2 = dexpinv(&-u2, &f2.omega);

    let u3 = k2 * h2;
    let y3 = advance(y, &u3, f2.vector * h2);
    let f3 = checked(rhs(t + h2, &y3)?, t + h2)?;
    let k3 = dexpinv(&-u3, &f3.omega);

    let u4 = k3 * dt;
    let y4 = advance(y, &u4, f3.vector * dt);
    let f4 = checked(rhs(t + dt, &y4)?, t + dt)?;
    let k4 = dexpinv(&-u4, &f4.omega);

    let u = (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
    let dv = (f1.vector + (f2.vector + f3.vector) * 2.0 + f4.vector) * (dt / 6.0);
    let next = advance(y, &u, dv);
    if next.vector.iter().any(|x| !x.is_finite()) {
        return Err(SimError::BlowUp { t: t + dt });
    }
    let rotation = project_so3(next.rotation.matrix()).map_err(|_| SimError::BlowUp { t: t + dt })?;
    Ok(GroupState { rotation, vector: next.vector })
}
