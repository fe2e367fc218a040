//! Rotation group primitives: hat/vee, exponential and logarithm on SO(3),
//! polar projection, and the inverse differential of `exp` used by the
//! Lie-group integrator and the bracket charts.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Antisymmetry tolerance accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-9;
/// Angles at or beyond `PI - LOG_CUT_MARGIN` are rejected by [`log_so3`].
pub const LOG_CUT_MARGIN: f64 = 1e-6;
const EXP_SMALL_ANGLE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("not antisymmetric: |S + S^T| = {0:e}")]
    NotAntisymmetric(f64),
    #[error("log near cut locus: rotation angle {0} rad")]
    LogNearCutLocus(f64),
    #[error("non-orientable input: {0}")]
    NonOrientable(&'static str),
}

/// Element of SO(3), stored as a 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Wraps a matrix the caller already knows to be a rotation.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    /// Row-major entries.
    pub fn from_row_slice(entries: &[f64; 9]) -> Result<Self, LieError> {
        let m = Mat3::from_row_slice(entries);
        let r = Rotation(m);
        if r.orthogonality_error() > 1e-9 || (m.determinant() - 1.0).abs() > 1e-9 {
            return Err(LieError::NonOrientable("entries do not form a rotation"));
        }
        Ok(r)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    /// Frobenius norm of `R^T R - I`.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Rotation angle in [0, pi].
    pub fn angle(&self) -> f64 {
        ((self.0.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<&Rotation> for &Rotation {
    type Output = Rotation;
    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for Rotation {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

impl Mul<&Vec3> for &Rotation {
    type Output = Vec3;
    fn mul(self, rhs: &Vec3) -> Vec3 {
        self.0 * rhs
    }
}

/// Coordinate axis for elementary rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> Vec3 {
        match self {
            Axis::X => Vec3::x(),
            Axis::Y => Vec3::y(),
            Axis::Z => Vec3::z(),
        }
    }

    /// Accepts 1/2/3 as well as x/y/z.
    pub fn from_index(i: usize) -> Option<Axis> {
        match i {
            1 => Some(Axis::X),
            2 => Some(Axis::Y),
            3 => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn from_char(c: char) -> Option<Axis> {
        match c.to_ascii_lowercase() {
            'x' | '1' => Some(Axis::X),
            'y' | '2' => Some(Axis::Y),
            'z' | '3' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// Cross-product matrix: `hat(v) * w == v.cross(w)`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`]. Rejects matrices whose symmetric part exceeds [`SKEW_TOL`].
pub fn vee(s: &Mat3) -> Result<Vec3, LieError> {
    let asym = (s + s.transpose()).norm();
    if asym > SKEW_TOL {
        return Err(LieError::NotAntisymmetric(asym));
    }
    Ok(vee_unchecked(s))
}

/// Reads the three upper/lower entries without checking antisymmetry;
/// averaging makes it the vee of the skew part.
pub(crate) fn vee_unchecked(s: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (s[(2, 1)] - s[(1, 2)]),
        0.5 * (s[(0, 2)] - s[(2, 0)]),
        0.5 * (s[(1, 0)] - s[(0, 1)]),
    )
}

/// Rodrigues formula, with a second-order Taylor expansion for tiny angles.
pub fn exp_so3(v: &Vec3) -> Rotation {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    let k = hat(v);
    let (a, b) = if theta < EXP_SMALL_ANGLE {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Rotation(Mat3::identity() + k * a + k * k * b)
}

/// Principal logarithm. Fails within [`LOG_CUT_MARGIN`] of a half turn.
pub fn log_so3(r: &Rotation) -> Result<Vec3, LieError> {
    let theta = r.angle();
    if theta >= PI - LOG_CUT_MARGIN {
        return Err(LieError::LogNearCutLocus(theta));
    }
    let axis_part = vee_unchecked(&r.0);
    // axis_part = sin(theta) * n
    let scale = if theta < 1e-8 {
        1.0 + theta * theta / 6.0
    } else {
        theta / theta.sin()
    };
    Ok(axis_part * scale)
}

/// Orthogonal polar factor of `a`, i.e. the nearest rotation in Frobenius norm.
pub fn project_so3(a: &Mat3) -> Result<Rotation, LieError> {
    if !a.iter().all(|x| x.is_finite()) {
        return Err(LieError::NonOrientable("non-finite entries"));
    }
    if a.determinant() <= 0.0 {
        return Err(LieError::NonOrientable("determinant is not positive"));
    }
    let svd = a.svd(true, true);
    let s = svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    if !(smin > 1e-12 * smax) {
        return Err(LieError::NonOrientable("singular values collapsed"));
    }
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(LieError::NonOrientable("decomposition failed")),
    };
    Ok(Rotation(u * vt))
}

/// Rotation by `angle` radians about a coordinate axis.
pub fn elem_rot(axis: Axis, angle: f64) -> Rotation {
    let (s, c) = angle.sin_cos();
    let m = match axis {
        Axis::X => Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        Axis::Y => Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        Axis::Z => Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
    };
    Rotation(m)
}

/// Product of elementary rotations, applied left to right as written.
pub fn compose_elementary(seq: &[(Axis, f64)]) -> Rotation {
    seq.iter()
        .fold(Rotation::identity(), |acc, &(axis, angle)| {
            acc * elem_rot(axis, angle)
        })
}

/// Inverse of the left-trivialized differential of `exp`:
/// `dexpinv(u, v) = v - u x v / 2 + c(|u|) u x (u x v)`.
///
/// For body-frame (right-trivialized) motion `R = R0 exp(u(t))` with body
/// velocity `w`, the chart velocity is `u' = dexpinv(-u, w)`.
pub fn dexpinv(u: &Vec3, v: &Vec3) -> Vec3 {
    let theta2 = u.norm_squared();
    let c = if theta2 < 1e-6 {
        1.0 / 12.0 + theta2 / 720.0
    } else {
        let theta = theta2.sqrt();
        let half = 0.5 * theta;
        (1.0 - half / half.tan()) / theta2
    };
    let uv = u.cross(v);
    v - uv * 0.5 + u.cross(&uv) * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
        Vec3::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    #[test]
    fn hat_of_unit_x() {
        let h = hat(&Vec3::x());
        let expected = Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert_eq!(h, expected);
        assert_eq!(hat(&Vec3::zeros()), Mat3::zeros());
    }

    #[test]
    fn hat_matches_componentwise_cross() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v = rand_vec(&mut rng, 5.0);
            let w = rand_vec(&mut rng, 5.0);
            let cross = Vec3::new(
                v.y * w.z - v.z * w.y,
                v.z * w.x - v.x * w.z,
                v.x * w.y - v.y * w.x,
            );
            assert!((hat(&v) * w - cross).norm() < 1e-12);
        }
    }

    #[test]
    fn vee_inverts_hat() {
        let v = Vec3::new(3.0, -2.0, 7.0);
        assert_eq!(vee(&hat(&v)).unwrap(), v);
        assert_eq!(vee(&Mat3::zeros()).unwrap(), Vec3::zeros());
    }

    #[test]
    fn vee_rejects_symmetric_part() {
        let mut s = hat(&Vec3::new(1.0, 2.0, 3.0));
        s[(0, 1)] += 1e-6;
        assert!(matches!(vee(&s), Err(LieError::NotAntisymmetric(_))));
    }

    #[test]
    fn vee_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = Mat3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let s = (a - a.transpose()) / 2.0;
            let expected = Vec3::new(
                a[(2, 1)] - a[(1, 2)],
                a[(0, 2)] - a[(2, 0)],
                a[(1, 0)] - a[(0, 1)],
            ) / 2.0;
            assert!((vee(&s).unwrap() - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn exp_quarter_turn_about_z() {
        let r = exp_so3(&Vec3::new(0.0, 0.0, PI / 2.0));
        assert!((r * Vec3::x() - Vec3::y()).norm() < 1e-15);
        assert_eq!(exp_so3(&Vec3::zeros()), Rotation::identity());
    }

    #[test]
    fn exp_matches_power_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut v = rand_vec(&mut rng, 1.0);
            if v.norm() > 1.0 {
                v /= v.norm();
            }
            let k = hat(&v);
            let mut term = Mat3::identity();
            let mut sum = Mat3::identity();
            for n in 1..20 {
                term = term * k / n as f64;
                sum += term;
            }
            assert!((exp_so3(&v).matrix() - sum).norm() < 1e-10);
        }
    }

    #[test]
    fn exp_is_periodic_and_orthogonal() {
        let n = Vec3::new(1.0, -2.0, 0.5).normalize();
        let a = exp_so3(&(n * 0.7));
        let b = exp_so3(&(n * (0.7 + 2.0 * PI)));
        assert!((a.matrix() - b.matrix()).norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let r = exp_so3(&rand_vec(&mut rng, 10.0));
            assert!(r.orthogonality_error() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_small_angle_branch_is_accurate() {
        let v = Vec3::new(3e-9, -1e-9, 2e-9);
        let r = exp_so3(&v);
        let expected = Mat3::identity() + hat(&v);
        assert!((r.matrix() - expected).norm() < 1e-16);
    }

    #[test]
    fn log_of_elementary_rotation() {
        let v = log_so3(&elem_rot(Axis::X, PI / 9.0)).unwrap();
        assert!((v - Vec3::new(PI / 9.0, 0.0, 0.0)).norm() < 1e-14);
        assert_eq!(log_so3(&Rotation::identity()).unwrap(), Vec3::zeros());
    }

    #[test]
    fn log_rejects_half_turn() {
        let r = elem_rot(Axis::Y, PI);
        assert!(matches!(log_so3(&r), Err(LieError::LogNearCutLocus(_))));
    }

    #[test]
    fn exp_log_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let axis = rand_vec(&mut rng, 1.0).normalize();
            let angle = rng.gen_range(0.0..3.0);
            let r = exp_so3(&(axis * angle));
            let back = exp_so3(&log_so3(&r).unwrap());
            assert!((back.matrix() - r.matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn project_is_idempotent_and_removes_scale() {
        let r = compose_elementary(&[(Axis::X, 0.3), (Axis::Z, -1.2)]);
        let p = project_so3(r.matrix()).unwrap();
        assert!((p.matrix() - r.matrix()).norm() < 1e-14);
        let q = project_so3(&(Mat3::identity() * 1.01)).unwrap();
        assert!((q.matrix() - Mat3::identity()).norm() < 1e-14);
    }

    #[test]
    fn project_perturbation_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let r = exp_so3(&rand_vec(&mut rng, 3.0));
            let e = Mat3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let e = e * (1e-4 / e.norm());
            let p = project_so3(&(r.matrix() + e)).unwrap();
            assert!((p.matrix() - r.matrix()).norm() <= 2e-4);
        }
    }

    #[test]
    fn project_rejects_reflections_and_collapse() {
        let reflect = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(project_so3(&reflect).is_err());
        let flat = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, 1e-30));
        assert!(project_so3(&flat).is_err());
    }

    #[test]
    fn elementary_rotations() {
        let r = elem_rot(Axis::Z, PI / 3.0);
        let expected = Vec3::new((PI / 3.0).cos(), (PI / 3.0).sin(), 0.0);
        assert!((r * Vec3::x() - expected).norm() < 1e-15);
        assert_eq!(elem_rot(Axis::X, 0.0), Rotation::identity());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let axis = Axis::from_index(rng.gen_range(1..=3)).unwrap();
            let angle = rng.gen_range(-7.0..7.0);
            let a = elem_rot(axis, angle);
            let b = exp_so3(&(axis.unit() * angle));
            assert!((a.matrix() - b.matrix()).norm() < 1e-14);
        }
    }

    #[test]
    fn trace_of_hat_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let x = rand_vec(&mut rng, 2.0);
            let y = rand_vec(&mut rng, 2.0);
            assert!(((hat(&x) * hat(&y)).trace() + 2.0 * x.dot(&y)).abs() < 1e-12);
            assert!((hat(&x) * y + hat(&y) * x).norm() < 1e-14);
        }
    }

    #[test]
    fn dexpinv_matches_finite_difference_of_exp() {
        // R(t) = exp(u + t*du): body velocity w = vee(R^T R'), and
        // dexpinv(-u, w) must recover du.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let u = rand_vec(&mut rng, 1.5);
            let du = rand_vec(&mut rng, 1.0);
            let h = 1e-6;
            let rp = exp_so3(&(u + du * h));
            let rm = exp_so3(&(u - du * h));
            let r = exp_so3(&u);
            let rdot = (rp.matrix() - rm.matrix()) / (2.0 * h);
            let w = vee_unchecked(&(r.matrix().transpose() * rdot));
            assert!((dexpinv(&(-u), &w) - du).norm() < 1e-8);
        }
    }
}
