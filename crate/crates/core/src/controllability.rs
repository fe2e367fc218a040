//! Input fields, fiber fields, numerical Lie brackets and rank certificates.
//!
//! Brackets are taken in a local exponential chart centred at the
//! evaluation point: a rotation near `R0` is written `R0 exp(hat(xi))`, so
//! the chart origin is the point itself and tangent vectors in the
//! rotation slot are body-frame angular velocities there.

use nalgebra::{DMatrix, DVector, Rotation3, Unit};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{grad_trace_potential, DesiredFrame, GeometryError, Gains};
use crate::liegroup::{dexpinv, elem_rot, exp_so3, Axis, Mat3, Rotation, Vec3};
use crate::model::{advected_vertical, lock_inertia, rolling_velocity, ModelError, RobotParams, RobotState};

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-8;
/// Default finite-difference step for brackets.
pub const BRACKET_STEP: f64 = 1e-4;
/// Smallest step accepted before reporting underflow.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControllabilityError {
    #[error("bracket step underflow (h = {0:e})")]
    StepUnderflow(f64),
    #[error("non-finite entry in rank test")]
    NonFinite,
    #[error("vector field dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `A(G) = (M(G) + J)^{-1} J`. At zero shell momentum `w = -A th'`.
pub fn mechanical_connection(p: &RobotParams, gamma: &Vec3) -> Result<Mat3, ModelError> {
    let m = lock_inertia(p, gamma)?;
    let j = p.rotor_inertia_matrix();
    let chol = (m + j).cholesky().ok_or(ModelError::SingularInertia)?;
    Ok(chol.solve(&j))
}

fn inverse_lock_inertia(p: &RobotParams, gamma: &Vec3) -> Result<Mat3, ModelError> {
    Ok(lock_inertia(p, gamma)?
        .cholesky()
        .ok_or(ModelError::SingularInertia)?
        .inverse())
}

/// Input fields on `SO(3) x R^3` as 6-vectors `(rotation slot, w slot)`:
/// `g_i = (0, -M^{-1} e_i)`.
pub fn input_fields(p: &RobotParams, s: &RobotState) -> Result<[DVector<f64>; 3], ModelError> {
    let minv = inverse_lock_inertia(p, &s.gamma)?;
    Ok(std::array::from_fn(|i| {
        let mut v = DVector::zeros(6);
        v.fixed_rows_mut::<3>(3).copy_from(&(-minv.column(i)));
        v
    }))
}

/// Rotation slot of `[g_i, F_cl]` in closed form: `-M^{-1} e_i` (body frame;
/// the matrix tangent is `R hat(-M^{-1} e_i)`).
pub fn closed_form_bracket_top(p: &RobotParams, s: &RobotState) -> Result<[Vec3; 3], ModelError> {
    let minv = inverse_lock_inertia(p, &s.gamma)?;
    Ok(std::array::from_fn(|i| -minv.column(i).into_owned()))
}

/// Fiber fields as 8-vectors `(so(3), shape, plane)`:
/// `(-A e_i, e_i, horizontal part of (R (-A e_i)) x r e3)`.
pub fn fiber_fields(p: &RobotParams, rotation: &Rotation) -> Result<[DVector<f64>; 3], ModelError> {
    let gamma = advected_vertical(rotation);
    let a = mechanical_connection(p, &gamma)?;
    Ok(std::array::from_fn(|i| fiber_field_from(p, rotation, &a, i)))
}

fn fiber_field_from(p: &RobotParams, rotation: &Rotation, a: &Mat3, i: usize) -> DVector<f64> {
    let w = -a.column(i).into_owned();
    let xdot = rolling_velocity(rotation, &w, p.radius);
    let mut v = DVector::zeros(8);
    v.fixed_rows_mut::<3>(0).copy_from(&w);
    v[3 + i] = 1.0;
    v[6] = xdot.x;
    v[7] = xdot.y;
    v
}

/// Some rotation whose advected vertical `R^T e3` equals `gamma`.
pub fn rotation_with_vertical(gamma: &Vec3) -> Rotation {
    let g = gamma.normalize();
    match Rotation3::rotation_between(&g, &Vec3::z()) {
        Some(r) => Rotation::from_matrix_unchecked(*r.matrix()),
        None => elem_rot(Axis::X, std::f64::consts::PI),
    }
}

/// Jacobian of `f` at `z` by central differences with one Richardson level.
fn jacobian<F>(f: &F, z: &DVector<f64>, h: f64) -> Result<DMatrix<f64>, ControllabilityError>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    if !(h.is_finite() && h >= MIN_STEP) {
        return Err(ControllabilityError::StepUnderflow(h));
    }
    let n = z.len();
    let m = f(z).len();
    let mut jac = DMatrix::zeros(m, n);
    let central = |k: usize, step: f64| {
        let mut zp = z.clone();
        let mut zm = z.clone();
        zp[k] += step;
        zm[k] -= step;
        (f(&zp) - f(&zm)) / (2.0 * step)
    };
    for k in 0..n {
        if z[k] + h / 2.0 == z[k] {
            return Err(ControllabilityError::StepUnderflow(h));
        }
        let coarse = central(k, h);
        let fine = central(k, h / 2.0);
        jac.set_column(k, &((fine * 4.0 - coarse) / 3.0));
    }
    Ok(jac)
}

/// `[X, Y](z) = DY(z) X(z) - DX(z) Y(z)` in chart coordinates.
///
/// This is the derivative at `t = 0` of the pullback of `Y` by the flow of
/// `X`; the Jacobians are taken by Richardson-extrapolated central
/// differences with step `h`.
pub fn lie_bracket_numeric<X, Y>(
    x: &X,
    y: &Y,
    z: &DVector<f64>,
    h: f64,
) -> Result<DVector<f64>, ControllabilityError>
where
    X: Fn(&DVector<f64>) -> DVector<f64>,
    Y: Fn(&DVector<f64>) -> DVector<f64>,
{
    let (xv, yv) = (x(z), y(z));
    if xv.len() != z.len() || yv.len() != z.len() {
        return Err(ControllabilityError::Dimension(xv.len().max(yv.len()), z.len()));
    }
    let jx = jacobian(x, z, h)?;
    let jy = jacobian(y, z, h)?;
    Ok(jy * xv - jx * yv)
}

/// Numerical rank with singular values (descending).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

impl RankReport {
    pub fn min_singular_value(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Smallest singular value relative to the largest.
    pub fn relative_gap(&self) -> f64 {
        match self.singular_values.first() {
            Some(&top) if top > 0.0 => self.min_singular_value() / top,
            _ => 0.0,
        }
    }
}

pub fn numerical_rank(columns: &[DVector<f64>]) -> Result<RankReport, ControllabilityError> {
    if columns.is_empty() {
        return Ok(RankReport { rank: 0, singular_values: Vec::new() });
    }
    if columns.iter().any(|c| c.iter().any(|x| !x.is_finite())) {
        return Err(ControllabilityError::NonFinite);
    }
    let m = DMatrix::from_columns(columns);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| top > 0.0 && s > RANK_TOL * top).count();
    Ok(RankReport { rank, singular_values: sv })
}

/// Options for [`local_rank_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRankOptions {
    pub target: DesiredFrame,
    pub gains: Gains,
    pub step: f64,
    /// Replaces `M^{-1}` everywhere it appears; used to build degenerate
    /// counterexamples.
    pub inverse_override: Option<Mat3>,
}

impl Default for LocalRankOptions {
    fn default() -> Self {
        LocalRankOptions {
            target: DesiredFrame::fixed(Rotation::identity()),
            gains: Gains::default(),
            step: BRACKET_STEP,
            inverse_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalRankReport {
    pub rank: RankReport,
    /// Numeric rotation slot of `[g_i, F_cl]` for i = 1..3.
    pub bracket_tops: Vec<[f64; 3]>,
    /// Largest deviation of `bracket_tops` from the closed form.
    pub closed_form_error: f64,
}

/// Chart-local system on `SO(3) x R^3` around `s`: the closed-loop drift
/// with zero dissipative input, and the three input fields. Rotor rates are
/// held at their values in `s`.
struct LocalSystem<'a> {
    p: &'a RobotParams,
    s: &'a RobotState,
    opts: &'a LocalRankOptions,
}

impl LocalSystem<'_> {
    fn state_at(&self, z: &DVector<f64>) -> RobotState {
        let xi = Vec3::new(z[0], z[1], z[2]);
        let mut q = *self.s;
        q.rotation = self.s.rotation * exp_so3(&xi);
        q.omega = Vec3::new(z[3], z[4], z[5]);
        q.resync_gamma();
        q
    }

    fn minv(&self, q: &RobotState) -> Mat3 {
        match self.opts.inverse_override {
            Some(b) => b,
            None => inverse_lock_inertia(self.p, &q.gamma).unwrap_or_else(|_| Mat3::from_element(f64::NAN)),
        }
    }

    fn drift(&self, z: &DVector<f64>) -> DVector<f64> {
        let q = self.state_at(z);
        let p = self.p;
        let d = &self.opts.target;
        let kp = self.opts.gains.kp_matrix();
        let dv = grad_trace_potential(&q.rotation, &d.rotation, &kp)
            .unwrap_or_else(|_| Vec3::from_element(f64::NAN));
        let ff = crate::geometry::feedforward(p, &q, d).unwrap_or_else(|_| Vec3::from_element(f64::NAN));
        let u = dv - ff;
        let gyro = (p.shell_inertia_matrix() * q.omega + p.rotor_inertia_matrix() * q.theta_dot)
            .cross(&q.omega);
        let wdot = self.minv(&q) * (gyro - u);
        let xi = Vec3::new(z[0], z[1], z[2]);
        let xidot = dexpinv(&-xi, &q.omega);
        DVector::from_iterator(6, xidot.iter().chain(wdot.iter()).copied())
    }

    fn input(&self, z: &DVector<f64>, i: usize) -> DVector<f64> {
        let q = self.state_at(z);
        let col = -self.minv(&q).column(i).into_owned();
        let mut v = DVector::zeros(6);
        v.fixed_rows_mut::<3>(3).copy_from(&col);
        v
    }
}

/// Rank of `{g_1, g_2, g_3, [F_cl, g_1], [F_cl, g_2], [F_cl, g_3]}`.
pub fn local_rank_report(
    p: &RobotParams,
    s: &RobotState,
    opts: &LocalRankOptions,
) -> Result<LocalRankReport, ControllabilityError> {
    let mut s = *s;
    s.resync_gamma();
    let sys = LocalSystem { p, s: &s, opts };
    let z0 = DVector::from_iterator(6, Vec3::zeros().iter().chain(s.omega.iter()).copied());
    let drift = |z: &DVector<f64>| sys.drift(z);
    let mut cols = Vec::with_capacity(6);
    let mut brackets = Vec::with_capacity(3);
    for i in 0..3 {
        cols.push(sys.input(&z0, i));
    }
    for i in 0..3 {
        let gi = |z: &DVector<f64>| sys.input(z, i);
        brackets.push(lie_bracket_numeric(&drift, &gi, &z0, opts.step)?);
    }
    let closed: [Vec3; 3] = match opts.inverse_override {
        Some(b) => std::array::from_fn(|i| -b.column(i).into_owned()),
        None => closed_form_bracket_top(p, &s)?,
    };
    let mut bracket_tops = Vec::with_capacity(3);
    let mut closed_form_error: f64 = 0.0;
    for (i, b) in brackets.iter().enumerate() {
        // [g_i, F_cl] = -[F_cl, g_i]
        let top = -Vec3::new(b[0], b[1], b[2]);
        closed_form_error = closed_form_error.max((top - closed[i]).norm());
        bracket_tops.push([top.x, top.y, top.z]);
    }
    cols.extend(brackets);
    Ok(LocalRankReport { rank: numerical_rank(&cols)?, bracket_tops, closed_form_error })
}

/// Local controllability rank at `s` with default gains and an identity
/// target; 6 means the brackets span the tangent space.
pub fn local_rank(p: &RobotParams, s: &RobotState) -> Result<usize, ControllabilityError> {
    Ok(local_rank_report(p, s, &LocalRankOptions::default())?.rank.rank)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRank {
    pub pair: (usize, usize),
    pub rank: usize,
    pub min_singular_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberRankReport {
    /// Rank of `{g1, g2, g3, [g1,g2], [g1,g3]}` on `so(3) + R^2`.
    pub rank: RankReport,
    /// Rank with all three pairwise brackets.
    pub all_brackets: RankReport,
    /// Rank of the three fields with one bracket `[gi, gj]` at a time.
    pub pairs: Vec<PairRank>,
}

/// Fiber fields in the chart `(xi, theta, x, y)` around `rotation`.
fn fiber_chart_field(p: &RobotParams, rotation: &Rotation, i: usize, z: &DVector<f64>) -> DVector<f64> {
    let xi = Vec3::new(z[0], z[1], z[2]);
    let r = *rotation * exp_so3(&xi);
    let a = mechanical_connection(p, &advected_vertical(&r))
        .unwrap_or_else(|_| Mat3::from_element(f64::NAN));
    let mut v = fiber_field_from(p, &r, &a, i);
    let w = Vec3::new(v[0], v[1], v[2]);
    v.fixed_rows_mut::<3>(0).copy_from(&dexpinv(&-xi, &w));
    v
}

fn restrict_to_fiber(v: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![v[0], v[1], v[2], v[6], v[7]])
}

pub fn fiber_rank_report_at(
    p: &RobotParams,
    rotation: &Rotation,
    h: f64,
) -> Result<FiberRankReport, ControllabilityError> {
    let z0 = DVector::zeros(8);
    let field = |i: usize| move |z: &DVector<f64>| fiber_chart_field(p, rotation, i, z);
    let base: Vec<DVector<f64>> = (0..3).map(|i| field(i)(&z0)).collect();
    let mut brackets = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        brackets.push(((i, j), lie_bracket_numeric(&field(i), &field(j), &z0, h)?));
    }
    let fiber_cols = |extra: &[&DVector<f64>]| {
        base.iter()
            .chain(extra.iter().copied())
            .map(restrict_to_fiber)
            .collect::<Vec<_>>()
    };
    let rank = numerical_rank(&fiber_cols(&[&brackets[0].1, &brackets[1].1]))?;
    let all_brackets = numerical_rank(&fiber_cols(&[&brackets[0].1, &brackets[1].1, &brackets[2].1]))?;
    let pairs = brackets
        .iter()
        .map(|((i, j), b)| {
            let r = numerical_rank(&fiber_cols(&[b]))?;
            Ok(PairRank { pair: (i + 1, j + 1), rank: r.rank, min_singular_value: r.min_singular_value() })
        })
        .collect::<Result<_, ControllabilityError>>()?;
    Ok(FiberRankReport { rank, all_brackets, pairs })
}

pub fn fiber_rank_report(p: &RobotParams, gamma: &Vec3, h: f64) -> Result<FiberRankReport, ControllabilityError> {
    fiber_rank_report_at(p, &rotation_with_vertical(gamma), h)
}

/// Fiber controllability rank at the attitude class of `gamma`; 5 means
/// `SO(3) x R^2` is spanned.
pub fn fiber_rank(p: &RobotParams, gamma: &Vec3) -> Result<usize, ControllabilityError> {
    Ok(fiber_rank_report(p, gamma, BRACKET_STEP)?.rank.rank)
}

/// Uniformly random unit vector from a Gaussian triple.
pub fn random_unit<R: rand::Rng>(rng: &mut R) -> Vec3 {
    use rand::distributions::Distribution;
    let normal = rand::distributions::Uniform::new(-1.0, 1.0);
    loop {
        let v = Vec3::new(normal.sample(rng), normal.sample(rng), normal.sample(rng));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Uniformly random rotation.
pub fn random_rotation<R: rand::Rng>(rng: &mut R) -> Rotation {
    let axis = Unit::new_normalize(random_unit(rng));
    let angle = rng.gen_range(0.0..std::f64::consts::PI);
    exp_so3(&(axis.into_inner() * angle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::body_momentum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng) -> RobotState {
        let mut s = RobotState::at_rest(random_rotation(rng), Vec3::zeros()).with_omega(Vec3::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ));
        s.theta_dot = Vec3::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), 0.0);
        s
    }

    #[test]
    fn connection_on_symmetry_axis() {
        let p = RobotParams::default();
        let a = mechanical_connection(&p, &Vec3::z()).unwrap();
        let ja = p.rotor_spin_inertia;
        let lateral = p.shell_inertia[0] + p.rolling_inertia() + ja;
        let axial = p.shell_inertia[2] + ja;
        assert!((a[(0, 0)] - ja / lateral).abs() < 1e-15);
        assert!((a[(2, 2)] - ja / axial).abs() < 1e-15);
        assert!((a[(0, 0)] - 6.177e-4).abs() < 1e-6);
        assert!((a[(2, 2)] - 4.372e-3).abs() < 1e-6);
        assert!(a[(0, 1)].abs() < 1e-18);
    }

    #[test]
    fn connection_zero_momentum_and_bound() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..100 {
            let gamma = random_unit(&mut rng);
            let a = mechanical_connection(&p, &gamma).unwrap();
            let thd = Vec3::new(rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0));
            let pi = body_momentum(&p, &(-a * thd), &thd, &gamma).unwrap();
            assert!(pi.norm() < 1e-15 * (1.0 + thd.norm()));
            assert!(a.iter().all(|x| x.abs() <= 4.4e-3));
        }
    }

    #[test]
    fn input_fields_examples() {
        let p = RobotParams::default();
        let s = RobotState::at_rest(Rotation::identity(), Vec3::zeros());
        let g = input_fields(&p, &s).unwrap();
        assert!((g[2][5] + 1.0 / 0.0153).abs() < 1e-10);
        assert!((g[2][5] + 65.36).abs() < 1e-2);
        assert!(g.iter().all(|v| v.rows(0, 3).norm() == 0.0));
        assert_eq!(numerical_rank(&g).unwrap().rank, 3);
    }

    #[test]
    fn fiber_fields_examples() {
        let p = RobotParams::default();
        let f = fiber_fields(&p, &Rotation::identity()).unwrap();
        assert!(f[2][6].abs() < 1e-18 && f[2][7].abs() < 1e-18);
        for (i, v) in f.iter().enumerate() {
            for k in 0..3 {
                assert_eq!(v[3 + k], if k == i { 1.0 } else { 0.0 });
            }
        }
        let top: Vec<_> = f.iter().map(|v| DVector::from_column_slice(&v.as_slice()[0..3])).collect();
        assert_eq!(numerical_rank(&top).unwrap().rank, 3);
        let plane: Vec<_> = f.iter().map(|v| DVector::from_column_slice(&v.as_slice()[6..8])).collect();
        assert!(numerical_rank(&plane).unwrap().rank <= 2);
    }

    #[test]
    fn bracket_trivial_cases() {
        let z = DVector::from_vec(vec![0.1, -0.2, 0.3]);
        let x = |z: &DVector<f64>| DVector::from_vec(vec![z[1] * z[2], z[0].sin(), z[0] * z[1]]);
        let c = |_: &DVector<f64>| DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let d = |_: &DVector<f64>| DVector::from_vec(vec![-1.0, 0.5, 0.0]);
        assert!(lie_bracket_numeric(&x, &x, &z, 1e-4).unwrap().norm() < 1e-12);
        assert!(lie_bracket_numeric(&c, &d, &z, 1e-4).unwrap().norm() < 1e-12);
        assert!(matches!(
            lie_bracket_numeric(&x, &c, &z, 1e-20),
            Err(ControllabilityError::StepUnderflow(_))
        ));
    }

    #[test]
    fn bracket_matches_analytic_linear_fields() {
        // For linear fields Ax, Bx the bracket is (BA - AB) x.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let b = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let z = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let (a2, b2) = (a.clone(), b.clone());
        let x = move |z: &DVector<f64>| &a2 * z;
        let y = move |z: &DVector<f64>| &b2 * z;
        let br = lie_bracket_numeric(&x, &y, &z, 1e-3).unwrap();
        assert!((br - (&b * &a - &a * &b) * &z).norm() < 1e-10);
        let back = lie_bracket_numeric(&y, &x, &z, 1e-3).unwrap();
        assert!((lie_bracket_numeric(&x, &y, &z, 1e-3).unwrap() + back).norm() < 1e-12);
    }

    #[test]
    fn local_rank_is_full_with_closed_form_agreement() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let s = random_state(&mut rng);
            let rep = local_rank_report(&p, &s, &LocalRankOptions::default()).unwrap();
            assert_eq!(rep.rank.rank, 6);
            assert!(rep.closed_form_error < 1e-5, "{}", rep.closed_form_error);
        }
    }

    #[test]
    fn local_rank_stable_across_steps() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let s = random_state(&mut rng);
            for h in [1e-3, 1e-4] {
                let opts = LocalRankOptions { step: h, ..LocalRankOptions::default() };
                assert_eq!(local_rank_report(&p, &s, &opts).unwrap().rank.rank, 6);
            }
        }
    }

    #[test]
    fn local_rank_drops_for_degenerate_inverse() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let s = random_state(&mut rng);
        let opts = LocalRankOptions {
            inverse_override: Some(Mat3::from_diagonal(&Vec3::new(60.0, 60.0, 0.0))),
            ..LocalRankOptions::default()
        };
        assert!(local_rank_report(&p, &s, &opts).unwrap().rank.rank < 6);
    }

    #[test]
    fn local_rank_equivariant_under_rotation() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..5 {
            let s = random_state(&mut rng);
            let q = random_rotation(&mut rng);
            let mut t = s;
            t.rotation = q * s.rotation;
            t.resync_gamma();
            assert_eq!(local_rank(&p, &s).unwrap(), local_rank(&p, &t).unwrap());
        }
    }

    #[test]
    fn fiber_rank_on_vertical_needs_third_bracket() {
        // A half turn about the vertical negates g1 and g2 and fixes g3, so
        // [g1, g2] is parallel to g3 when G = e3.
        let p = RobotParams::default();
        let rep = fiber_rank_report(&p, &Vec3::z(), BRACKET_STEP).unwrap();
        assert_eq!(rep.rank.rank, 4);
        assert_eq!(rep.all_brackets.rank, 5);
        assert_eq!(rep.pairs[0].rank, 3);
    }

    #[test]
    fn non_finite_columns_are_rejected() {
        let c = DVector::from_vec(vec![1.0, f64::NAN]);
        assert_eq!(numerical_rank(&[c]), Err(ControllabilityError::NonFinite));
    }

    #[test]
    fn fiber_rank_random() {
        let p = RobotParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..20 {
            let gamma = random_unit(&mut rng);
            for h in [1e-3, 1e-4] {
                assert_eq!(fiber_rank_report(&p, &gamma, h).unwrap().rank.rank, 5);
            }
        }
    }

    #[test]
    fn rotation_with_vertical_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let g = random_unit(&mut rng);
            assert!((advected_vertical(&rotation_with_vertical(&g)) - g).norm() < 1e-12);
        }
        let r = rotation_with_vertical(&-Vec3::z());
        assert!((advected_vertical(&r) + Vec3::z()).norm() < 1e-12);
    }
}
