//! Seeded invariant suites behind `rollctl check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::controllability::{random_rotation, random_unit};
use crate::geometry::{
    grad_trace_potential, hessian_trace_potential, potential_directional_fd, trace_potential, Gains,
};
use crate::liegroup::{dexpinv, exp_so3, hat, log_so3, vee, Mat3, Vec3};
use crate::model::RobotState;
use crate::sim::{presets, run_scenario, Controller, Form, ScenarioConfig};

pub const SUITES: [&str; 5] = ["liegroup", "gradients", "conservation", "dissipation", "dualform"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(suite: &'static str, name: &str, residual: f64, threshold: f64) -> Self {
        CheckResult { suite, name: name.into(), residual, threshold, passed: residual <= threshold }
    }

    pub fn line(&self) -> String {
        format!(
            "{}  {:<13}{:<48}residual {:<12.3e} threshold {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.residual,
            self.threshold
        )
    }
}

fn rand_vec(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
    Vec3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s))
}

/// Runs one suite, or all of them for `"all"`. `None` for unknown names.
pub fn run_suite(name: &str, seed: u64) -> Option<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = match name {
        "liegroup" => liegroup(&mut rng),
        "gradients" => gradients(&mut rng),
        "conservation" => conservation(&mut rng),
        "dissipation" => dissipation(),
        "dualform" => dualform(&mut rng),
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s, seed)?);
            }
            all
        }
        _ => return None,
    };
    Some(out)
}

fn liegroup(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let (mut round, mut orth, mut hv, mut dexp) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let v = random_unit(rng) * rng.gen_range(0.0..3.0);
        let r = exp_so3(&v);
        orth = orth.max(r.orthogonality_error()).max((r.determinant() - 1.0).abs());
        if let Ok(back) = log_so3(&r) {
            round = round.max((back - v).norm());
        }
        hv = hv.max((vee(&hat(&v)).unwrap_or_default() - v).norm());
        // chart velocity: d/dt log(exp(u) exp(t w)) at t = 0
        let u = random_unit(rng) * rng.gen_range(0.0..2.0);
        let w = rand_vec(rng, 1.0);
        let h = 1e-6;
        let fd = (log_so3(&(exp_so3(&u) * exp_so3(&(w * h)))).unwrap_or_default()
            - log_so3(&(exp_so3(&u) * exp_so3(&(w * -h)))).unwrap_or_default())
            / (2.0 * h);
        dexp = dexp.max((fd - dexpinv(&-u, &w)).norm());
    }
    vec![
        CheckResult::new("liegroup", "log(exp(v)) = v", round, 1e-10),
        CheckResult::new("liegroup", "exp lands in SO(3)", orth, 1e-12),
        CheckResult::new("liegroup", "vee(hat(v)) = v", hv, 0.0),
        CheckResult::new("liegroup", "dexpinv vs finite differences", dexp, 1e-7),
    ]
}

fn gradients(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let kp = Gains::default().kp_matrix();
    let mut grad_err = 0.0f64;
    let mut hess_err = 0.0f64;
    for _ in 0..100 {
        let (rs, rd) = (random_rotation(rng), random_rotation(rng));
        let g = grad_trace_potential(&rs, &rd, &kp).unwrap_or(Vec3::from_element(f64::NAN));
        let fd = Vec3::from_fn(|i, _| potential_directional_fd(&rs, &rd, &kp, &Vec3::ith(i, 1.0), 1e-5));
        grad_err = grad_err.max((g - fd).norm() / g.norm().max(1.0));
        let hess = hessian_trace_potential(&rs, &rd, &kp);
        let h = 1e-4;
        let v = |eta: Vec3| trace_potential(&(rs * exp_so3(&eta)), &rd, &kp);
        for i in 0..3 {
            for j in 0..3 {
                let (ei, ej) = (Vec3::ith(i, h), Vec3::ith(j, h));
                let fd = (v(ei + ej) - v(ei - ej) - v(ej - ei) + v(-ei - ej)) / (4.0 * h * h);
                hess_err = hess_err.max((fd - hess[(i, j)]).abs());
            }
        }
    }
    let target = random_rotation(rng);
    let at_target = hessian_trace_potential(&target, &target, &kp);
    let expected = Mat3::identity() * kp.trace() - kp;
    let ev = {
        let mut e: Vec<f64> = at_target.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    };
    let ev_err = (ev[0] - 3.0).abs().max((ev[1] - 9.0).abs()).max((ev[2] - 10.0).abs());
    vec![
        CheckResult::new("gradients", "dV vs finite differences (relative)", grad_err, 1e-5),
        CheckResult::new("gradients", "Hessian vs second differences", hess_err, 1e-4),
        CheckResult::new("gradients", "Hessian at target = tr(Kp) I - Kp", (at_target - expected).amax(), 1e-8),
        CheckResult::new("gradients", "Hessian eigenvalues {3, 9, 10}", ev_err, 1e-8),
    ]
}

fn random_start(rng: &mut ChaCha8Rng, c: &mut ScenarioConfig, spin: f64) {
    let rotation = random_rotation(rng);
    let mut s = RobotState::at_rest(rotation, Vec3::new(0.0, 0.0, c.params.radius)).with_omega(rand_vec(rng, spin));
    s.theta_dot = rand_vec(rng, 50.0);
    c.init = s;
}

fn momentum_drift(c: &ScenarioConfig) -> f64 {
    match run_scenario(c) {
        Ok(rec) => {
            let pi0 = rec.rows.first().map(|r| r.pi.norm()).unwrap_or(0.0);
            rec.diagnostics(0.0).max_momentum_drift / (1.0 + pi0)
        }
        Err(_) => f64::INFINITY,
    }
}

fn conservation(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut free = presets::free_motion();
    random_start(rng, &mut free, 5.0);
    out.push(CheckResult::new("conservation", "pi_s drift, open loop (random start)", momentum_drift(&free), 1e-6));
    for mut c in presets::all() {
        c.duration = c.duration.min(10.0);
        let name = format!("pi_s drift, {}", c.name);
        out.push(CheckResult::new("conservation", &name, momentum_drift(&c), 1e-6));
    }
    out
}

fn dissipation() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for c in [presets::orientation_stabilization(), presets::position_stabilization()] {
        match run_scenario(&c) {
            Ok(rec) => {
                let d = rec.diagnostics(0.0);
                let rho = rec
                    .rows
                    .iter()
                    .map(|r| r.rho.abs() / (1.0 + r.omega.norm_squared()))
                    .fold(0.0, f64::max);
                out.push(CheckResult::new("dissipation", &format!("H' + k|w|^2, {}", c.name), rho, 1e-4));
                out.push(CheckResult::new(
                    "dissipation",
                    &format!("largest step increase of H, {}", c.name),
                    d.max_h_increase.max(0.0),
                    1e-9,
                ));
            }
            Err(_) => out.push(CheckResult::new("dissipation", &c.name, f64::INFINITY, 0.0)),
        }
    }
    out
}

/// Largest entry-wise gap between momentum- and velocity-form runs on
/// `(R, w, x)`.
pub fn dual_form_gap(c: &ScenarioConfig) -> f64 {
    let mut a = c.clone();
    a.form = Form::Momentum;
    let mut b = c.clone();
    b.form = Form::Velocity;
    match (run_scenario(&a), run_scenario(&b)) {
        (Ok(x), Ok(y)) => x
            .rows
            .iter()
            .zip(&y.rows)
            .map(|(p, q)| {
                let dr = p.rotation.iter().zip(&q.rotation).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max);
                dr.max((p.omega - q.omega).amax()).max((p.position - q.position).amax())
            })
            .fold(0.0, f64::max),
        _ => f64::INFINITY,
    }
}

fn dualform(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut worst = 0.0f64;
    for k in 0..10 {
        let mut c = if k % 2 == 0 { presets::orientation_stabilization() } else { presets::free_motion() };
        c.duration = 5.0;
        random_start(rng, &mut c, 10.0);
        worst = worst.max(dual_form_gap(&c));
    }
    let mut open = presets::free_motion();
    open.controller = Controller::OpenLoop { table: vec![[0.0, 0.01, -0.02, 0.005], [5.0, -0.01, 0.0, 0.02]] };
    open.duration = 5.0;
    vec![
        CheckResult::new("dualform", "momentum vs velocity form, 10 starts", worst, 1e-6),
        CheckResult::new("dualform", "momentum vs velocity form, torque table", dual_form_gap(&open), 1e-6),
    ]
}
