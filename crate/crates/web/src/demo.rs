//! Plain-Rust side of the demo; everything here runs natively in tests.

use serde::Serialize;

use rollctl::controllability::{
    fiber_rank_report, local_rank_report, LocalRankOptions, BRACKET_STEP,
};
use rollctl::liegroup::{exp_so3, Vec3};
use rollctl::model::RobotState;
use rollctl::sim::{presets, run_scenario, Reference, ScenarioConfig, SimError, TrajectoryRecord};

/// Rows kept per series; the canvas is a few hundred pixels wide.
const MAX_POINTS: usize = 600;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub t: Vec<f64>,
    pub e_r: Vec<f64>,
    pub h: Vec<f64>,
    pub final_e_r: f64,
    pub h_increases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path2 {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub xd: Vec<f64>,
    pub yd: Vec<f64>,
    pub final_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub local_rank: usize,
    pub local: Vec<f64>,
    pub fiber_rank: usize,
    pub fiber: Vec<f64>,
    pub fiber_all_brackets: Vec<f64>,
}

fn stride(n: usize) -> usize {
    n.div_ceil(MAX_POINTS).max(1)
}

fn thin<T>(rec: &TrajectoryRecord, f: impl Fn(&rollctl::sim::Row) -> T) -> Vec<T> {
    let k = stride(rec.rows.len());
    let mut out: Vec<T> = rec.rows.iter().step_by(k).map(&f).collect();
    if !(rec.rows.len() - 1).is_multiple_of(k) {
        out.extend(rec.rows.last().map(f));
    }
    out
}

fn demo_step(mut c: ScenarioConfig, duration: f64) -> ScenarioConfig {
    c.duration = duration.clamp(0.5, 60.0);
    c.dt = 2e-3;
    c
}

/// Attitude stabilization from an initial spin `omega` with damping `kv`.
pub fn stabilize(omega: [f64; 3], kv: f64, duration: f64) -> Result<Series, SimError> {
    let mut c = demo_step(presets::orientation_stabilization(), duration);
    c.init.omega = Vec3::from(omega);
    c.gains.kv = kv;
    let rec = run_scenario(&c)?;
    let d = rec.diagnostics(0.0);
    Ok(Series {
        t: thin(&rec, |r| r.t),
        e_r: thin(&rec, |r| r.e_r),
        h: thin(&rec, |r| r.h),
        final_e_r: d.final_e_r,
        h_increases: d.h_increases,
    })
}

/// Planar tracking: `"circle"`, `"line"`, or `"home"` (drive to the origin).
pub fn roll(shape: &str, kp: f64, kd: f64, duration: f64) -> Result<Path2, SimError> {
    let base = match shape {
        "circle" => presets::circle_tracking(),
        "line" => presets::line_tracking(),
        "home" => presets::position_stabilization(),
        other => return Err(SimError::Config(format!("unknown shape `{other}`"))),
    };
    let mut c = demo_step(base, duration);
    c.gains.kp = kp;
    c.gains.kd = kd;
    if let Reference::Circle { radius, .. } = &mut c.reference {
        *radius = 0.5;
    }
    let rec = run_scenario(&c)?;
    Ok(Path2 {
        x: thin(&rec, |r| r.position.x),
        y: thin(&rec, |r| r.position.y),
        xd: thin(&rec, |r| r.x_d.x),
        yd: thin(&rec, |r| r.x_d.y),
        final_error: rec.diagnostics(0.0).final_position_error,
    })
}

/// Singular values behind the local and fiber rank tests at the attitude
/// `exp(rotvec)` with body spin `omega`.
pub fn spectrum(rotvec: [f64; 3], omega: [f64; 3]) -> Result<Spectrum, String> {
    let p = rollctl::model::RobotParams::default();
    let r = exp_so3(&Vec3::from(rotvec));
    let s = RobotState::at_rest(r, Vec3::new(0.0, 0.0, p.radius)).with_omega(Vec3::from(omega));
    let local = local_rank_report(&p, &s, &LocalRankOptions::default()).map_err(|e| e.to_string())?;
    let fiber = fiber_rank_report(&p, &s.gamma, BRACKET_STEP).map_err(|e| e.to_string())?;
    Ok(Spectrum {
        local_rank: local.rank.rank,
        local: local.rank.singular_values,
        fiber_rank: fiber.rank.rank,
        fiber: fiber.rank.singular_values,
        fiber_all_brackets: fiber.all_brackets.singular_values,
    })
}
