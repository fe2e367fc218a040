//! Command-line front end: `simulate`, `check`, `controllability`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::checks::{run_suite, SUITES};
use crate::config::load_scenario;
use crate::controllability::{
    fiber_rank_report, local_rank_report, random_rotation, random_unit, LocalRankOptions, BRACKET_STEP,
};
use crate::model::{RobotParams, RobotState};
use crate::sim::{presets, run_batch, scenario::thread_cap_from_env, ScenarioConfig, TrajectoryRecord};

// A closed stdout (e.g. piped into `head`) is not an error.
macro_rules! outln {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "rollctl", version, about = "Simulate and analyse a rotor-driven rolling sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run scenarios and write `<name>.csv` and `<name>.summary.txt`.
    Simulate(SimulateArgs),
    /// Run a seeded invariant suite.
    Check(CheckArgs),
    /// Bracket ranks at random configurations.
    Controllability(ControllabilityArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario TOML files.
    #[arg(long = "config", num_args = 1..)]
    pub configs: Vec<PathBuf>,
    /// Built-in scenarios by name (see `--list`).
    #[arg(long = "preset", num_args = 1..)]
    pub presets: Vec<String>,
    /// Print the built-in scenario names and exit.
    #[arg(long)]
    pub list: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the step of every scenario.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// liegroup, gradients, conservation, dissipation, dualform or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ControllabilityArgs {
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print one JSON array instead of the table.
    #[arg(long)]
    pub json: bool,
}

pub fn run(cli: Cli) -> ExitCode {
    let code = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Check(a) => check(a),
        Command::Controllability(a) => controllability(a),
    };
    ExitCode::from(code)
}

fn usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn gather(a: &SimulateArgs) -> Result<Vec<ScenarioConfig>, String> {
    let mut out = Vec::new();
    for path in &a.configs {
        out.push(load_scenario(path).map_err(|e| e.to_string())?);
    }
    for name in &a.presets {
        out.push(presets::by_name(name).ok_or_else(|| format!("unknown preset `{name}`"))?);
    }
    if out.is_empty() {
        return Err("nothing to run; pass --config FILE or --preset NAME".into());
    }
    for c in &mut out {
        if let Some(dt) = a.dt {
            c.dt = dt;
        }
        if let Some(d) = a.duration {
            c.duration = d;
        }
        if let Some(s) = a.seed {
            c.seed = s;
        }
        c.validate().map_err(|e| format!("{}: {e}", c.name))?;
    }
    let mut names: Vec<&str> = out.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(format!("two scenarios are named `{}`", w[0]));
    }
    Ok(out)
}

fn summary(c: &ScenarioConfig, rec: &TrajectoryRecord) -> String {
    let transient = if c.duration > 10.0 { 10.0 } else { 0.0 };
    let mut s = format!(
        "scenario                            {}\ncontroller                          {}\nform                                {:?}\ndt                                  {:e}\nduration                            {}\nseed                                {}\n",
        c.name,
        c.controller.name(),
        c.form,
        c.dt,
        c.duration,
        c.seed
    );
    s.push_str(&rec.diagnostics(transient).to_text());
    s
}

fn write_outputs(dir: &Path, c: &ScenarioConfig, rec: &TrajectoryRecord) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(dir.join(format!("{}.csv", c.name)))?);
    rec.write_csv(&mut f)?;
    f.flush()?;
    fs::write(dir.join(format!("{}.summary.txt", c.name)), summary(c, rec))
}

fn simulate(a: SimulateArgs) -> u8 {
    if a.list {
        for c in presets::all() {
            outln!("{:<20}{:<22}{} s", c.name, c.controller.name(), c.duration);
        }
        return EXIT_OK;
    }
    let configs = match gather(&a) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Err(e) = fs::create_dir_all(&a.out) {
        return usage(format!("{}: {e}", a.out.display()));
    }
    let mut code = EXIT_OK;
    for (c, res) in configs.iter().zip(run_batch(&configs, thread_cap_from_env())) {
        match res {
            Ok(rec) => {
                if let Err(e) = write_outputs(&a.out, c, &rec) {
                    eprintln!("error: {}: {e}", a.out.display());
                    code = EXIT_FAILURE;
                    continue;
                }
                outln!("{:<20}{} rows -> {}", c.name, rec.rows.len(), a.out.join(format!("{}.csv", c.name)).display());
            }
            Err(e) => {
                eprintln!("error: {}: {e}", c.name);
                code = EXIT_FAILURE;
            }
        }
    }
    code
}

fn check(a: CheckArgs) -> u8 {
    let Some(results) = run_suite(&a.suite, a.seed) else {
        return usage(format!("unknown suite `{}`; expected one of {} or all", a.suite, SUITES.join(", ")));
    };
    for r in &results {
        outln!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    outln!("{} passed, {} failed", results.len() - failed, failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

/// Per-sample ranks; `*_rel_sv` is the smallest singular value over the
/// largest, compared against `RANK_TOL`.
#[derive(Debug, Serialize)]
struct SampleRow {
    sample: usize,
    local_rank: usize,
    local_rel_sv: f64,
    closed_form_error: f64,
    fiber_rank: usize,
    fiber_rel_sv: f64,
    gamma: [f64; 3],
    error: Option<String>,
}

fn sample_row(p: &RobotParams, k: usize, rng: &mut ChaCha8Rng) -> SampleRow {
    let rotation = random_rotation(rng);
    let omega = random_unit(rng) * rng.gen_range(0.0..3.0);
    let mut s = RobotState::at_rest(rotation, nalgebra::Vector3::new(0.0, 0.0, p.radius)).with_omega(omega);
    s.theta_dot = random_unit(rng) * rng.gen_range(0.0..20.0);
    let gamma = random_unit(rng);
    let mut row = SampleRow {
        sample: k,
        local_rank: 0,
        local_rel_sv: 0.0,
        closed_form_error: f64::NAN,
        fiber_rank: 0,
        fiber_rel_sv: 0.0,
        gamma: [gamma.x, gamma.y, gamma.z],
        error: None,
    };
    let local = local_rank_report(p, &s, &LocalRankOptions::default());
    let fiber = fiber_rank_report(p, &gamma, BRACKET_STEP);
    match (local, fiber) {
        (Ok(l), Ok(f)) => {
            row.local_rank = l.rank.rank;
            row.local_rel_sv = l.rank.relative_gap();
            row.closed_form_error = l.closed_form_error;
            row.fiber_rank = f.rank.rank;
            row.fiber_rel_sv = f.rank.relative_gap();
        }
        (Err(e), _) | (_, Err(e)) => row.error = Some(e.to_string()),
    }
    row
}

fn controllability(a: ControllabilityArgs) -> u8 {
    if a.samples == 0 {
        return usage("--samples must be positive");
    }
    let p = RobotParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let rows: Vec<SampleRow> = (0..a.samples).map(|k| sample_row(&p, k, &mut rng)).collect();
    let ok = rows.iter().all(|r| r.error.is_none() && r.local_rank == 6 && r.fiber_rank == 5);
    if a.json {
        match serde_json::to_string_pretty(&rows) {
            Ok(s) => outln!("{s}"),
            Err(e) => return usage(e),
        }
    } else {
        outln!("{:>6} {:>6} {:>12} {:>12} {:>6} {:>12}", "sample", "local", "sv ratio", "closed err", "fiber", "sv ratio");
        for r in &rows {
            outln!(
                "{:>6} {:>6} {:>12.3e} {:>12.3e} {:>6} {:>12.3e}{}",
                r.sample,
                r.local_rank,
                r.local_rel_sv,
                r.closed_form_error,
                r.fiber_rank,
                r.fiber_rel_sv,
                r.error.as_deref().map(|e| format!("  error: {e}")).unwrap_or_default()
            );
        }
        outln!("{}", if ok { "all samples have local rank 6 and fiber rank 5" } else { "rank deficiency found" });
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}
