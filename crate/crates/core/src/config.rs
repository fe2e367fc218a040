//! Scenario files.
//!
//! A scenario is a TOML document with top-level run settings and the
//! sections `[params]`, `[gains]`, `[reference]`, `[controller]` and
//! `[init]`. Every physical quantity is SI, except the convenience key
//! `J_kgcm2` which gives the rotor spin inertia in kg cm^2.
//!
//! ```toml
//! name = "orientation_stab"
//! dt = 1e-3
//! duration = 20.0
//!
//! [reference]
//! kind = "orientation_constant"
//! rotation = { axes = "xyz", angles_deg = [20.0, 10.0, 60.0] }
//!
//! [controller]
//! kind = "orientation_tracking"
//!
//! [init]
//! omega = [12.5, 7.0, 1.0]
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::geometry::Gains;
use crate::liegroup::{compose_elementary, exp_so3, Axis, Rotation, Vec3};
use crate::model::{RobotParams, RobotState};
use crate::sim::scenario::DEFAULT_DT;
use crate::sim::{Controller, Form, Reference, ScenarioConfig};

/// kg cm^2 to kg m^2.
pub const KGCM2_TO_SI: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: cannot read file: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: key `{key}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Invalid { path: PathBuf, key: String, line: Option<usize>, message: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    name: Option<String>,
    dt: Option<f64>,
    duration: Option<f64>,
    seed: Option<u64>,
    form: Option<Form>,
    #[serde(default)]
    params: ParamsSection,
    #[serde(default)]
    gains: GainsSection,
    reference: ReferenceSection,
    controller: Controller,
    #[serde(default)]
    init: InitSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    shell_mass: Option<f64>,
    rotor_mass: Option<f64>,
    radius: Option<f64>,
    shell_inertia: Option<f64>,
    rotor_spin_inertia: Option<f64>,
    #[serde(rename = "J_kgcm2")]
    j_kgcm2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GainsSection {
    kp_diag: Option<[f64; 3]>,
    kv: Option<f64>,
    kp: Option<f64>,
    kd: Option<f64>,
}

/// A rotation given as a product of elementary rotations (`axes` with
/// `angles` or `angles_deg`), a rotation vector, or a row-major matrix.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RotationSpec {
    axes: Option<String>,
    angles: Option<Vec<f64>>,
    angles_deg: Option<Vec<f64>>,
    rotvec: Option<[f64; 3]>,
    matrix: Option<[f64; 9]>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ReferenceSection {
    Rest,
    OrientationConstant { rotation: RotationSpec },
    OrientationSinusoid,
    Circle { radius: f64, rate: f64 },
    Line { velocity: [f64; 2], offset: [f64; 2] },
    VerticalSpin { alpha: f64 },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitSection {
    rotation: Option<RotationSpec>,
    omega: Option<[f64; 3]>,
    theta: Option<[f64; 3]>,
    theta_dot: Option<[f64; 3]>,
    position: Option<[f64; 2]>,
}

/// 1-based line of the first assignment to `key`, for diagnostics.
fn locate_key(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let t = l.trim_start();
        t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

struct Ctx<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Ctx<'_> {
    fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let leaf = key.rsplit('.').next().unwrap_or(key);
        ConfigError::Invalid {
            path: self.path.to_path_buf(),
            key: key.to_string(),
            line: locate_key(self.text, leaf),
            message: message.into(),
        }
    }

    fn rotation(&self, key: &str, spec: &RotationSpec) -> Result<Rotation, ConfigError> {
        let given = [spec.axes.is_some(), spec.rotvec.is_some(), spec.matrix.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if given != 1 {
            return Err(self.invalid(key, "give exactly one of `axes`, `rotvec` or `matrix`"));
        }
        if let Some(m) = &spec.matrix {
            return Rotation::from_row_slice(m).map_err(|e| self.invalid(&format!("{key}.matrix"), e.to_string()));
        }
        if let Some(v) = spec.rotvec {
            return Ok(exp_so3(&Vec3::from(v)));
        }
        let axes = spec.axes.as_deref().unwrap_or_default();
        let angles = match (&spec.angles, &spec.angles_deg) {
            (Some(a), None) => a.clone(),
            (None, Some(d)) => d.iter().map(|x| x.to_radians()).collect(),
            _ => return Err(self.invalid(key, "give exactly one of `angles` or `angles_deg` with `axes`")),
        };
        if angles.len() != axes.chars().count() {
            return Err(self.invalid(key, format!("{} axes but {} angles", axes.chars().count(), angles.len())));
        }
        let mut seq = Vec::with_capacity(angles.len());
        for (c, a) in axes.chars().zip(angles) {
            let axis = Axis::from_char(c).ok_or_else(|| self.invalid(&format!("{key}.axes"), format!("unknown axis `{c}`")))?;
            seq.push((axis, a));
        }
        Ok(compose_elementary(&seq))
    }
}

fn params_from(ctx: &Ctx, s: &ParamsSection) -> Result<RobotParams, ConfigError> {
    let d = RobotParams::default();
    let spin = match (s.rotor_spin_inertia, s.j_kgcm2) {
        (Some(_), Some(_)) => {
            return Err(ctx.invalid("params.J_kgcm2", "give either `rotor_spin_inertia` or `J_kgcm2`, not both"));
        }
        (Some(j), None) => j,
        (None, Some(j)) => j * KGCM2_TO_SI,
        (None, None) => d.rotor_spin_inertia,
    };
    let p = RobotParams {
        shell_mass: s.shell_mass.unwrap_or(d.shell_mass),
        rotor_mass: s.rotor_mass.unwrap_or(d.rotor_mass),
        radius: s.radius.unwrap_or(d.radius),
        shell_inertia: [s.shell_inertia.unwrap_or(d.shell_inertia[0]); 3],
        rotor_spin_inertia: spin,
        rotor_transverse_inertia: spin / 2.0,
    };
    p.validate().map_err(|e| match e {
        crate::model::ModelError::InvalidParam { name, reason } => {
            let key = if name.starts_with("rotor_") && name.ends_with("inertia") && s.j_kgcm2.is_some() {
                "J_kgcm2"
            } else {
                name
            };
            ctx.invalid(&format!("params.{key}"), reason)
        }
        other => ctx.invalid("params", other.to_string()),
    })?;
    Ok(p)
}

fn gains_from(ctx: &Ctx, s: &GainsSection) -> Result<Gains, ConfigError> {
    let d = Gains::default();
    let g = Gains {
        kp_diag: s.kp_diag.unwrap_or(d.kp_diag),
        kv: s.kv.unwrap_or(d.kv),
        kp: s.kp.unwrap_or(d.kp),
        kd: s.kd.unwrap_or(d.kd),
        alpha: 0.0,
    };
    g.validate().map_err(|e| ctx.invalid("gains", e.to_string()))?;
    Ok(g)
}

fn reference_from(ctx: &Ctx, s: &ReferenceSection) -> Result<Reference, ConfigError> {
    Ok(match s {
        ReferenceSection::Rest => Reference::Rest,
        ReferenceSection::OrientationConstant { rotation } => Reference::OrientationConstant {
            rotation: ctx.rotation("reference.rotation", rotation)?.to_row_major(),
        },
        ReferenceSection::OrientationSinusoid => Reference::OrientationSinusoid,
        ReferenceSection::Circle { radius, rate } => Reference::Circle { radius: *radius, rate: *rate },
        ReferenceSection::Line { velocity, offset } => Reference::Line { velocity: *velocity, offset: *offset },
        ReferenceSection::VerticalSpin { alpha } => Reference::VerticalSpin { alpha: *alpha },
    })
}

/// Parses a scenario from TOML text; `path` is used in diagnostics and for
/// the default scenario name.
pub fn parse_scenario(text: &str, path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let file: FileConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let ctx = Ctx { path, text };
    let params = params_from(&ctx, &file.params)?;
    let gains = gains_from(&ctx, &file.gains)?;
    let reference = reference_from(&ctx, &file.reference)?;
    let rotation = match &file.init.rotation {
        Some(spec) => ctx.rotation("init.rotation", spec)?,
        None => Rotation::identity(),
    };
    let [x, y] = file.init.position.unwrap_or([0.0, 0.0]);
    let mut init = RobotState::at_rest(rotation, Vec3::new(x, y, params.radius));
    init.omega = Vec3::from(file.init.omega.unwrap_or_default());
    init.theta = Vec3::from(file.init.theta.unwrap_or_default());
    init.theta_dot = Vec3::from(file.init.theta_dot.unwrap_or_default());
    let name = file.name.unwrap_or_else(|| {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into())
    });
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(ctx.invalid("name", "must be non-empty and contain no path separators"));
    }
    let cfg = ScenarioConfig {
        name,
        params,
        gains,
        reference,
        controller: file.controller,
        init,
        dt: file.dt.unwrap_or(DEFAULT_DT),
        duration: file.duration.unwrap_or(10.0),
        seed: file.seed.unwrap_or(0),
        form: file.form.unwrap_or_default(),
    };
    validate_with_keys(&ctx, &cfg)?;
    Ok(cfg)
}

/// Runs scenario validation, attributing failures to a key where possible.
fn validate_with_keys(ctx: &Ctx, cfg: &ScenarioConfig) -> Result<(), ConfigError> {
    match cfg.validate() {
        Ok(()) => Ok(()),
        Err(e) => {
            let msg = e.to_string();
            let key = if msg.contains("dt must") {
                "dt"
            } else if msg.contains("duration") {
                "duration"
            } else if msg.contains("open-loop") {
                "controller.table"
            } else if msg.contains("reduced_attitude") {
                "controller.kind"
            } else {
                "init"
            };
            Err(ctx.invalid(key, msg))
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const STAB: &str = r#"
name = "stab"
duration = 2.0

[params]
J_kgcm2 = 0.672

[reference]
kind = "orientation_constant"
rotation = { axes = "xyz", angles_deg = [20.0, 10.0, 60.0] }

[controller]
kind = "orientation_tracking"

[init]
omega = [12.5, 7.0, 1.0]
"#;

    fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        parse_scenario(text, Path::new("test.toml"))
    }

    #[test]
    fn parses_and_converts_units() {
        let c = parse(STAB).unwrap();
        assert_eq!(c.name, "stab");
        assert!((c.params.rotor_spin_inertia - 6.72e-5).abs() < 1e-18);
        assert_eq!(c.dt, DEFAULT_DT);
        assert_eq!(c.init.omega, Vec3::new(12.5, 7.0, 1.0));
        let target = crate::sim::presets::stabilization_target().to_row_major();
        match c.reference {
            Reference::OrientationConstant { rotation } => {
                assert!(rotation.iter().zip(target).all(|(a, b)| (a - b).abs() < 1e-15));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let text = STAB.replace("duration = 2.0", "duration = 2.0\nbogus = 1");
        let msg = parse(&text).unwrap_err().to_string();
        assert!(msg.contains("bogus") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn invalid_value_names_key_and_line() {
        let text = STAB.replace("duration = 2.0", "duration = 2.0\ndt = 0.5");
        let msg = parse(&text).unwrap_err().to_string();
        assert!(msg.contains("`dt`") && msg.contains("line 4"), "{msg}");
        let text = STAB.replace("J_kgcm2 = 0.672", "J_kgcm2 = -1.0");
        let msg = parse(&text).unwrap_err().to_string();
        assert!(msg.contains("J_kgcm2") && msg.contains("line 6"), "{msg}");
    }

    #[test]
    fn rotation_specs() {
        let text = STAB.replace(r#"{ axes = "xyz", angles_deg = [20.0, 10.0, 60.0] }"#, "{ rotvec = [0.0, 0.0, 1.0] }");
        assert!(parse(&text).is_ok());
        let text = STAB.replace(r#"angles_deg = [20.0, 10.0, 60.0]"#, "angles_deg = [20.0]");
        assert!(parse(&text).is_err());
        let text = STAB.replace(r#"axes = "xyz""#, r#"axes = "xqz""#);
        assert!(parse(&text).unwrap_err().to_string().contains("unknown axis"));
    }

    #[test]
    fn both_inertia_keys_rejected() {
        let text = STAB.replace("J_kgcm2 = 0.672", "J_kgcm2 = 0.672\nrotor_spin_inertia = 6.72e-5");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn missing_file_mentions_path() {
        let err = load_scenario(Path::new("/nonexistent/x.toml")).unwrap_err().to_string();
        assert!(err.contains("/nonexistent/x.toml"));
    }
}
