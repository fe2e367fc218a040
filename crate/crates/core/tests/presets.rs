use std::path::Path;

use rollctl::config::load_scenario;
use rollctl::sim::{presets, Reference, ScenarioConfig};

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + y.abs()))
}

fn assert_matches(file: &ScenarioConfig, built: &ScenarioConfig) {
    let n = &built.name;
    assert_eq!(file.name, built.name);
    assert_eq!(file.controller, built.controller, "{n}");
    assert_eq!(file.gains, built.gains, "{n}");
    assert_eq!((file.dt, file.duration, file.seed, file.form), (built.dt, built.duration, built.seed, built.form), "{n}");
    let p = (&file.params, &built.params);
    assert!(
        close(
            &[p.0.shell_mass, p.0.rotor_mass, p.0.radius, p.0.shell_inertia[0], p.0.rotor_spin_inertia],
            &[p.1.shell_mass, p.1.rotor_mass, p.1.radius, p.1.shell_inertia[0], p.1.rotor_spin_inertia],
        ),
        "{n}: params"
    );
    let (a, b) = (&file.init, &built.init);
    assert!(close(&a.rotation.to_row_major(), &b.rotation.to_row_major()), "{n}: rotation");
    for (x, y) in [(a.omega, b.omega), (a.theta, b.theta), (a.theta_dot, b.theta_dot), (a.position, b.position)] {
        assert!(close(x.as_slice(), y.as_slice()), "{n}: init");
    }
    match (&file.reference, &built.reference) {
        (Reference::OrientationConstant { rotation: x }, Reference::OrientationConstant { rotation: y }) => {
            assert!(close(x, y), "{n}: reference");
        }
        (x, y) => assert_eq!(x, y, "{n}"),
    }
}

#[test]
fn preset_files_match_builtin_scenarios() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    let all = presets::all();
    let mut files = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = load_scenario(&path).unwrap_or_else(|e| panic!("{e}"));
            let built = all.iter().find(|c| c.name == cfg.name).unwrap_or_else(|| panic!("{}", cfg.name));
            assert_matches(&cfg, built);
            files += 1;
        }
    }
    assert_eq!(files, all.len());
}
