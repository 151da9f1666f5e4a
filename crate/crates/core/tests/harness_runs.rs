use std::path::{Path, PathBuf};

use extrafw_core::harness::{run_experiment, write_outputs, ExperimentConfig, ReferenceSource};
use extrafw_core::Error;

const SMALL: &str = r#"
name = "small"
task = "logistic"
seed = 5
iterations = 60
solvers = ["fw", "afw", "extrafw", "gd", "nag"]
output = "out/small"
train_fraction = 0.75

[data]
source = "synth_logistic"
samples = 200
dim = 30
sparsity = 5
margin = 2.0

[constraint]
kind = "l1"
radius = 3.0
"#;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn parallel_and_sequential_runs_write_identical_files() {
    let cfg = ExperimentConfig::from_toml(SMALL).unwrap();
    let a = run_experiment(&cfg, Path::new("."), false).unwrap();
    let b = run_experiment(&cfg, Path::new("."), true).unwrap();
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&dir.path().join("a"), &a).unwrap();
    write_outputs(&dir.path().join("b"), &b).unwrap();
    let files = read_dir_bytes(&dir.path().join("a"));
    assert_eq!(files.len(), 6);
    assert_eq!(files, read_dir_bytes(&dir.path().join("b")));
}

#[test]
fn summary_reports_calls_and_reference() {
    let cfg = ExperimentConfig::from_toml(SMALL).unwrap();
    let out = run_experiment(&cfg, Path::new("."), false).unwrap();
    let s = &out.summary;
    assert_eq!(s.f_ref_source, ReferenceSource::BestFound);
    assert_eq!(s.constraint, "l1-ball");
    assert!(s.dataset_hash.is_some());
    let calls = |name: &str| (s.solvers[name].fo_calls, s.solvers[name].lmo_calls);
    assert_eq!(calls("fw"), (60, 60));
    assert_eq!(calls("afw"), (60, 60));
    assert_eq!(calls("extrafw"), (120, 120));
    assert_eq!(calls("gd"), (60, 0));
    assert_eq!(calls("nag"), (60, 0));
    for (name, rows) in &out.traces {
        assert_eq!(rows.len(), 61, "{name}");
        assert!(rows.iter().all(|r| r.optimality >= -1e-9), "{name}");
        assert!(rows.iter().all(|r| r.test_accuracy.is_some() && r.wall_ns.is_none()));
        assert_eq!(s.solvers[name].final_objective, rows[60].objective);
    }
    let best = out.traces.values().flatten().map(|r| r.objective).fold(f64::INFINITY, f64::min);
    assert_eq!(s.f_ref, best);
    // the solver that found the reference ends at gap 0, which the slope fit clips
    assert!(s.warnings.iter().all(|w| w.contains("clipped")), "{:?}", s.warnings);
    assert!(s.solvers.values().any(|v| v.slope_clipped));
}

#[test]
fn exact_hit_is_flagged_in_the_slope_fit() {
    let cfg = ExperimentConfig::load(&configs_dir().join("quadratic_rate.toml")).unwrap();
    let out = run_experiment(&cfg, &configs_dir(), false).unwrap();
    let s = &out.summary;
    assert_eq!(s.f_ref_source, ReferenceSource::Analytic);
    assert!((s.f_ref - 0.5).abs() < 1e-15);
    assert!(s.solvers["fw"].slope_clipped);
    assert!(s.warnings.iter().any(|w| w.starts_with("fw:") && w.contains("clipped")));
    assert!(!s.solvers["extrafw"].slope_clipped);
    assert!(s.solvers["extrafw"].slope.unwrap() < -1.7);
}

#[test]
fn record_time_fills_the_wall_clock_column() {
    let text = SMALL.replace("seed = 5", "seed = 5\nrecord_time = true");
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    let out = run_experiment(&cfg, Path::new("."), true).unwrap();
    for rows in out.traces.values() {
        let wall: Vec<u64> = rows.iter().map(|r| r.wall_ns.unwrap()).collect();
        assert!(wall.windows(2).all(|w| w[0] <= w[1]));
    }
    assert!(out.summary.solvers.values().all(|s| s.wall_seconds.is_some()));
}

#[test]
fn shipped_configs_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn missing_data_file_is_a_data_error() {
    let text = r#"
task = "logistic"
seed = 0
iterations = 5
solvers = ["fw"]
output = "out/x"

[data]
source = "libsvm"
path = "definitely-not-here.libsvm"

[constraint]
kind = "l2"
radius = 1.0
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = run_experiment(&cfg, dir.path(), false).unwrap_err();
    assert!(err.is_data_error(), "{err}");
}

#[test]
fn config_errors_are_config_errors() {
    let bad = [
        SMALL.replace("iterations = 60", "iterations = 0"),
        SMALL.replace("kind = \"l1\"", "kind = \"nuclear\""),
        SMALL.replace("radius = 3.0", "radius = -3.0"),
        SMALL.replace("\"gd\", \"nag\"", "\"gd\", \"gd\""),
        SMALL.replace("task = \"logistic\"", "task = \"quadratic\""),
        SMALL.replace("solvers = [", "solvers = [\"sgd\", "),
    ];
    for text in bad {
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(Error::Config(_))), "{text}");
    }
}

/// ExtraFW's advantage over FW widening with the nuclear radius was not
/// reproduced on the synthetic sweep: with the literal radii the optimum sits
/// so close to the boundary that FW is already near-exact. Kept as a record
/// of the comparison; it also takes minutes.
#[test]
#[ignore = "slow, and the widening trend is not reproduced"]
fn completion_sweep_ratio_shrinks_with_radius() {
    let mut ratios = Vec::new();
    for name in ["synth_completion_R1", "synth_completion_R2.5", "synth_completion_R5"] {
        let cfg = ExperimentConfig::load(&configs_dir().join(format!("{name}.toml"))).unwrap();
        let out = run_experiment(&cfg, &configs_dir(), false).unwrap();
        let s = &out.summary.solvers;
        ratios.push(s["extrafw"].final_optimality / s["fw"].final_optimality);
    }
    assert!(ratios.windows(2).all(|w| w[1] <= w[0]), "{ratios:?}");
}
