use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use resetctl::config::{ActuatorState, ExperimentConfig, InitialState, SwitchingConfig};
use resetctl::experiments::{fidelity_curves, run, Kind};

fn resetctl(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_resetctl"));
    cmd.arg("--quiet").arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("config.toml");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.args(args).output().unwrap()
}

fn read_csv(dir: &Path, kind: &str) -> Vec<Vec<String>> {
    let text = fs::read_to_string(dir.join("out").join(format!("{kind}.csv"))).unwrap();
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn config_file_round_trip() {
    let mut cfg = ExperimentConfig::default();
    cfg.model.nu = 1.3;
    cfg.model.g = SwitchingConfig::Table {
        knots: vec![0.0, 0.5, 1.0],
        values: vec![0.0, 2.0, 0.0],
    };
    cfg.states.rho_a = ActuatorState::Bloch([0.0, 0.6, 0.8]);
    cfg.states.initial_state = InitialState::Vector(vec![[0.6, 0.0], [0.0, 0.8]]);
    cfg.schedule.f = vec![3.0, 7.0];
    cfg.analysis.lie_rho_a = vec![ActuatorState::Matrix(vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]])];
    cfg.tolerances.propagation = 1e-10;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    fs::write(&path, cfg.to_toml()).unwrap();
    assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
}

#[test]
fn print_config_reflects_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = resetctl(dir.path(), None, &["--cutoff", "40", "print-config"]);
    assert!(out.status.success());
    let cfg = ExperimentConfig::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg.model.cutoff, 40);
    assert_eq!(cfg.output.dir, dir.path().join("out"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let config = "[model]\ncutoff = 16\n[schedule]\nf = [4.0]\nt = 1.0\n";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for kind in ["simulate", "chernoff"] {
        assert!(resetctl(a.path(), Some(config), &[kind]).status.success());
        assert!(resetctl(b.path(), Some(config), &[kind]).status.success());
        for file in [format!("{kind}.csv"), format!("{kind}.meta.json")] {
            assert_eq!(
                fs::read(a.path().join("out").join(&file)).unwrap(),
                fs::read(b.path().join("out").join(&file)).unwrap(),
                "{file}"
            );
        }
    }
}

#[test]
fn metadata_records_hash_and_snapping() {
    let dir = tempfile::tempdir().unwrap();
    let config = "[model]\ncutoff = 16\n[schedule]\nf = [3.0]\nt = 1.1\nsamples_per_cycle = 2\n";
    assert!(resetctl(dir.path(), Some(config), &["fig1"]).status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/fig1.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["kind"], "fig1");
    assert_eq!(meta["config_sha256"].as_str().unwrap().len(), 64);
    let snap = &meta["choices"]["snap"][0];
    assert_eq!(snap["cycles"], 3);
    assert_eq!(snap["t"], 1.0);
    assert_eq!(meta["diagnostics"]["rates"][0]["truncation_flagged"], false);

    let rows = read_csv(dir.path(), "fig1");
    assert_eq!(rows[0], ["t", "f", "fidelity"]);
    // 3 cycles, 2 samples each, plus t = 0
    assert_eq!(rows.len(), 1 + 7);
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn chernoff_csv_has_fitted_order_footer() {
    let dir = tempfile::tempdir().unwrap();
    assert!(resetctl(dir.path(), None, &["chernoff"]).status.success());
    let rows = read_csv(dir.path(), "chernoff");
    assert_eq!(rows[0], ["n", "deviation", "corrected_deviation"]);
    let footer = rows.iter().find(|r| r[0] == "fitted_order").unwrap();
    let order: f64 = footer[1].parse().unwrap();
    assert!((-1.3..=-0.7).contains(&order), "{order}");
}

#[test]
fn constant_switching_has_no_first_order_strobe_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let config = "[model.g]\nshape = \"constant\"\nvalue = 1.5\n";
    let out = resetctl(dir.path(), Some(config), &["strobe"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(dir.path(), "strobe");
    let col = rows[0].iter().position(|h| h == "deviation").unwrap();
    let data: Vec<_> = rows[1..].iter().filter(|r| r[0] != "fitted_order").collect();
    assert_eq!(data.len(), 5);
    for r in data {
        assert!(r[col].parse::<f64>().unwrap().abs() <= 1e-9);
    }
}

#[test]
fn lie_and_effective_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(resetctl(dir.path(), None, &["lie"]).status.success());
    assert_eq!(read_csv(dir.path(), "lie")[1], ["2", "4", "4"]);

    assert!(resetctl(dir.path(), None, &["--cutoff", "3", "effective"]).status.success());
    let rows = read_csv(dir.path(), "effective");
    assert_eq!(rows.len(), 1 + 9);
    // ν a†a + ν X with ν = 1: H[0][1] = X[0][1] = 1/2
    assert_eq!(rows[2][..2], ["0", "1"]);
    assert!((rows[2][2].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(rows[2][3].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = resetctl(dir.path(), Some("[model]\nn_vec = [1.0, 1.0, 0.0]\n"), &["effective"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.n_vec"));

    let out = resetctl(dir.path(), Some("[schedule]\nrate = 3.0\n"), &["fig1"]);
    assert_eq!(out.status.code(), Some(1));

    let out = resetctl(dir.path(), None, &["--cutoff", "4", "fig1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("states.initial_state"));
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = "[model]\ncutoff = 16\n[schedule]\nf = [2.0]\nt = 1.0\n[tolerances]\nmax_substeps = 8\n";
    let out = resetctl(dir.path(), Some(config), &["fig1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn truncation_flag_exits_with_three_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let config = "[model]\ncutoff = 13\n[schedule]\nf = [10.0]\nt = 3.0\n";
    let out = resetctl(dir.path(), Some(config), &["fig1"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/fig1.csv").exists());
    let meta = fs::read_to_string(dir.path().join("out/fig1.meta.json")).unwrap();
    assert!(meta.contains("raise the cutoff"));
}

#[test]
fn library_and_binary_agree() {
    let dir = tempfile::tempdir().unwrap();
    let config = "[schedule]\nf = [5.0]\nt = 0.4\n[model]\ncutoff = 16\n";
    assert!(resetctl(dir.path(), Some(config), &["fig1"]).status.success());
    let cfg = ExperimentConfig::from_toml(config).unwrap();
    let table = run(&cfg, Kind::Fig1).unwrap().table;
    assert_eq!(fs::read_to_string(dir.path().join("out/fig1.csv")).unwrap(), table.to_csv());
}

#[test]
fn fidelities_insensitive_to_cutoff_beyond_thirty() {
    let cfg = ExperimentConfig::default();
    let mut wide = cfg.clone();
    wide.model.cutoff = 40;
    let (a, b) = (fidelity_curves(&cfg).unwrap(), fidelity_curves(&wide).unwrap());
    let mut worst = 0.0f64;
    for (ca, cb) in a.iter().zip(&b) {
        assert_eq!(ca.times.len(), cb.times.len());
        for (x, y) in ca.fidelities.iter().zip(&cb.fidelities) {
            worst = worst.max((x - y).abs());
        }
    }
    assert!(worst < 1e-6, "largest change {worst:e}");
}
