use std::path::Path;
use std::process::{Command, Output};

use cavity_feedback::experiments::Table;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavity-feedback"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SINGLE_POINT: &str = r#"
name = "fig4a"

[params]
ratio = 1e-3
eta = [1.0]

[state]
kind = "cat"
alpha0 = [5.0, 0.0]

[time]
count = 400
t_min = 1e-4
t_max = 100.0
spacing = "log"
"#;

#[test]
fn argument_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--frobnicate", "fig4"][..], &["fig5"], &[], &["fig4", "--threads", "0"], &["sweep"]] {
        let o = bin(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    let o = bin(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("sweep"));
}

#[test]
fn sweep_point_reproduces_fig4_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("point.toml"), SINGLE_POINT).unwrap();
    let o = bin(&["fig4", "--out-dir", "figs"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = bin(&["sweep", "--config", "point.toml", "--out-dir", "sweep"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let a = std::fs::read(dir.path().join("figs/fig4a_eta1.csv")).unwrap();
    let b = std::fs::read(dir.path().join("sweep/fig4a_eta1.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(std::fs::read_dir(dir.path().join("sweep")).unwrap().count(), 1);

    // every fig4 dataset: resolved header, increasing time, fidelity in [0, 1]
    for entry in std::fs::read_dir(dir.path().join("figs")).unwrap() {
        let table = Table::read(&entry.unwrap().path()).unwrap();
        for key in ["engine = \"analytic\"", "gamma1 = 1.0", "truncation = 66", "prepend_zero = true"] {
            assert!(table.metadata.iter().any(|l| l == key), "missing {key}");
        }
        let t = table.column("t").unwrap();
        assert_eq!(t.len(), 401);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert!(table.column("fidelity").unwrap().iter().all(|f| (0.0..=1.0).contains(f)));
    }
}

#[test]
fn sweep_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (SINGLE_POINT.replace("ratio = 1e-3", "ratio = 1e-3\nphase = 2"), "unknown field `phase`"),
        (SINGLE_POINT.replace("count = 400", "count = \"many\""), "line 13"),
        (SINGLE_POINT.replace("eta = [1.0]", "eta = [1.0]\ng = [-1.0]").replace("name = \"fig4a\"", "name = \"x\"\nengine = \"oracle\""), "mean photon number <= 6"),
        (SINGLE_POINT.replace("eta = [1.0]", "eta = [2.0]"), "params"),
    ];
    for (k, (text, needle)) in cases.iter().enumerate() {
        let name = format!("bad{k}.toml");
        std::fs::write(dir.path().join(&name), text).unwrap();
        let o = bin(&["sweep", "--config", &name, "--out-dir", "out"], dir.path());
        assert_eq!(o.status.code(), Some(1), "case {k}");
        assert!(stderr(&o).contains(needle), "case {k}: {}", stderr(&o));
    }
    let o = bin(&["sweep", "--config", "missing.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn empty_sweep_warns_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.toml"), SINGLE_POINT.replace("eta = [1.0]", "eta = []")).unwrap();
    let o = bin(&["sweep", "--config", "empty.toml", "--out-dir", "out"], dir.path());
    assert!(o.status.success());
    assert!(stderr(&o).contains("empty"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn oracle_sweep_with_two_observables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
name = "small"
engine = "oracle"
observables = ["fidelity", "photon_number"]

[params]
ratio = 0.05
eta = 0.95
g = [0.0, -1.0]

[state]
kind = "coherent"
alpha = [0.6, 0.0]

[time]
points = [0.0, 0.5, 1.0]
"#;
    std::fs::write(dir.path().join("s.toml"), cfg).unwrap();
    let o = bin(&["sweep", "--config", "s.toml", "--out-dir", "out", "--truncation", "14"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let table = Table::read(&dir.path().join("out/small_g0.csv")).unwrap();
    assert_eq!(table.columns, ["t", "fidelity", "photon_number"]);
    assert!(table.metadata.iter().any(|l| l == "truncation = 14"));
    let n = table.column("photon_number").unwrap();
    assert!((n[2] - 0.36 * (-1.0f64).exp()).abs() < 1e-9, "{n:?}");
    assert!(dir.path().join("out/small_g-1.csv").exists());
}

#[test]
fn grid_figures_write_four_panels() {
    let dir = tempfile::tempdir().unwrap();
    for (fig, truncation) in [("fig2", None), ("fig3", Some("30"))] {
        let mut args = vec![fig, "--out-dir", "g"];
        if let Some(t) = truncation {
            args.extend(["--truncation", t]);
        }
        let o = bin(&args, dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        for p in ["a", "b", "c", "d"] {
            let table = Table::read(&dir.path().join(format!("g/{fig}_{p}.csv"))).unwrap();
            assert_eq!(table.rows.len(), 121 * 121);
            assert_eq!(table.columns, ["x", "y", "w"]);
        }
    }
    let fig3 = Table::read(&dir.path().join("g/fig3_a.csv")).unwrap();
    assert!(fig3.metadata.iter().any(|l| l == "truncation = 30"));
}

#[test]
fn validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["validate"], dir.path());
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{out}");
    assert!(out.contains(", 0 failed") && !out.contains("[FAIL]"), "{out}");
}
