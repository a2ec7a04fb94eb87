use std::path::Path;
use std::process::{Command, Output};

use randeig::experiment::RunReport;

fn config(name: &str) -> String {
    format!("{}/configs/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}

fn randeig(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_randeig"));
    cmd.args(args).env_remove("RANDEIG_OUT_DIR");
    if let Some(dir) = out_env {
        cmd.env("RANDEIG_OUT_DIR", dir);
    }
    cmd.output().unwrap()
}

fn csv_body(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# randeig-csv schema=1"));
    lines.map(String::from).collect()
}

#[test]
fn solve_writes_reproducible_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("iid_positive");
    for dir in [a.path(), b.path()] {
        let out = randeig(
            &[
                "solve",
                "--config",
                &cfg,
                "--seeds",
                "3,4,5",
                "--out",
                dir.to_str().unwrap(),
            ],
            None,
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in ["diameters.csv", "profile.csv", "eigenpath.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
    let header = &csv_body(&a.path().join("diameters.csv"))[0];
    assert_eq!(header, "seed,base,m,rho_hat");

    let report: RunReport =
        serde_json::from_slice(&std::fs::read(a.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.runs.len(), 3);
    assert_eq!(
        report.runs.iter().map(|r| r.seed).collect::<Vec<_>>(),
        vec![3, 4, 5]
    );
    for r in &report.runs {
        let s: f64 = r.x0.as_ref().unwrap().iter().sum();
        assert!((s - 1.0).abs() <= 1e-12);
        assert!(r.profile_final_gap.unwrap() <= r.norm_tolerance.unwrap());
    }

    // Diameters are non-increasing per seed from the strictness depth on.
    let mut by_seed: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for line in csv_body(&a.path().join("diameters.csv")).iter().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        by_seed
            .entry(f[0].to_string())
            .or_default()
            .push(f[3].parse().unwrap());
    }
    for (seed, d) in by_seed {
        let finite: Vec<f64> = d.into_iter().filter(|v| v.is_finite()).collect();
        assert!(
            finite.windows(2).all(|w| w[1] <= w[0] + 1e-12),
            "seed {seed}"
        );
    }
}

#[test]
fn deterministic_report_has_the_log_spectral_radius() {
    let dir = tempfile::tempdir().unwrap();
    let out = randeig(
        &[
            "solve",
            "--config",
            &config("deterministic"),
            "--format",
            "json",
        ],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(!dir.path().join("diameters.csv").exists());
    let report: RunReport =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let lyap = report.runs[0].lyapunov.unwrap();
    let a: nalgebra::DMatrix<f64> = nalgebra::dmatrix![2.0, 1.0, 0.5; 1.0, 3.0, 1.0; 0.5, 1.0, 2.0];
    let lambda = a.symmetric_eigenvalues().max();
    assert!((lyap.mean - lambda.ln()).abs() <= 1e-12);
    assert!(lyap.stderr <= 1e-12);
}

#[test]
fn permutation_scenario_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = randeig(
        &[
            "solve",
            "--config",
            &config("permutation"),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("no strictness index <= max_depth"),
        "{stdout}"
    );
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "[scenario]\nn = 3\nfamily = { kind = \"random_positive\" }\n[solver]\ntol = -1.0\n",
    )
    .unwrap();
    let out = randeig(&["solve", "--config", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver.tol"));

    let out = randeig(&["solve", "--config", "/nonexistent.toml"], None);
    assert_eq!(out.status.code(), Some(1));
    let out = randeig(
        &["solve", "--config", &config("iid_positive"), "--tol", "0"],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_configs_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"scenario": {"n": 2, "family": {"kind": "random_positive"}}, "solver": {"horizon": 10}}"#,
    )
    .unwrap();
    let out = randeig(&["solve", "--config", path.to_str().unwrap()], None);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_reports_named_checks() {
    let out = randeig(&["verify", "--config", &config("simplicial")], None);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in randeig::experiment::CHECK_NAMES {
        assert!(
            stdout
                .lines()
                .any(|l| l.starts_with("PASS") && l.contains(name)),
            "{name}\n{stdout}"
        );
    }

    let out = randeig(&["verify", "--config", &config("permutation")], None);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout
        .lines()
        .any(|l| l.starts_with("XFAIL") && l.contains("condition_c")));

    let out = randeig(&["verify", "--config", &config("broken_homogeneity")], None);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let line = stdout.lines().find(|l| l.contains("homogeneity")).unwrap();
    assert!(
        line.starts_with("FAIL") && line.contains("witness"),
        "{line}"
    );
}
