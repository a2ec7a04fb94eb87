//! Config-driven seed sweep with CSV/JSON output, then the property-check suite.

use randeig::experiment::{run_experiment, verify_suite, ExperimentConfig};

const CONFIG: &str = r#"
[scenario]
n = 3
family = { kind = "random_power_mean", p = 0.5 }

[solver]
tol = 1e-9
horizon = 200

[sweep]
seeds = [1, 2, 3]
base_offsets = [0, 100]
"#;

pub fn run() -> randeig::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let dir = std::env::temp_dir().join(format!("randeig-sweep-{}", std::process::id()));
    let report = run_experiment(&cfg, Some(&dir))?;
    for r in &report.runs {
        println!(
            "seed {} base {:>3}: depth {:>2}, lyapunov {:.4}",
            r.seed,
            r.base,
            r.depth_reached,
            r.lyapunov.map_or(f64::NAN, |l| l.mean)
        );
    }
    println!("wrote {}", dir.display());
    for c in verify_suite(&cfg)?.checks {
        println!("{c}");
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
