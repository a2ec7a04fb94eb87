//! I.i.d. positive matrices: random eigenvector, eigenvalue path and Lyapunov exponent.

use randeig::envpath::{EnvFamily, EnvironmentPath, Scenario};
use randeig::solver::{
    forward_extend, lyapunov_estimate, pullback_solve, uniform_convergence_profile,
    uniqueness_check, ProbePolicy, SolverOptions,
};

pub fn run() -> randeig::Result<()> {
    let scenario = Scenario::new(4, EnvFamily::RandomPositive).with_bounds(0.5, 2.0);
    let env = EnvironmentPath::new(7, scenario)?;
    let opts = SolverOptions::default().with_max_depth(500);

    let trace = pullback_solve(&env, &opts)?;
    println!(
        "converged: {} at depth {}",
        trace.converged, trace.depth_reached
    );
    for (m, d) in trace.diameters.iter().enumerate().take(8) {
        println!("  m = {m:>2}  diameter {d:.3e}");
    }
    let x0 = trace.x0_vector();
    println!("x0 = {:?}", trace.x0);

    let d = uniqueness_check(
        &env,
        &opts,
        &ProbePolicy::default(),
        &ProbePolicy::random_only(16, 99),
    )?;
    println!("distance between two probe sets: {d:.2e}");

    let profile =
        uniform_convergence_profile(&env, &x0, &[1, 2, 4, 8, 16], &ProbePolicy::default())?;
    for p in &profile {
        println!("  t = {:>2}  sup gap {:.3e}", p.t, p.sup_gap);
    }

    let path = forward_extend(&env, &x0, 10_000)?;
    println!("alpha_0..3 = {:?}", &path.alpha[..3]);
    println!("max residual {:.1e}", path.max_residual());
    let est = lyapunov_estimate(&path)?;
    println!("Lyapunov exponent {:.5} +/- {:.1e}", est.mean, est.stderr);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
