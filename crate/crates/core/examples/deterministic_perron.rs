//! A constant positive matrix: the pullback limit is its Perron vector.

use randeig::envpath::{EnvFamily, EnvironmentPath, Scenario};
use randeig::maps::MapConfig;
use randeig::solver::{forward_extend, lyapunov_estimate, pullback_solve, SolverOptions};

pub fn run() -> randeig::Result<()> {
    let a = vec![
        vec![2.0, 1.0, 0.5],
        vec![1.0, 3.0, 1.0],
        vec![0.5, 1.0, 2.0],
    ];
    let scenario = Scenario::new(
        3,
        EnvFamily::Fixed {
            map: MapConfig::LinearPositive { a: a.clone() },
        },
    );
    let env = EnvironmentPath::new(0, scenario)?;

    let trace = pullback_solve(&env, &SolverOptions::default().with_tol(1e-12))?;
    println!(
        "converged at depth {} (strict from {:?})",
        trace.depth_reached, trace.m_strict
    );
    println!("x0 = {:?}", trace.x0);

    let path = forward_extend(&env, &trace.x0_vector(), 10)?;
    println!("alpha_0 = {:.12}", path.alpha[0]);

    let m = randeig::cones::matrix_from_rows(&a)?;
    let lambda = m
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    println!("spectral radius = {lambda:.12}");
    let est = lyapunov_estimate(&path)?;
    println!(
        "mean log alpha = {:.12} (log lambda = {:.12})",
        est.mean,
        lambda.ln()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
