//! Random simplicial cones: the solution is the conjugate of the orthant solution.

use randeig::envpath::{EnvFamily, EnvironmentPath, Scenario};
use randeig::solver::{pullback_solve, SolverOptions};

pub fn run() -> randeig::Result<()> {
    let plain = Scenario::new(3, EnvFamily::RandomPositive);
    let cones = plain.clone().with_simplicial_cones(0.2);
    let env_k = EnvironmentPath::new(5, cones)?;
    let env_o = EnvironmentPath::new(5, plain)?;

    let k0 = env_k.cone_at(0)?;
    println!("G_0 =\n{}", k0.generators().unwrap());
    println!("G_1 =\n{}", env_k.cone_at(1)?.generators().unwrap());

    let opts = SolverOptions::default();
    let xk = pullback_solve(&env_k, &opts)?.x0_vector();
    let xo = pullback_solve(&env_o, &opts)?.x0_vector();
    let conj = k0.section_normalize(&k0.default_functional(), &(k0.generators().unwrap() * xo))?;
    println!("solution on K_0:         {:?}", xk.as_slice());
    println!("G_0 (orthant solution):  {:?}", conj.as_slice());
    println!("l_inf difference {:.1e}", (xk - conj).amax());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
