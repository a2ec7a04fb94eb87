//! Random environments: random access, shifts, the cocycle and strictness indices.

use randeig::envpath::{EnvFamily, EnvironmentPath, Scenario};
use randeig::maps::MapConfig;
use randeig::DVector;

pub fn run() -> randeig::Result<()> {
    let env = EnvironmentPath::new(2024, Scenario::new(3, EnvFamily::RandomPositive))?;
    let step = env.step_at(-1_000_000)?;
    println!("D at index -10^6:\n{}", step.map.as_linear().unwrap());

    let shifted = env.shift(5);
    assert_eq!(
        shifted.step_at(0)?.map.as_linear(),
        env.step_at(5)?.map.as_linear()
    );
    println!("shift by 5 matches index translation");

    let x = DVector::from_vec(vec![0.2, 0.3, 0.5]);
    let whole = env.cocycle_apply(0, 7, &x)?;
    let first = env.cocycle_apply(0, 3, &x)?;
    let rest = env.cocycle_apply(3, 4, &first.value())?;
    let err = (whole.value() - rest.value()).amax() / whole.value().amax();
    println!(
        "C(7) vs C(4, T^3) C(3): relative error {err:.1e}, log scale {:.4}",
        whole.log_scale
    );

    let pattern = MapConfig::LinearNonnegative {
        a: vec![vec![0.0, 1.0], vec![1.0, 1.0]],
    };
    let fixed = EnvironmentPath::new(0, Scenario::new(2, EnvFamily::Fixed { map: pattern }))?;
    let perms = EnvironmentPath::new(0, Scenario::new(3, EnvFamily::RandomPermutation))?;
    println!(
        "strictness index, positive:     {:?}",
        env.strictness_index(0, 64)?
    );
    println!(
        "strictness index, [[0,1],[1,1]]: {:?}",
        fixed.strictness_index(0, 64)?
    );
    println!(
        "strictness index, permutations: {:?}",
        perms.strictness_index(0, 64)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
