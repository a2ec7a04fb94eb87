//! Every cargo example runs to completion.

#[path = "../examples/cocycle.rs"]
#[allow(dead_code)]
mod cocycle;
#[path = "../examples/deterministic_perron.rs"]
#[allow(dead_code)]
mod deterministic_perron;
#[path = "../examples/experiment_sweep.rs"]
#[allow(dead_code)]
mod experiment_sweep;
#[path = "../examples/hilbert_metric.rs"]
#[allow(dead_code)]
mod hilbert_metric;
#[path = "../examples/monotonicity.rs"]
#[allow(dead_code)]
mod monotonicity;
#[path = "../examples/random_cones.rs"]
#[allow(dead_code)]
mod random_cones;
#[path = "../examples/random_eigenpair.rs"]
#[allow(dead_code)]
mod random_eigenpair;

#[test]
fn hilbert_metric_example() {
    hilbert_metric::run().unwrap();
}

#[test]
fn monotonicity_example() {
    monotonicity::run().unwrap();
}

#[test]
fn cocycle_example() {
    cocycle::run().unwrap();
}

#[test]
fn deterministic_perron_example() {
    deterministic_perron::run().unwrap();
}

#[test]
fn random_eigenpair_example() {
    random_eigenpair::run().unwrap();
}

#[test]
fn random_cones_example() {
    random_cones::run().unwrap();
}

#[test]
fn experiment_sweep_example() {
    experiment_sweep::run().unwrap();
}
