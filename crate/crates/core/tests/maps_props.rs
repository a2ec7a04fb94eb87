mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use randeig::hilbert::MetricContext;
use randeig::maps::{Certificate, MapInstance, MonotonicityClass};

fn random_family(r: &mut impl Rng, family: u8) -> MapInstance {
    let n = r.random_range(2..=4);
    match family {
        0 => MapInstance::linear_positive(uniform_matrix(r, n, 0.1, 2.0)).unwrap(),
        1 => {
            let p = r.random_range(0.05..=1.0);
            MapInstance::power_mean(uniform_matrix(r, n, 0.5, 2.0), p).unwrap()
        }
        2 => MapInstance::leontief_min(uniform_matrix(r, n, 0.5, 2.0)).unwrap(),
        _ => {
            let g_in = DMatrix::identity(n, n) + uniform_matrix(r, n, 0.0, 0.5);
            let g_out = DMatrix::identity(n, n) + uniform_matrix(r, n, 0.0, 0.5);
            MapInstance::simplicial_conjugated(uniform_matrix(r, n, 0.1, 2.0), g_in, g_out).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneous_families_pass_homogeneity(seed in any::<u64>(), family in 0u8..4) {
        let map = random_family(&mut rng(seed), family);
        let rep = map.check_homogeneity(50, seed).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }

    #[test]
    fn images_stay_in_the_output_cone(seed in any::<u64>(), family in 0u8..4) {
        let mut r = rng(seed);
        let map = random_family(&mut r, family);
        let phi = map.cone_in().default_functional();
        for _ in 0..20 {
            let x = map.cone_in().sample_section_face(&phi, &mut r);
            prop_assert!(map.cone_out().contains(&map.apply(&x).unwrap()).unwrap());
        }
    }

    #[test]
    fn nonexpansive_in_the_hilbert_metric(seed in any::<u64>(), family in 0u8..4) {
        let map = random_family(&mut rng(seed), family);
        let rep = map.check_nonexpansive(100, seed).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn strict_maps_contract_distinct_pairs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let map = random_family(&mut r, 0);
        let ctx = MetricContext::with_default_functional(map.cone_in().clone());
        let phi = ctx.functional().clone();
        let x = map.cone_in().sample_section_interior(&phi, &mut r);
        let y = map.cone_in().sample_section_interior(&phi, &mut r);
        let d_in = ctx.distance(&x, &y).unwrap();
        let d_out = ctx.distance(&map.apply(&x).unwrap(), &map.apply(&y).unwrap()).unwrap();
        prop_assume!(d_in > 1e-6);
        prop_assert!(d_out < d_in);
    }

    #[test]
    fn concave_families_are_superadditive(seed in any::<u64>(), family in 0u8..3) {
        let map = random_family(&mut rng(seed), family);
        prop_assert!(map.is_concave());
        let rep = map.check_superadditivity(50, seed).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }
}

#[test]
fn declared_classes_are_confirmed() {
    let mut r = rng(11);
    for family in 0..4 {
        for _ in 0..5 {
            let map = random_family(&mut r, family);
            let rep = map.classify_monotonicity(200, r.random()).unwrap();
            let class = rep.class().expect("monotone");
            assert!(
                class >= map.declared_class(),
                "{:?} vs {:?}",
                class,
                map.declared_class()
            );
        }
    }
}

#[test]
fn leontief_is_monotone_but_not_completely_monotone() {
    let map = MapInstance::leontief_min(DMatrix::from_element(3, 3, 1.0)).unwrap();
    let rep = map.classify_monotonicity(200, 1).unwrap();
    assert!(rep.monotone && rep.m2 && !rep.m1);
    assert_eq!(rep.class(), Some(MonotonicityClass::Monotone));
    assert_eq!(rep.witness.unwrap().condition, "M1");
}

#[test]
fn linear_certificates_are_exact() {
    let identity = MapInstance::linear_nonnegative(DMatrix::identity(3, 3)).unwrap();
    let rep = identity.classify_monotonicity(10, 0).unwrap();
    assert_eq!(rep.certificate, Certificate::Exact);
    assert_eq!(rep.class(), Some(MonotonicityClass::CompletelyMonotone));
    let nilpotent =
        MapInstance::linear_nonnegative(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]))
            .unwrap();
    let rep = nilpotent.classify_monotonicity(10, 0).unwrap();
    assert!(!rep.m1 && !rep.m2);
    assert_eq!(rep.class(), Some(MonotonicityClass::Monotone));
}
