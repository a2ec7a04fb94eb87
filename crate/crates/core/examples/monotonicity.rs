//! Classify maps by the order conditions they satisfy.

use randeig::maps::{MapConfig, MapInstance};

fn report(name: &str, map: &MapInstance) -> randeig::Result<()> {
    let r = map.classify_monotonicity(500, 1)?;
    println!(
        "{name:<22} declared {:?}, found {:?} ({:?}); m1={} m2={} m3={} m4={}",
        map.declared_class(),
        r.class(),
        r.certificate,
        r.m1,
        r.m2,
        r.m3,
        r.m4
    );
    if let Some(w) = r.witness {
        println!(
            "{:<22} counterexample for {}: x = {:?}",
            "", w.condition, w.x
        );
    }
    Ok(())
}

pub fn run() -> randeig::Result<()> {
    let maps = [
        (
            "positive matrix",
            MapConfig::LinearPositive {
                a: vec![vec![1.0, 2.0], vec![3.0, 1.0]],
            },
        ),
        (
            "primitive pattern",
            MapConfig::LinearNonnegative {
                a: vec![vec![0.0, 1.0], vec![1.0, 1.0]],
            },
        ),
        (
            "identity",
            MapConfig::LinearNonnegative {
                a: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
        ),
        (
            "power mean p=1/2",
            MapConfig::PowerMean {
                c: vec![vec![1.0, 1.0], vec![0.5, 2.0]],
                p: 0.5,
            },
        ),
        (
            "leontief",
            MapConfig::LeontiefMin {
                a: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            },
        ),
    ];
    for (name, cfg) in maps {
        report(name, &cfg.build()?)?;
    }

    let affine = MapConfig::AffineOffset {
        a: vec![vec![1.0, 0.5], vec![0.5, 1.0]],
        b: vec![0.1, 0.2],
    }
    .build()?;
    let h = affine.check_homogeneity(200, 3)?;
    println!(
        "affine offset homogeneous: {} (deviation {:.2e}, witness {:?})",
        h.passed, h.max_deviation, h.witness
    );

    let pm = MapInstance::power_mean(randeig::DMatrix::from_element(3, 3, 1.0), 0.3)?;
    let ne = pm.check_nonexpansive(1000, 5)?;
    println!(
        "power mean non-expansive: {} over {} pairs, max excess {:.1e}",
        ne.passed(),
        ne.pairs,
        ne.max_excess
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
