//! Seeded two-sided environment paths and the cocycle they generate.
//!
//! An [`EnvironmentPath`] is a pure function from an integer index `k` to a
//! step `(K_k, phi_k, D_k)` with `D_k : K_k -> K_{k+1}`. Randomness comes from
//! ChaCha8 keyed by the master seed, with one stream per `(index, purpose)`, so
//! any index can be queried in O(1) and in any order. Shifting the path by `s`
//! is index translation.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{matrix_from_rows, ConeSpec, Functional};
use crate::maps::{Certificate, MapConfig, MapInstance};
use crate::{Error, Result};

/// Largest admissible `|k|` for [`EnvironmentPath::step_at`].
pub const INDEX_BUDGET: i64 = 1 << 48;

const PURPOSE_MAP: u64 = 0;
const PURPOSE_CONE: u64 = 1;
const PURPOSE_PROBE: u64 = 2;

/// Face samples pushed through nonlinear cocycles by [`EnvironmentPath::strictness_index`].
const STRICTNESS_SAMPLES: usize = 64;

/// How the step map at each index is drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvFamily {
    /// Linear map with i.i.d. entries uniform in `[lo, hi]`.
    RandomPositive,
    /// Power mean with coefficients uniform in `[lo, hi]`.
    RandomPowerMean { p: f64 },
    /// Leontief minimum with coefficients uniform in `[lo, hi]`.
    RandomLeontief,
    /// A uniformly random permutation matrix at every index.
    RandomPermutation,
    /// The same map at every index.
    Fixed { map: MapConfig },
    /// `c_k A` with `log c_k` uniform in `[log c_lo, log c_hi]`.
    ScaledFixed {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        c_lo: f64,
        c_hi: f64,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeSchedule {
    /// `K_k = K` for all `k`.
    #[default]
    Constant,
    /// `K_k = G_k R^n_+` with `G_k = I + epsilon E_k`, `E_k` uniform in `[0, 1]`.
    SimplicialRandom,
}

fn default_lo() -> f64 {
    0.5
}

fn default_hi() -> f64 {
    2.0
}

fn default_epsilon() -> f64 {
    0.2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub n: usize,
    pub family: EnvFamily,
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "default_hi")]
    pub hi: f64,
    #[serde(default)]
    pub cone_schedule: ConeSchedule,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl Scenario {
    pub fn new(n: usize, family: EnvFamily) -> Self {
        Scenario {
            n,
            family,
            lo: default_lo(),
            hi: default_hi(),
            cone_schedule: ConeSchedule::Constant,
            epsilon: default_epsilon(),
        }
    }

    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn with_simplicial_cones(mut self, epsilon: f64) -> Self {
        self.cone_schedule = ConeSchedule::SimplicialRandom;
        self.epsilon = epsilon;
        self
    }

    /// Every step map is linear, so strictness has an exact certificate.
    pub fn is_linear(&self) -> bool {
        match &self.family {
            EnvFamily::RandomPositive
            | EnvFamily::RandomPermutation
            | EnvFamily::ScaledFixed { .. } => true,
            EnvFamily::RandomPowerMean { .. } | EnvFamily::RandomLeontief => false,
            EnvFamily::Fixed { map } => matches!(
                map,
                MapConfig::LinearPositive { .. }
                    | MapConfig::LinearNonnegative { .. }
                    | MapConfig::SimplicialConjugated { .. }
            ),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if !(self.lo > 0.0 && self.lo <= self.hi && self.hi.is_finite()) {
            return bad(format!(
                "entry bounds [{}, {}] must satisfy 0 < lo <= hi",
                self.lo, self.hi
            ));
        }
        if self.cone_schedule == ConeSchedule::SimplicialRandom {
            if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
                return bad(format!("epsilon {} must be positive", self.epsilon));
            }
            if !self.is_linear() {
                return bad("simplicial_random cones need a linear map family".into());
            }
            if let EnvFamily::Fixed {
                map: MapConfig::SimplicialConjugated { .. },
            } = &self.family
            {
                return bad("a fixed simplicial_conjugated map needs the constant schedule".into());
            }
        }
        match &self.family {
            EnvFamily::RandomPowerMean { p } if !(*p > 0.0 && *p <= 1.0) => {
                return bad(format!("power mean exponent {p} not in (0, 1]"));
            }
            EnvFamily::ScaledFixed { a, c_lo, c_hi } => {
                if !(*c_lo > 0.0 && c_lo <= c_hi && c_hi.is_finite()) {
                    return bad(format!(
                        "scale bounds [{c_lo}, {c_hi}] must satisfy 0 < c_lo <= c_hi"
                    ));
                }
                let a = matrix_from_rows(a)?;
                if a.shape() != (self.n, self.n) || a.iter().any(|&v| v < 0.0) {
                    return bad("A must be a nonnegative n x n matrix".into());
                }
            }
            EnvFamily::Fixed { map } => {
                let m = map.build()?;
                if m.dim() != self.n {
                    return bad(format!(
                        "fixed map has dimension {} but n = {}",
                        m.dim(),
                        self.n
                    ));
                }
                if m.cone_in() != m.cone_out() {
                    return bad("a fixed map must send its cone into the same cone".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// One step of the environment: `D` maps `cone = K_k` into `K_{k+1}`.
#[derive(Clone, Debug)]
pub struct StepTriple {
    pub index: i64,
    pub cone: ConeSpec,
    pub functional: Functional,
    pub map: MapInstance,
}

/// `exp(log_scale) * direction`, used to carry long cocycle products without overflow.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledVector {
    pub direction: DVector<f64>,
    pub log_scale: f64,
}

impl ScaledVector {
    pub fn value(&self) -> DVector<f64> {
        &self.direction * self.log_scale.exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrictnessIndex {
    pub l: usize,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct EnvironmentPath {
    master_seed: u64,
    scenario: Arc<Scenario>,
    offset: i64,
    fixed: Option<Arc<MapInstance>>,
    scaled_base: Option<Arc<DMatrix<f64>>>,
}

impl EnvironmentPath {
    pub fn new(master_seed: u64, scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let fixed = match &scenario.family {
            EnvFamily::Fixed { map } => Some(Arc::new(map.build()?)),
            _ => None,
        };
        let scaled_base = match &scenario.family {
            EnvFamily::ScaledFixed { a, .. } => Some(Arc::new(matrix_from_rows(a)?)),
            _ => None,
        };
        Ok(EnvironmentPath {
            master_seed,
            scenario: Arc::new(scenario),
            offset: 0,
            fixed,
            scaled_base,
        })
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn dim(&self) -> usize {
        self.scenario.n
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// The path seen from `T^s omega`: index `k` of the result is index `k + s` here.
    pub fn shift(&self, s: i64) -> Self {
        EnvironmentPath {
            offset: self.offset + s,
            ..self.clone()
        }
    }

    fn absolute(&self, k: i64) -> Result<i64> {
        let abs = self
            .offset
            .checked_add(k)
            .filter(|a| a.unsigned_abs() <= INDEX_BUDGET as u64)
            .ok_or(Error::IndexBudget { index: k })?;
        Ok(abs)
    }

    fn rng(&self, abs: i64, purpose: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        let counter = (abs + INDEX_BUDGET) as u64;
        rng.set_stream((counter << 2) | purpose);
        rng
    }

    fn cone_abs(&self, abs: i64) -> Result<ConeSpec> {
        match self.scenario.cone_schedule {
            ConeSchedule::Constant => match &self.fixed {
                Some(map) => Ok(map.cone_in().clone()),
                None => ConeSpec::orthant(self.scenario.n),
            },
            ConeSchedule::SimplicialRandom => {
                let n = self.scenario.n;
                let eps = self.scenario.epsilon;
                let mut rng = self.rng(abs, PURPOSE_CONE);
                let e = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>());
                ConeSpec::simplicial(DMatrix::identity(n, n) + e * eps)
            }
        }
    }

    /// Cone `K_k`.
    pub fn cone_at(&self, k: i64) -> Result<ConeSpec> {
        self.cone_abs(self.absolute(k)?)
    }

    /// Step map in orthant coordinates at absolute index `abs`.
    fn base_map(&self, abs: i64) -> Result<MapInstance> {
        let sc = &*self.scenario;
        let n = sc.n;
        let mut rng = self.rng(abs, PURPOSE_MAP);
        let uniform = |rng: &mut ChaCha8Rng| {
            DMatrix::from_fn(n, n, |_, _| {
                if sc.lo == sc.hi {
                    sc.lo
                } else {
                    rng.random_range(sc.lo..=sc.hi)
                }
            })
        };
        match &sc.family {
            EnvFamily::RandomPositive => MapInstance::linear_positive(uniform(&mut rng)),
            EnvFamily::RandomPowerMean { p } => MapInstance::power_mean(uniform(&mut rng), *p),
            EnvFamily::RandomLeontief => MapInstance::leontief_min(uniform(&mut rng)),
            EnvFamily::RandomPermutation => {
                let mut perm: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    let j = rng.random_range(0..=i);
                    perm.swap(i, j);
                }
                let a = DMatrix::from_fn(n, n, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
                MapInstance::linear_nonnegative(a)
            }
            EnvFamily::ScaledFixed { c_lo, c_hi, .. } => {
                let a = self.scaled_base.as_deref().expect("built in new");
                let c = if c_lo == c_hi {
                    *c_lo
                } else {
                    rng.random_range(c_lo.ln()..=c_hi.ln()).exp()
                };
                let ca = a * c;
                if ca.iter().all(|&v| v > 0.0) {
                    MapInstance::linear_positive(ca)
                } else {
                    MapInstance::linear_nonnegative(ca)
                }
            }
            EnvFamily::Fixed { .. } => Ok((**self.fixed.as_ref().expect("built in new")).clone()),
        }
    }

    /// The step `(K_k, phi_k, D_k)`.
    pub fn step_at(&self, k: i64) -> Result<StepTriple> {
        let abs = self.absolute(k)?;
        if abs.unsigned_abs() == INDEX_BUDGET as u64 {
            return Err(Error::IndexBudget { index: k });
        }
        let cone = self.cone_abs(abs)?;
        let functional = cone.default_functional();
        let base = self.base_map(abs)?;
        let map = match self.scenario.cone_schedule {
            ConeSchedule::Constant => base,
            ConeSchedule::SimplicialRandom => {
                let p = base.as_linear().expect("validated linear").clone();
                let g_in = cone.generators().expect("simplicial").clone();
                let next = self.cone_abs(abs + 1)?;
                let g_out = next.generators().expect("simplicial").clone();
                MapInstance::simplicial_conjugated(p, g_in, g_out)?
            }
        };
        Ok(StepTriple {
            index: k,
            cone,
            functional,
            map,
        })
    }

    /// `C(t, T^base omega) x = D_{base+t-1} ... D_base x`, renormalized after every step.
    ///
    /// `t = 0` returns `x` unchanged with zero log-scale.
    pub fn cocycle_apply(&self, base: i64, t: usize, x: &DVector<f64>) -> Result<ScaledVector> {
        let cone = self.cone_at(base)?;
        if !cone.contains(x)? {
            return Err(Error::NotInCone);
        }
        let mut v = x.clone();
        let mut log_scale = 0.0;
        for i in 0..t {
            let step = self.step_at(base + i as i64)?;
            v = step.map.apply(&v)?;
            let s = v.amax();
            if s == 0.0 {
                return Ok(ScaledVector {
                    direction: v,
                    log_scale: f64::NEG_INFINITY,
                });
            }
            v /= s;
            log_scale += s.ln();
        }
        Ok(ScaledVector {
            direction: v,
            log_scale,
        })
    }

    /// Smallest `l <= max_l` such that `C(l, T^base omega)` is strictly monotone.
    ///
    /// Linear paths are certified exactly: every extreme ray of `K_base` must be
    /// mapped into the interior of `K_{base+l}`. Nonlinear paths push the rays
    /// and random face points through the cocycle instead.
    pub fn strictness_index(&self, base: i64, max_l: usize) -> Result<Option<StrictnessIndex>> {
        if max_l == 0 {
            return Err(Error::InvalidArgument("max_l must be at least 1".into()));
        }
        let cone = self.cone_at(base)?;
        let mut probes: Vec<DVector<f64>> = cone
            .extreme_rays()
            .column_iter()
            .map(|c| c.into_owned())
            .collect();
        let certificate = if self.scenario.is_linear() {
            Certificate::Exact
        } else {
            let phi = cone.default_functional();
            let mut rng = self.rng(self.absolute(base)?, PURPOSE_PROBE);
            probes
                .extend((0..STRICTNESS_SAMPLES).map(|_| cone.sample_section_face(&phi, &mut rng)));
            Certificate::Sampled
        };
        for l in 1..=max_l {
            let step = self.step_at(base + l as i64 - 1)?;
            for p in probes.iter_mut() {
                let next = step.map.apply(p)?;
                let s = next.amax();
                *p = if s > 0.0 { next / s } else { next };
            }
            let target = self.cone_at(base + l as i64)?;
            let mut strict = true;
            for p in &probes {
                if !target.interior_contains(p)? {
                    strict = false;
                    break;
                }
            }
            if strict {
                return Ok(Some(StrictnessIndex { l, certificate }));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn positive(n: usize) -> EnvironmentPath {
        EnvironmentPath::new(42, Scenario::new(n, EnvFamily::RandomPositive)).unwrap()
    }

    fn fixed(rows: Vec<Vec<f64>>) -> EnvironmentPath {
        let map = MapConfig::LinearNonnegative { a: rows.clone() };
        EnvironmentPath::new(0, Scenario::new(rows.len(), EnvFamily::Fixed { map })).unwrap()
    }

    #[test]
    fn steps_are_deterministic() {
        let env = positive(3);
        let other = positive(3);
        for k in [-1000, -3, 0, 5, 77_777] {
            let a = env.step_at(k).unwrap();
            let b = other.step_at(k).unwrap();
            assert_eq!(a.map.as_linear(), b.map.as_linear());
        }
        let x = env.step_at(9).unwrap().map.as_linear().unwrap().clone();
        let _ = env.step_at(-9).unwrap();
        assert_eq!(env.step_at(9).unwrap().map.as_linear().unwrap(), &x);
        let differs = positive(3).step_at(10).unwrap();
        assert_ne!(differs.map.as_linear().unwrap(), &x);
    }

    #[test]
    fn shift_is_index_translation() {
        let env = positive(2).with_cones();
        let shifted = env.shift(17);
        for k in [-5, 0, 3] {
            let a = shifted.step_at(k).unwrap();
            let b = env.step_at(k + 17).unwrap();
            assert_eq!(a.map.as_linear(), b.map.as_linear());
            assert_eq!(a.cone, b.cone);
        }
    }

    impl EnvironmentPath {
        fn with_cones(self) -> Self {
            let sc = self.scenario().clone().with_simplicial_cones(0.2);
            EnvironmentPath::new(self.master_seed(), sc).unwrap()
        }
    }

    #[test]
    fn entries_respect_bounds() {
        let env = positive(4);
        for k in -50..50 {
            let step = env.step_at(k).unwrap();
            let a = step.map.as_linear().unwrap();
            assert!(a.iter().all(|&v| (0.5..=2.0).contains(&v)));
        }
    }

    #[test]
    fn index_budget() {
        let env = positive(2);
        assert!(env.step_at(INDEX_BUDGET - 1).is_ok());
        assert!(matches!(
            env.step_at(INDEX_BUDGET),
            Err(Error::IndexBudget { .. })
        ));
        assert!(matches!(
            env.step_at(i64::MIN),
            Err(Error::IndexBudget { .. })
        ));
    }

    #[test]
    fn cocycle_base_cases() {
        let env = positive(3);
        let x = dvector![0.2, 1.0, 3.0];
        let c0 = env.cocycle_apply(5, 0, &x).unwrap();
        assert_eq!(c0.direction, x);
        assert_eq!(c0.log_scale, 0.0);
        let c1 = env.cocycle_apply(5, 1, &x).unwrap().value();
        let direct = env.step_at(5).unwrap().map.apply(&x).unwrap();
        assert!((&c1 - &direct).amax() <= 1e-14 * direct.amax());
        assert!(env.cocycle_apply(0, 2, &dvector![1.0, -1.0, 0.0]).is_err());
    }

    #[test]
    fn simplicial_steps_map_cones_into_cones() {
        let env = positive(3).with_cones();
        for k in -3..3 {
            let step = env.step_at(k).unwrap();
            let next = env.cone_at(k + 1).unwrap();
            assert_eq!(step.map.cone_out(), &next);
            for g in step.cone.extreme_rays().column_iter() {
                let img = step.map.apply(&g.into_owned()).unwrap();
                assert!(next.interior_contains(&img).unwrap());
            }
        }
    }

    #[test]
    fn strictness_index_examples() {
        let r = positive(3).strictness_index(0, 8).unwrap().unwrap();
        assert_eq!(r.l, 1);
        assert_eq!(r.certificate, Certificate::Exact);

        let env = fixed(vec![vec![0.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(env.strictness_index(0, 8).unwrap().unwrap().l, 2);

        let env = EnvironmentPath::new(3, Scenario::new(4, EnvFamily::RandomPermutation)).unwrap();
        assert_eq!(env.strictness_index(0, 64).unwrap(), None);

        let env = EnvironmentPath::new(3, Scenario::new(3, EnvFamily::RandomPowerMean { p: 0.5 }))
            .unwrap();
        let r = env.strictness_index(-4, 8).unwrap().unwrap();
        assert_eq!((r.l, r.certificate), (1, Certificate::Sampled));
    }

    #[test]
    fn invalid_scenarios() {
        let mut sc = Scenario::new(2, EnvFamily::RandomLeontief).with_simplicial_cones(0.2);
        assert!(sc.validate().is_err());
        sc.cone_schedule = ConeSchedule::Constant;
        assert!(sc.validate().is_ok());
        assert!(Scenario::new(0, EnvFamily::RandomPositive)
            .validate()
            .is_err());
        assert!(Scenario::new(2, EnvFamily::RandomPositive)
            .with_bounds(2.0, 1.0)
            .validate()
            .is_err());
        let map = MapConfig::LinearPositive {
            a: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
        };
        assert!(Scenario::new(3, EnvFamily::Fixed { map })
            .validate()
            .is_err());
    }

    #[test]
    fn scenario_from_toml() {
        let sc: Scenario = toml::from_str(
            "n = 3\nlo = 0.5\nhi = 2.0\ncone_schedule = \"simplicial_random\"\n[family]\nkind = \"random_positive\"\n",
        )
        .unwrap();
        assert_eq!(sc.cone_schedule, ConeSchedule::SimplicialRandom);
        assert_eq!(sc.epsilon, 0.2);
        sc.validate().unwrap();
    }
}
