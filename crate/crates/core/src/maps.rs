//! Monotone, positively homogeneous maps between cones.
//!
//! The nonlinear families (power means, Leontief minima) act on the orthant.
//! Maps between two different simplicial cones are the conjugated linear maps
//! `x -> G_out P G_in^-1 x`, which send `K_in` into `K_out` by construction.
//!
//! The classifiers in this module are falsification tools: a `true` in a
//! [`MonotonicityReport`] means no counterexample was found among the samples,
//! except for linear maps where the generator images give exact certificates.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{matrix_from_rows, ConeSpec, Functional};
use crate::hilbert::MetricContext;
use crate::{Error, Result};

/// Relative slack used when comparing map outputs in the output cone order.
const ORDER_SLACK: f64 = 1e-10;

/// Homogeneity deviation accepted by [`MapInstance::check_homogeneity`].
pub const HOMOGENEITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityClass {
    Monotone,
    CompletelyMonotone,
    StrictlyMonotone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Decided from the images of the extreme rays of a linear map.
    Exact,
    /// No counterexample among random samples.
    Sampled,
}

#[derive(Clone, Debug)]
pub enum MapFamily {
    LinearPositive {
        a: DMatrix<f64>,
    },
    LinearNonnegative {
        a: DMatrix<f64>,
    },
    /// `D(x)_i = (sum_j C_ij x_j^p)^(1/p)` with `0 < p <= 1`.
    PowerMean {
        c: DMatrix<f64>,
        p: f64,
    },
    /// `D(x)_i = min_j x_j / A_ij`.
    LeontiefMin {
        a: DMatrix<f64>,
    },
    /// `D(x) = G_out P G_in^-1 x`; `ambient` caches the product.
    SimplicialConjugated {
        p: DMatrix<f64>,
        g_in: DMatrix<f64>,
        g_out: DMatrix<f64>,
        ambient: DMatrix<f64>,
    },
    /// `D(x) = A x + b`. Not homogeneous; exists to exercise the checks.
    AffineOffset {
        a: DMatrix<f64>,
        offset: DVector<f64>,
    },
}

/// Serialized map description, e.g. `{family = "power_mean", C = [[...]], p = 0.5}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    LinearPositive {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    LinearNonnegative {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    PowerMean {
        #[serde(rename = "C")]
        c: Vec<Vec<f64>>,
        p: f64,
    },
    LeontiefMin {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    SimplicialConjugated {
        #[serde(rename = "P")]
        p: Vec<Vec<f64>>,
        #[serde(rename = "G_in")]
        g_in: Vec<Vec<f64>>,
        #[serde(rename = "G_out")]
        g_out: Vec<Vec<f64>>,
    },
    AffineOffset {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
}

impl MapConfig {
    pub fn build(&self) -> Result<MapInstance> {
        match self {
            MapConfig::LinearPositive { a } => MapInstance::linear_positive(matrix_from_rows(a)?),
            MapConfig::LinearNonnegative { a } => {
                MapInstance::linear_nonnegative(matrix_from_rows(a)?)
            }
            MapConfig::PowerMean { c, p } => MapInstance::power_mean(matrix_from_rows(c)?, *p),
            MapConfig::LeontiefMin { a } => MapInstance::leontief_min(matrix_from_rows(a)?),
            MapConfig::SimplicialConjugated { p, g_in, g_out } => {
                MapInstance::simplicial_conjugated(
                    matrix_from_rows(p)?,
                    matrix_from_rows(g_in)?,
                    matrix_from_rows(g_out)?,
                )
            }
            MapConfig::AffineOffset { a, b } => {
                MapInstance::affine_offset(matrix_from_rows(a)?, DVector::from_vec(b.clone()))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct MapInstance {
    family: MapFamily,
    cone_in: ConeSpec,
    cone_out: ConeSpec,
    declared: MonotonicityClass,
}

fn square(a: &DMatrix<f64>, what: &str) -> Result<usize> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::InvalidMap(format!(
            "{what} must be a nonempty square matrix"
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidMap(format!("{what} has non-finite entries")));
    }
    Ok(a.nrows())
}

/// Class implied by the zero pattern of a nonnegative matrix acting on the orthant.
fn pattern_class(a: &DMatrix<f64>) -> MonotonicityClass {
    if a.iter().all(|&v| v > 0.0) {
        return MonotonicityClass::StrictlyMonotone;
    }
    let no_zero_col = a.column_iter().all(|c| c.iter().any(|&v| v > 0.0));
    let no_zero_row = a.row_iter().all(|r| r.iter().any(|&v| v > 0.0));
    if no_zero_col && no_zero_row {
        MonotonicityClass::CompletelyMonotone
    } else {
        MonotonicityClass::Monotone
    }
}

impl MapInstance {
    pub fn linear_positive(a: DMatrix<f64>) -> Result<Self> {
        let n = square(&a, "A")?;
        if a.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidMap(
                "linear_positive needs all entries > 0".into(),
            ));
        }
        let k = ConeSpec::orthant(n)?;
        Ok(MapInstance {
            family: MapFamily::LinearPositive { a },
            cone_in: k.clone(),
            cone_out: k,
            declared: MonotonicityClass::StrictlyMonotone,
        })
    }

    pub fn linear_nonnegative(a: DMatrix<f64>) -> Result<Self> {
        let n = square(&a, "A")?;
        if a.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidMap(
                "linear_nonnegative needs all entries >= 0".into(),
            ));
        }
        let k = ConeSpec::orthant(n)?;
        Ok(MapInstance {
            declared: pattern_class(&a),
            family: MapFamily::LinearNonnegative { a },
            cone_in: k.clone(),
            cone_out: k,
        })
    }

    pub fn power_mean(c: DMatrix<f64>, p: f64) -> Result<Self> {
        let n = square(&c, "C")?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidMap(format!(
                "power_mean exponent {p} not in (0, 1]"
            )));
        }
        if c.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidMap("power_mean needs C >= 0".into()));
        }
        let k = ConeSpec::orthant(n)?;
        Ok(MapInstance {
            declared: pattern_class(&c),
            family: MapFamily::PowerMean { c, p },
            cone_in: k.clone(),
            cone_out: k,
        })
    }

    pub fn leontief_min(a: DMatrix<f64>) -> Result<Self> {
        let n = square(&a, "A")?;
        if a.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidMap(
                "leontief_min needs all entries > 0".into(),
            ));
        }
        let k = ConeSpec::orthant(n)?;
        Ok(MapInstance {
            family: MapFamily::LeontiefMin { a },
            cone_in: k.clone(),
            cone_out: k,
            declared: if n == 1 {
                MonotonicityClass::StrictlyMonotone
            } else {
                MonotonicityClass::Monotone
            },
        })
    }

    /// `x -> G_out P G_in^-1 x` from `G_in R^n_+` to `G_out R^n_+`, with `P >= 0`.
    pub fn simplicial_conjugated(
        p: DMatrix<f64>,
        g_in: DMatrix<f64>,
        g_out: DMatrix<f64>,
    ) -> Result<Self> {
        let n = square(&p, "P")?;
        if g_in.shape() != (n, n) || g_out.shape() != (n, n) {
            return Err(Error::InvalidMap("generator matrices must match P".into()));
        }
        if p.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidMap(
                "simplicial_conjugated needs P >= 0".into(),
            ));
        }
        let cone_in = ConeSpec::simplicial(g_in.clone())?;
        let cone_out = ConeSpec::simplicial(g_out.clone())?;
        let ambient = &g_out * &p * cone_in.facets();
        Ok(MapInstance {
            declared: pattern_class(&p),
            family: MapFamily::SimplicialConjugated {
                p,
                g_in,
                g_out,
                ambient,
            },
            cone_in,
            cone_out,
        })
    }

    pub fn affine_offset(a: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        let n = square(&a, "A")?;
        if offset.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: offset.len(),
            });
        }
        if a.iter().chain(offset.iter()).any(|&v| v < 0.0) {
            return Err(Error::InvalidMap(
                "affine_offset needs A >= 0 and b >= 0".into(),
            ));
        }
        let k = ConeSpec::orthant(n)?;
        Ok(MapInstance {
            family: MapFamily::AffineOffset { a, offset },
            cone_in: k.clone(),
            cone_out: k,
            declared: MonotonicityClass::Monotone,
        })
    }

    pub fn with_declared_class(mut self, class: MonotonicityClass) -> Self {
        self.declared = class;
        self
    }

    pub fn family(&self) -> &MapFamily {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            MapFamily::LinearPositive { .. } => "linear_positive",
            MapFamily::LinearNonnegative { .. } => "linear_nonnegative",
            MapFamily::PowerMean { .. } => "power_mean",
            MapFamily::LeontiefMin { .. } => "leontief_min",
            MapFamily::SimplicialConjugated { .. } => "simplicial_conjugated",
            MapFamily::AffineOffset { .. } => "affine_offset",
        }
    }

    pub fn cone_in(&self) -> &ConeSpec {
        &self.cone_in
    }

    pub fn cone_out(&self) -> &ConeSpec {
        &self.cone_out
    }

    pub fn declared_class(&self) -> MonotonicityClass {
        self.declared
    }

    pub fn dim(&self) -> usize {
        self.cone_in.dim()
    }

    /// The matrix of a linear family, in ambient coordinates.
    pub fn as_linear(&self) -> Option<&DMatrix<f64>> {
        match &self.family {
            MapFamily::LinearPositive { a } | MapFamily::LinearNonnegative { a } => Some(a),
            MapFamily::SimplicialConjugated { ambient, .. } => Some(ambient),
            _ => None,
        }
    }

    /// Concave families; for these superadditivity holds and M2 is equivalent to M4.
    pub fn is_concave(&self) -> bool {
        !matches!(self.family, MapFamily::AffineOffset { .. })
    }

    /// Evaluate `D(x)` for `x` in the input cone.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if !self.cone_in.contains(x)? {
            return Err(Error::NotInCone);
        }
        Ok(self.eval(x))
    }

    /// Evaluate without the membership check.
    pub(crate) fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.family {
            MapFamily::LinearPositive { a } | MapFamily::LinearNonnegative { a } => a * x,
            MapFamily::SimplicialConjugated { ambient, .. } => ambient * x,
            MapFamily::AffineOffset { a, offset } => a * x + offset,
            MapFamily::PowerMean { c, p } => rescaled(x, |u| power_mean(c, *p, u)),
            MapFamily::LeontiefMin { a } => rescaled(x, |u| leontief(a, u)),
        }
    }

    /// `D(x) / <phi_out, D(x)>`, the map induced on sections.
    pub fn normalized_apply(&self, phi_out: &Functional, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.amax() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let dx = self.apply(x)?;
        let s = phi_out.eval(&dx);
        if !(s > 0.0) {
            return Err(Error::MapAnnihilates {
                witness: x.iter().copied().collect(),
            });
        }
        Ok(dx / s)
    }

    /// Max of `||D(lambda x) - lambda D(x)||_inf / ||lambda D(x)||_inf` over random samples.
    pub fn check_homogeneity(&self, samples: usize, seed: u64) -> Result<HomogeneityReport> {
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = self.cone_in.default_functional();
        let mut worst = 0.0f64;
        let mut witness = None;
        for i in 0..samples {
            let base = if i % 2 == 0 {
                self.cone_in.sample_section_interior(&phi, &mut rng)
            } else {
                self.cone_in.sample_section_face(&phi, &mut rng)
            };
            let x = base * 10f64.powf(rng.random_range(-2.0..2.0));
            let lambda = 10f64.powf(rng.random_range(-3.0..3.0));
            let scaled = self.eval(&x) * lambda;
            let direct = self.eval(&(&x * lambda));
            let denom = scaled.amax().max(f64::MIN_POSITIVE);
            let dev = (&direct - &scaled).amax() / denom;
            if dev > worst {
                worst = dev;
                if dev > HOMOGENEITY_TOL {
                    witness = Some(HomogeneityWitness {
                        lambda,
                        x: x.iter().copied().collect(),
                    });
                }
            }
        }
        Ok(HomogeneityReport {
            passed: worst <= HOMOGENEITY_TOL,
            max_deviation: worst,
            samples,
            witness,
        })
    }

    /// Sample the order implications and conditions M1-M4.
    pub fn classify_monotonicity(&self, samples: usize, seed: u64) -> Result<MonotonicityReport> {
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        let homogeneous = self.check_homogeneity(samples, seed)?.passed;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let phi = self.cone_in.default_functional();
        let out = &self.cone_out;
        let mut report = MonotonicityReport {
            homogeneous,
            monotone: true,
            m1: true,
            m2: true,
            m3: true,
            m4: false,
            sample_count: samples,
            certificate: Certificate::Sampled,
            witness: None,
        };
        let fail = |report: &mut MonotonicityReport,
                    condition: &str,
                    x: &DVector<f64>,
                    y: Option<&DVector<f64>>| {
            if report.witness.is_none() {
                report.witness = Some(Witness {
                    condition: condition.to_string(),
                    x: x.iter().copied().collect(),
                    y: y.map(|v| v.iter().copied().collect()),
                });
            }
        };

        for _ in 0..samples {
            let h_face = self.cone_in.sample_section_face(&phi, &mut rng);
            let h_int = self.cone_in.sample_section_interior(&phi, &mut rng);
            let d_face = self.eval(&h_face);
            let d_int = self.eval(&h_int);

            if !(out.contains(&d_face)? && d_face.amax() > 0.0) {
                report.m1 = false;
                fail(&mut report, "M1", &h_face, None);
            }
            if !out.interior_contains(&d_face)? {
                report.m3 = false;
                fail(&mut report, "M3", &h_face, None);
            }
            if out.interior_contains(&d_int)? {
                report.m4 = true;
            } else {
                report.m2 = false;
                fail(&mut report, "M2", &h_int, None);
            }

            // Ordered pairs x <= y with y - x on a face and in the interior.
            let x = self.cone_in.sample_section_interior(&phi, &mut rng)
                * 10f64.powf(rng.random_range(-0.5..0.5));
            for (h, interior) in [(&h_face, false), (&h_int, true)] {
                let step = 10f64.powf(rng.random_range(-1.0..0.5));
                let y = &x + h * step;
                let (dx, dy) = (self.eval(&x), self.eval(&y));
                let rel = relation(out, &dx, &dy)?;
                if rel == Relation::Violated {
                    report.monotone = false;
                    fail(&mut report, "monotone", &x, Some(&y));
                }
                if interior {
                    if rel != Relation::Strict {
                        report.m2 = false;
                        fail(&mut report, "M2", &x, Some(&y));
                    }
                } else {
                    if rel == Relation::Violated || rel == Relation::Equal {
                        report.m1 = false;
                        fail(&mut report, "M1", &x, Some(&y));
                    }
                    if rel != Relation::Strict {
                        report.m3 = false;
                        fail(&mut report, "M3", &x, Some(&y));
                    }
                }
            }
        }

        if let Some(a) = self.as_linear() {
            self.linear_certificate(a, &mut report)?;
        }
        report.m3 &= report.m1;
        Ok(report)
    }

    /// Exact M1-M4 for a linear map from the images of the extreme rays of `K_in`.
    fn linear_certificate(&self, a: &DMatrix<f64>, report: &mut MonotonicityReport) -> Result<()> {
        let out = &self.cone_out;
        let rays = self.cone_in.extreme_rays();
        let images = a * rays;
        report.certificate = Certificate::Exact;
        report.witness = None;
        report.monotone = true;
        report.m1 = true;
        report.m3 = true;
        for (ray, img) in rays.column_iter().zip(images.column_iter()) {
            let img = img.into_owned();
            let ray = ray.into_owned();
            if !out.contains(&img)? {
                report.monotone = false;
            }
            if !(out.contains(&img)? && img.amax() > 0.0) {
                report.m1 = false;
                report.witness.get_or_insert(Witness {
                    condition: "M1".into(),
                    x: ray.iter().copied().collect(),
                    y: None,
                });
            }
            if !out.interior_contains(&img)? {
                report.m3 = false;
                report.witness.get_or_insert(Witness {
                    condition: "M3".into(),
                    x: ray.iter().copied().collect(),
                    y: None,
                });
            }
        }
        let p = self.cone_in.interior_point();
        report.m2 = out.interior_contains(&(a * &p))?;
        report.m4 = report.m2;
        Ok(())
    }

    /// Check `D(x + y) >= D(x) + D(y)` in the output order on random pairs.
    pub fn check_superadditivity(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<SuperadditivityReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = self.cone_in.default_functional();
        let mut violations = 0;
        let mut witness = None;
        for i in 0..samples {
            let x = if i % 2 == 0 {
                self.cone_in.sample_section_interior(&phi, &mut rng)
            } else {
                self.cone_in.sample_section_face(&phi, &mut rng)
            };
            let y = self.cone_in.sample_section_face(&phi, &mut rng)
                * 10f64.powf(rng.random_range(-1.0..1.0));
            let lhs = self.eval(&(&x + &y));
            let rhs = self.eval(&x) + self.eval(&y);
            if relation(&self.cone_out, &rhs, &lhs)? == Relation::Violated {
                violations += 1;
                witness.get_or_insert((x.iter().copied().collect(), y.iter().copied().collect()));
            }
        }
        Ok(SuperadditivityReport {
            passed: violations == 0,
            violations,
            samples,
            witness,
        })
    }

    /// Non-expansiveness of the induced section map in the Hilbert metric.
    ///
    /// Pairs are drawn from the interior of the input section. For maps declared
    /// strictly monotone, pairs with `d_in > 1e-6` must contract strictly.
    pub fn check_nonexpansive(&self, samples: usize, seed: u64) -> Result<NonexpansiveReport> {
        let ctx_in = MetricContext::with_default_functional(self.cone_in.clone());
        let ctx_out = MetricContext::with_default_functional(self.cone_out.clone());
        let phi_in = ctx_in.functional().clone();
        let phi_out = ctx_out.functional().clone();
        let strict = self.declared == MonotonicityClass::StrictlyMonotone;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = NonexpansiveReport {
            pairs: samples,
            violations: 0,
            strict_checked: 0,
            strict_violations: 0,
            max_excess: f64::NEG_INFINITY,
        };
        for i in 0..samples {
            let x = self.cone_in.sample_section_interior(&phi_in, &mut rng);
            let mut y = self.cone_in.sample_section_interior(&phi_in, &mut rng);
            if i % 4 == 3 {
                let t = 10f64.powf(rng.random_range(-5.0..-1.0));
                y = &x * (1.0 - t) + y * t;
            }
            let d_in = ctx_in.distance(&x, &y)?;
            let gx = self.normalized_apply(&phi_out, &x)?;
            let gy = self.normalized_apply(&phi_out, &y)?;
            let d_out = ctx_out.distance(&gx, &gy)?;
            let excess = d_out - d_in;
            report.max_excess = report.max_excess.max(excess);
            if excess > 1e-10 {
                report.violations += 1;
            }
            if strict && d_in > 1e-6 {
                report.strict_checked += 1;
                if d_out >= d_in {
                    report.strict_violations += 1;
                }
            }
        }
        Ok(report)
    }
}

fn rescaled(x: &DVector<f64>, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> DVector<f64> {
    let s = x.amax();
    if s == 0.0 {
        return DVector::zeros(x.len());
    }
    let u = x.map(|v| (v / s).max(0.0));
    f(&u) * s
}

fn power_mean(c: &DMatrix<f64>, p: f64, x: &DVector<f64>) -> DVector<f64> {
    let xp = x.map(|v| v.powf(p));
    (c * xp).map(|v| v.powf(1.0 / p))
}

fn leontief(a: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(a.nrows(), |i, _| {
        a.row(i)
            .iter()
            .zip(x.iter())
            .map(|(aij, xj)| xj / aij)
            .fold(f64::INFINITY, f64::min)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Relation {
    Violated,
    Equal,
    Boundary,
    Strict,
}

/// Relation of `a` to `b` in the cone order with slack relative to `max(|a|, |b|)`.
fn relation(cone: &ConeSpec, a: &DVector<f64>, b: &DVector<f64>) -> Result<Relation> {
    let scale = a.amax().max(b.amax());
    let slack = ORDER_SLACK * scale;
    let diff = b - a;
    if diff.amax() <= slack {
        return Ok(Relation::Equal);
    }
    let fd = cone.facets() * &diff;
    let fscale = slack * cone.facets().amax();
    if fd.iter().any(|&v| v < -fscale) {
        Ok(Relation::Violated)
    } else if fd.iter().all(|&v| v > fscale) {
        Ok(Relation::Strict)
    } else {
        Ok(Relation::Boundary)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityWitness {
    pub lambda: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub passed: bool,
    pub max_deviation: f64,
    pub samples: usize,
    pub witness: Option<HomogeneityWitness>,
}

/// Counterexample to a sampled condition; `y` is set for pair conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: String,
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub homogeneous: bool,
    pub monotone: bool,
    /// `D(h) > 0` (nonzero, in the cone) for every nonzero `h` in the cone.
    pub m1: bool,
    /// `D(h)` interior for every interior `h`.
    pub m2: bool,
    /// `D(h)` interior for every nonzero `h` in the cone.
    pub m3: bool,
    /// `D(h)` interior for some `h` in the cone.
    pub m4: bool,
    pub sample_count: usize,
    pub certificate: Certificate,
    pub witness: Option<Witness>,
}

impl MonotonicityReport {
    pub fn completely_monotone(&self) -> bool {
        self.monotone && self.m1 && self.m2
    }

    pub fn strictly_monotone(&self) -> bool {
        self.monotone && self.m3
    }

    /// Strongest class consistent with the report, if any.
    pub fn class(&self) -> Option<MonotonicityClass> {
        if self.strictly_monotone() {
            Some(MonotonicityClass::StrictlyMonotone)
        } else if self.completely_monotone() {
            Some(MonotonicityClass::CompletelyMonotone)
        } else if self.monotone {
            Some(MonotonicityClass::Monotone)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperadditivityReport {
    pub passed: bool,
    pub violations: usize,
    pub samples: usize,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonexpansiveReport {
    pub pairs: usize,
    /// Pairs with `d_out > d_in + 1e-10`.
    pub violations: usize,
    pub strict_checked: usize,
    /// Pairs with `d_in > 1e-6` and `d_out >= d_in` for strictly monotone maps.
    pub strict_violations: usize,
    /// Largest `d_out - d_in` seen.
    pub max_excess: f64,
}

impl NonexpansiveReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.strict_violations == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn apply_examples() {
        let m = MapInstance::linear_positive(dmatrix![1.0, 1.0; 1.0, 1.0]).unwrap();
        assert_eq!(m.apply(&dvector![1.0, 1.0]).unwrap(), dvector![2.0, 2.0]);

        let m = MapInstance::power_mean(DMatrix::identity(2, 2), 0.5).unwrap();
        let y = m.apply(&dvector![4.0, 9.0]).unwrap();
        assert_relative_eq!(y[0], 4.0, max_relative = 1e-15);
        assert_relative_eq!(y[1], 9.0, max_relative = 1e-15);

        let m = MapInstance::leontief_min(dmatrix![1.0, 2.0; 2.0, 1.0]).unwrap();
        assert_eq!(m.apply(&dvector![2.0, 2.0]).unwrap(), dvector![1.0, 1.0]);

        assert!(matches!(
            m.apply(&dvector![1.0, -1.0]),
            Err(Error::NotInCone)
        ));
    }

    #[test]
    fn normalized_apply_examples() {
        let phi = Functional::new(dvector![1.0, 1.0]);
        let id = MapInstance::linear_nonnegative(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(
            id.normalized_apply(&phi, &dvector![0.25, 0.75]).unwrap(),
            dvector![0.25, 0.75]
        );

        let m = MapInstance::linear_positive(dmatrix![2.0, 1.0; 1.0, 2.0]).unwrap();
        let g = m.normalized_apply(&phi, &dvector![1.0, 0.0]).unwrap();
        assert_relative_eq!(g[0], 2.0 / 3.0);
        assert_relative_eq!(g[1], 1.0 / 3.0);

        let m = MapInstance::linear_nonnegative(dmatrix![1.0, 0.0; 1.0, 0.0]).unwrap();
        assert!(matches!(
            m.normalized_apply(&phi, &dvector![0.0, 1.0]),
            Err(Error::MapAnnihilates { .. })
        ));
        assert!(matches!(
            m.normalized_apply(&phi, &dvector![0.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn invalid_maps_are_rejected() {
        assert!(MapInstance::linear_positive(dmatrix![1.0, 0.0; 1.0, 1.0]).is_err());
        assert!(MapInstance::linear_nonnegative(dmatrix![1.0, -1.0; 1.0, 1.0]).is_err());
        assert!(MapInstance::power_mean(DMatrix::identity(2, 2), 1.5).is_err());
        assert!(MapInstance::power_mean(DMatrix::identity(2, 2), 0.0).is_err());
        assert!(MapInstance::leontief_min(dmatrix![1.0, 0.0; 1.0, 1.0]).is_err());
        assert!(MapInstance::linear_positive(DMatrix::from_element(2, 3, 1.0)).is_err());
    }

    #[test]
    fn homogeneity_checks() {
        let lin = MapInstance::linear_positive(dmatrix![1.0, 2.0; 3.0, 4.0]).unwrap();
        let r = lin.check_homogeneity(200, 1).unwrap();
        assert!(r.passed, "{r:?}");

        let pm = MapInstance::power_mean(dmatrix![0.5, 2.0; 1.0, 0.7], 0.3).unwrap();
        assert!(pm.check_homogeneity(200, 2).unwrap().passed);

        let broken =
            MapInstance::affine_offset(DMatrix::identity(2, 2), dvector![1.0, 1.0]).unwrap();
        let r = broken.check_homogeneity(50, 3).unwrap();
        assert!(!r.passed);
        assert!(r.witness.is_some());
    }

    #[test]
    fn classify_positive_matrix() {
        let m = MapInstance::linear_positive(dmatrix![1.0, 2.0; 0.5, 1.5]).unwrap();
        let r = m.classify_monotonicity(200, 7).unwrap();
        assert!(r.monotone && r.m1 && r.m2 && r.m3 && r.m4, "{r:?}");
        assert_eq!(r.class(), Some(MonotonicityClass::StrictlyMonotone));
        assert_eq!(r.certificate, Certificate::Exact);
    }

    #[test]
    fn classify_identity() {
        let m = MapInstance::linear_nonnegative(DMatrix::identity(3, 3)).unwrap();
        let r = m.classify_monotonicity(200, 7).unwrap();
        assert!(r.monotone && r.m1 && r.m2 && !r.m3, "{r:?}");
        assert_eq!(r.class(), Some(MonotonicityClass::CompletelyMonotone));
        let w = r.witness.unwrap();
        assert_eq!(w.condition, "M3");
        let h = DVector::from_vec(w.x);
        assert!(!m.cone_in().interior_contains(&h).unwrap());
    }

    #[test]
    fn classify_primitive_pattern() {
        let m = MapInstance::linear_nonnegative(dmatrix![0.0, 1.0; 1.0, 1.0]).unwrap();
        let r = m.classify_monotonicity(100, 1).unwrap();
        assert!(r.m1 && !r.m3);
        assert_eq!(m.apply(&dvector![1.0, 0.0]).unwrap(), dvector![0.0, 1.0]);
    }

    #[test]
    fn classify_nonlinear_families_by_sampling() {
        let pm = MapInstance::power_mean(dmatrix![1.0, 0.5; 0.2, 2.0], 0.5).unwrap();
        let r = pm.classify_monotonicity(500, 11).unwrap();
        assert_eq!(r.certificate, Certificate::Sampled);
        assert!(
            r.homogeneous && r.monotone && r.m1 && r.m2 && r.m3 && r.m4,
            "{r:?}"
        );

        // A Leontief minimum kills every coordinate axis, so M1 fails.
        let lm = MapInstance::leontief_min(dmatrix![1.0, 0.5; 0.2, 2.0]).unwrap();
        let r = lm.classify_monotonicity(500, 11).unwrap();
        assert!(r.monotone && r.m2 && r.m4 && !r.m1 && !r.m3, "{r:?}");

        // Identity power mean preserves the boundary.
        let pm = MapInstance::power_mean(DMatrix::identity(2, 2), 0.5).unwrap();
        let r = pm.classify_monotonicity(500, 11).unwrap();
        assert!(r.m1 && r.m2 && !r.m3, "{r:?}");
    }

    #[test]
    fn broken_map_is_flagged_non_homogeneous() {
        let broken =
            MapInstance::affine_offset(DMatrix::identity(2, 2), dvector![1.0, 1.0]).unwrap();
        let r = broken.classify_monotonicity(50, 0).unwrap();
        assert!(!r.homogeneous);
    }

    #[test]
    fn superadditivity_of_concave_families() {
        let maps = [
            MapInstance::linear_positive(dmatrix![1.0, 2.0; 3.0, 4.0]).unwrap(),
            MapInstance::power_mean(dmatrix![1.0, 2.0; 0.5, 4.0], 0.5).unwrap(),
            MapInstance::leontief_min(dmatrix![1.0, 2.0; 0.5, 4.0]).unwrap(),
        ];
        for m in &maps {
            let r = m.check_superadditivity(1000, 5).unwrap();
            assert!(r.passed, "{}: {r:?}", m.family_name());
        }
    }

    #[test]
    fn conjugated_map_matches_coordinates() {
        let g_in = dmatrix![1.0, 0.2; 0.1, 1.0];
        let g_out = dmatrix![1.0, 0.0; 0.3, 1.2];
        let p = dmatrix![1.0, 2.0; 0.5, 1.0];
        let m = MapInstance::simplicial_conjugated(p.clone(), g_in.clone(), g_out.clone()).unwrap();
        let x = dvector![0.7, 0.4];
        let direct = &g_out * (&p * g_in.clone().try_inverse().unwrap() * &x);
        let y = m.apply(&x).unwrap();
        assert!((&y - &direct).amax() <= 1e-12 * direct.amax());
        for g in g_in.column_iter() {
            assert!(m
                .cone_out()
                .interior_contains(&m.apply(&g.into_owned()).unwrap())
                .unwrap());
        }
        let r = m.classify_monotonicity(100, 2).unwrap();
        assert!(r.m3 && r.certificate == Certificate::Exact);
    }

    #[test]
    fn nonexpansive_positive_matrix_contracts() {
        let m = MapInstance::linear_positive(dmatrix![1.0, 2.0, 0.3; 3.0, 4.0, 1.0; 0.2, 0.2, 5.0])
            .unwrap();
        let r = m.check_nonexpansive(2000, 9).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.strict_checked > 0);
    }

    #[test]
    fn config_round_trip() {
        let cfg: MapConfig =
            toml::from_str("family = \"power_mean\"\nC = [[1.0, 2.0], [0.5, 1.0]]\np = 0.5\n")
                .unwrap();
        let m = cfg.build().unwrap();
        assert_eq!(m.family_name(), "power_mean");
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"family\":\"power_mean\""));
        let back: MapConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }
}
