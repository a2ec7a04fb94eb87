//! Hilbert projective metric on the normalized interior of a cone.
//!
//! For a polyhedral cone with facet matrix `F` and interior `y`, the ratio
//! functionals have closed forms over the facet values:
//!
//! ```text
//! M(x/y) = max_i (Fx)_i / (Fy)_i      m(x/y) = min_i (Fx)_i / (Fy)_i
//! d(x, y) = log M(x/y) - log m(x/y)
//! ```
//!
//! Points on the boundary are at infinite distance from everything, and
//! [`MetricContext::distance`] reports that as `f64::INFINITY` instead of an
//! error. Points outside the cone are errors.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cones::{ConeSpec, Functional};
use crate::{Error, Result};

/// A cone paired with a strictly positive functional defining its section.
#[derive(Clone, Debug)]
pub struct MetricContext {
    cone: ConeSpec,
    phi: Functional,
}

impl MetricContext {
    pub fn new(cone: ConeSpec, phi: Functional) -> Result<Self> {
        cone.check_functional(&phi)?;
        Ok(MetricContext { cone, phi })
    }

    pub fn with_default_functional(cone: ConeSpec) -> Self {
        let phi = cone.default_functional();
        MetricContext { cone, phi }
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn functional(&self) -> &Functional {
        &self.phi
    }

    /// Facet values of `x` (clamped at zero) and `y`, after membership checks.
    fn facet_values(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        if !self.cone.contains(x)? {
            return Err(Error::NotInCone);
        }
        if !self.cone.interior_contains(y)? {
            return Err(Error::NotInInterior);
        }
        let f = self.cone.facets();
        let a = (f * x).map(|v| v.max(0.0));
        Ok((a, f * y))
    }

    /// `M(x/y) = inf {beta > 0 : x <= beta y}`.
    pub fn upper_ratio(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let (a, b) = self.facet_values(x, y)?;
        Ok(a.iter()
            .zip(b.iter())
            .map(|(ai, bi)| ai / bi)
            .fold(0.0, f64::max))
    }

    /// `m(x/y) = sup {alpha > 0 : alpha y <= x}`.
    pub fn lower_ratio(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let (a, b) = self.facet_values(x, y)?;
        Ok(a.iter()
            .zip(b.iter())
            .map(|(ai, bi)| ai / bi)
            .fold(f64::INFINITY, f64::min))
    }

    /// Hilbert distance; `+inf` when either point is on the boundary.
    ///
    /// Computed as `max_i u_i - min_i u_i` with `u_i = ln (Fx)_i - ln (Fy)_i`,
    /// which is exactly symmetric and nonnegative in floating point.
    pub fn distance(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        if !self.cone.contains(x)? || !self.cone.contains(y)? {
            return Err(Error::NotInCone);
        }
        if !self.cone.interior_contains(x)? || !self.cone.interior_contains(y)? {
            return Ok(f64::INFINITY);
        }
        let f = self.cone.facets();
        let a = f * x;
        let b = f * y;
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for (ai, bi) in a.iter().zip(b.iter()) {
            let u = ai.ln() - bi.ln();
            hi = hi.max(u);
            lo = lo.min(u);
        }
        Ok(hi - lo)
    }

    /// Largest pairwise distance among `points`.
    pub fn diameter(&self, points: &[DVector<f64>]) -> Result<f64> {
        let mut diam: f64 = 0.0;
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                diam = diam.max(self.distance(p, q)?);
            }
        }
        Ok(diam)
    }

    /// `max ||x - y||_inf / (e^d(x,y) - 1)` over the given pairs; pairs at distance 0 are skipped.
    pub fn norm_comparison_from_pairs(
        &self,
        pairs: &[(DVector<f64>, DVector<f64>)],
    ) -> Result<f64> {
        let mut best: Option<f64> = None;
        for (x, y) in pairs {
            let d = self.distance(x, y)?;
            if d == 0.0 || !d.is_finite() {
                continue;
            }
            let ratio = (x - y).amax() / d.exp_m1();
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
        best.ok_or_else(|| Error::NoAdmissibleSample("every pair is at distance zero".into()))
    }

    /// Monte-Carlo estimate of the constant `M` in `||x - y|| <= M (e^d(x,y) - 1)` on the section.
    ///
    /// Half of the pairs are independent interior points, the other half are
    /// small perturbations of a random point; the supremum is usually
    /// approached by nearby pairs.
    pub fn norm_comparison_estimate(&self, sample_count: usize, seed: u64) -> Result<f64> {
        if sample_count < 2 {
            return Err(Error::InvalidArgument(
                "sample_count must be at least 2".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<_> = (0..sample_count)
            .map(|i| {
                let x = self.cone.sample_section_interior(&self.phi, &mut rng);
                let z = self.cone.sample_section_interior(&self.phi, &mut rng);
                if i % 2 == 0 {
                    (x, z)
                } else {
                    let delta = 10f64.powf(rng.random_range(-6.0..-1.0));
                    let y = &x + &z * delta;
                    let s = self.phi.eval(&y);
                    (x, y / s)
                }
            })
            .collect();
        self.norm_comparison_from_pairs(&pairs)
    }
}

/// `log [max_i (x_i / y_i) * max_j (y_j / x_j)]` for strictly positive vectors.
pub fn orthant_distance_closed_form(x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.iter().chain(y.iter()).any(|&v| !(v > 0.0)) {
        return Err(Error::NotInInterior);
    }
    let forward = x
        .iter()
        .zip(y.iter())
        .map(|(a, b)| a / b)
        .fold(f64::NEG_INFINITY, f64::max);
    let backward = y
        .iter()
        .zip(x.iter())
        .map(|(a, b)| a / b)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((forward * backward).ln())
}
