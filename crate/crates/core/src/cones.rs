//! Solid polyhedral cones and the orders they induce.
//!
//! Every cone is stored in facet form `K = {x : F x >= 0}` where the rows of
//! `F` are inward facet normals. The orthant uses `F = I` and a simplicial cone
//! `G * R^n_+` uses `F = G^-1`. Extreme rays are enumerated once at
//! construction, so the cone can hand out generators, an interior point and
//! the vertices of any normalizing section.
//!
//! Membership is decided with a relative tolerance: `x` is in `K` when
//! `F x >= -tol * |x|_inf` and in the interior when `F x > tol * |x|_inf`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-12;

/// Upper bound on the number of facet subsets visited while enumerating rays.
const MAX_RAY_SUBSETS: usize = 2_000_000;

/// Simplicial generators with a worse condition number are rejected.
const MAX_CONDITION: f64 = 1e12;

/// Serialized cone description, e.g. `{type = "orthant", n = 4}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConeConfig {
    Orthant {
        n: usize,
    },
    Polyhedral {
        #[serde(rename = "F")]
        f: Vec<Vec<f64>>,
    },
    Simplicial {
        #[serde(rename = "G")]
        g: Vec<Vec<f64>>,
    },
}

impl ConeConfig {
    pub fn build(&self) -> Result<ConeSpec> {
        match self {
            ConeConfig::Orthant { n } => ConeSpec::orthant(*n),
            ConeConfig::Polyhedral { f } => ConeSpec::polyhedral(matrix_from_rows(f)?),
            ConeConfig::Simplicial { g } => ConeSpec::simplicial(matrix_from_rows(g)?),
        }
    }
}

/// Build a dense matrix from row vectors, rejecting ragged or empty input.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::InvalidArgument("matrix has no rows".into()));
    }
    let c = rows[0].len();
    if c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::InvalidArgument(
            "matrix rows are empty or ragged".into(),
        ));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Orthant,
    Polyhedral,
    Simplicial,
}

/// Result of comparing two vectors in the order of a cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Incomparable,
    Equal,
    /// `x <= y`, `x != y`, but `y - x` lies on the boundary.
    LeqBoundary,
    /// `y - x` lies in the interior.
    LtInterior,
}

/// A linear functional `<phi, .>` on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional(DVector<f64>);

impl Functional {
    pub fn new(coefficients: DVector<f64>) -> Self {
        Functional(coefficients)
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        self.0.dot(x)
    }
}

/// A solid, pointed polyhedral cone in `R^n`.
#[derive(Clone, Debug)]
pub struct ConeSpec {
    representation: Representation,
    facets: DMatrix<f64>,
    rays: DMatrix<f64>,
    generators: Option<DMatrix<f64>>,
    condition_number: f64,
    tol: f64,
}

impl PartialEq for ConeSpec {
    fn eq(&self, other: &Self) -> bool {
        self.representation == other.representation
            && self.facets == other.facets
            && self.tol == other.tol
    }
}

impl ConeSpec {
    pub fn orthant(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateCone("dimension must be positive".into()));
        }
        let id = DMatrix::identity(n, n);
        Ok(ConeSpec {
            representation: Representation::Orthant,
            facets: id.clone(),
            rays: id.clone(),
            generators: Some(id),
            condition_number: 1.0,
            tol: DEFAULT_MEMBERSHIP_TOL,
        })
    }

    /// Cone `G * R^n_+` spanned by the columns of an invertible `G`.
    pub fn simplicial(g: DMatrix<f64>) -> Result<Self> {
        if !g.is_square() || g.nrows() == 0 {
            return Err(Error::DegenerateCone(
                "generator matrix must be square".into(),
            ));
        }
        let sv = g.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        if !(smin > 0.0) || smax / smin > MAX_CONDITION {
            return Err(Error::DegenerateCone(format!(
                "generator matrix is singular or ill-conditioned (sigma_min = {smin:e})"
            )));
        }
        let facets = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateCone("generator matrix is singular".into()))?;
        Ok(ConeSpec {
            representation: Representation::Simplicial,
            facets,
            rays: g.clone(),
            generators: Some(g),
            condition_number: smax / smin,
            tol: DEFAULT_MEMBERSHIP_TOL,
        })
    }

    /// Cone `{x : F x >= 0}`; `F` must have rank `n` and a strictly feasible point.
    pub fn polyhedral(f: DMatrix<f64>) -> Result<Self> {
        let n = f.ncols();
        if n == 0 || f.nrows() < n {
            return Err(Error::DegenerateCone(format!(
                "need at least n = {n} facet rows, got {}",
                f.nrows()
            )));
        }
        if numerical_rank(&f) < n {
            return Err(Error::DegenerateCone(
                "facet matrix is rank deficient".into(),
            ));
        }
        let rays = enumerate_extreme_rays(&f)?;
        if rays.ncols() < n || numerical_rank(&rays) < n {
            return Err(Error::DegenerateCone("cone has empty interior".into()));
        }
        let cone = ConeSpec {
            representation: Representation::Polyhedral,
            condition_number: condition_number(&f),
            facets: f,
            rays,
            generators: None,
            tol: DEFAULT_MEMBERSHIP_TOL,
        };
        let p = cone.interior_point();
        let fp = &cone.facets * &p;
        if fp.iter().any(|&v| v <= cone.tol * p.amax()) {
            return Err(Error::DegenerateCone("cone has empty interior".into()));
        }
        Ok(cone)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.facets.ncols()
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    /// Rows are inward facet normals.
    pub fn facets(&self) -> &DMatrix<f64> {
        &self.facets
    }

    /// Extreme rays as columns, each scaled to unit sup-norm for polyhedral cones.
    pub fn extreme_rays(&self) -> &DMatrix<f64> {
        &self.rays
    }

    /// Generator matrix for the orthant and simplicial cones.
    pub fn generators(&self) -> Option<&DMatrix<f64>> {
        self.generators.as_ref()
    }

    /// `sigma_max / sigma_min` of the generators (simplicial) or facets (polyhedral).
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// Sum of the extreme rays; interior for any solid pointed cone.
    pub fn interior_point(&self) -> DVector<f64> {
        self.rays.column_sum()
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &DVector<f64>) -> Result<bool> {
        self.check_dim(x)?;
        let slack = self.tol * x.amax();
        Ok((&self.facets * x).iter().all(|&v| v >= -slack))
    }

    pub fn interior_contains(&self, x: &DVector<f64>) -> Result<bool> {
        self.check_dim(x)?;
        let slack = self.tol * x.amax();
        Ok((&self.facets * x).iter().all(|&v| v > slack))
    }

    pub fn order_classify(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<Order> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let diff = y - x;
        if diff.amax() <= self.tol * x.amax().max(y.amax()) {
            return Ok(Order::Equal);
        }
        if self.interior_contains(&diff)? {
            Ok(Order::LtInterior)
        } else if self.contains(&diff)? {
            Ok(Order::LeqBoundary)
        } else {
            Ok(Order::Incomparable)
        }
    }

    /// `F^T 1`, the sum of the facet normals.
    ///
    /// Strictly positive on `K \ {0}` because `F` has full column rank.
    pub fn default_functional(&self) -> Functional {
        let ones = DVector::from_element(self.facets.nrows(), 1.0);
        Functional(self.facets.transpose() * ones)
    }

    /// Fails unless `phi` is strictly positive on every extreme ray.
    pub fn check_functional(&self, phi: &Functional) -> Result<()> {
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: phi.dim(),
            });
        }
        for (j, ray) in self.rays.column_iter().enumerate() {
            let v = phi.coefficients().dot(&ray);
            if !(v > 0.0) {
                return Err(Error::FunctionalNotInterior(format!(
                    "<phi, ray {j}> = {v:e}"
                )));
            }
        }
        Ok(())
    }

    /// Project `x in K \ {0}` onto the section `{<phi, x> = 1}`.
    pub fn section_normalize(&self, phi: &Functional, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        if !self.contains(x)? {
            return Err(Error::NotInCone);
        }
        let s = phi.eval(x);
        if !(s > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(x / s)
    }

    /// Vertices of the section: extreme rays scaled onto `{<phi, x> = 1}`.
    pub fn section_vertices(&self, phi: &Functional) -> Vec<DVector<f64>> {
        self.rays
            .column_iter()
            .map(|r| {
                let r = r.into_owned();
                let s = phi.eval(&r);
                r / s
            })
            .collect()
    }

    /// Sup-norm bound on the section; attained at a vertex since the section is a polytope.
    pub fn section_bound(&self, phi: &Functional) -> f64 {
        self.section_vertices(phi)
            .iter()
            .map(|v| v.amax())
            .fold(0.0, f64::max)
    }

    /// Barycenter of the section vertices, an interior point of the section.
    pub fn section_centroid(&self, phi: &Functional) -> DVector<f64> {
        let verts = self.section_vertices(phi);
        let n = verts.len() as f64;
        let sum = verts
            .iter()
            .fold(DVector::zeros(self.dim()), |acc, v| acc + v);
        let c = sum / n;
        let s = phi.eval(&c);
        c / s
    }

    /// Random interior point of the section (random positive weights on all vertices).
    pub fn sample_section_interior<R: Rng + ?Sized>(
        &self,
        phi: &Functional,
        rng: &mut R,
    ) -> DVector<f64> {
        let verts = self.section_vertices(phi);
        let weights: Vec<f64> = verts.iter().map(|_| exponential(rng)).collect();
        let total: f64 = weights.iter().sum();
        verts
            .iter()
            .zip(&weights)
            .fold(DVector::zeros(self.dim()), |acc, (v, w)| {
                acc + v * (w / total)
            })
    }

    /// Random point on the section supported on a random nonempty subset of vertices.
    ///
    /// Proper subsets land on the boundary of simplicial cones, so this probes faces.
    pub fn sample_section_face<R: Rng + ?Sized>(
        &self,
        phi: &Functional,
        rng: &mut R,
    ) -> DVector<f64> {
        let verts = self.section_vertices(phi);
        let q = verts.len();
        let k = rng.random_range(1..=q);
        let mut idx: Vec<usize> = (0..q).collect();
        for i in 0..k {
            let j = rng.random_range(i..q);
            idx.swap(i, j);
        }
        let weights: Vec<f64> = (0..k).map(|_| exponential(rng)).collect();
        let total: f64 = weights.iter().sum();
        idx[..k]
            .iter()
            .zip(&weights)
            .fold(DVector::zeros(self.dim()), |acc, (&i, w)| {
                acc + &verts[i] * (w / total)
            })
    }
}

/// Standard exponential variate; normalized exponentials give uniform simplex weights.
pub(crate) fn exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-12 * smax).count()
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    sv.max() / sv.min()
}

/// Enumerate extreme rays of `{x : F x >= 0}` (pointed, rank `n`).
///
/// Every extreme ray is the one-dimensional intersection of `n - 1` linearly
/// independent tight facets. The candidate direction is the generalized cross
/// product of those rows, kept if it (or its negation) satisfies all facets.
fn enumerate_extreme_rays(f: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (r, n) = f.shape();
    if n == 1 {
        let pos = f.iter().all(|&v| v >= 0.0);
        let neg = f.iter().all(|&v| v <= 0.0);
        return match (pos, neg) {
            (true, _) => Ok(DMatrix::from_element(1, 1, 1.0)),
            (_, true) => Ok(DMatrix::from_element(1, 1, -1.0)),
            _ => Err(Error::DegenerateCone("cone is {0}".into())),
        };
    }
    if binomial(r, n - 1) > MAX_RAY_SUBSETS {
        return Err(Error::DegenerateCone(format!(
            "too many facets ({r}) for ray enumeration in dimension {n}"
        )));
    }
    let scale = f.amax();
    let mut rays: Vec<DVector<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..n - 1).collect();
    loop {
        let rows = DMatrix::from_fn(n - 1, n, |i, j| f[(subset[i], j)]);
        if let Some(v) = cross_product(&rows) {
            let fv = f * &v;
            let tight = 1e-9 * scale;
            let candidate = if fv.iter().all(|&s| s >= -tight) {
                Some(v)
            } else if fv.iter().all(|&s| s <= tight) {
                Some(-v)
            } else {
                None
            };
            if let Some(ray) = candidate {
                if !rays.iter().any(|q| (q - &ray).amax() <= 1e-9) {
                    rays.push(ray);
                }
            }
        }
        if !next_subset(&mut subset, r) {
            break;
        }
    }
    if rays.is_empty() {
        return Err(Error::DegenerateCone("cone has no extreme rays".into()));
    }
    Ok(DMatrix::from_columns(&rays))
}

/// Null vector of an `(n-1) x n` matrix via signed maximal minors, scaled to unit sup-norm.
fn cross_product(rows: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = rows.ncols();
    let mut v = DVector::zeros(n);
    for j in 0..n {
        let minor = rows.clone().remove_column(j);
        let det = minor.determinant();
        v[j] = if j % 2 == 0 { det } else { -det };
    }
    let norm = v.amax();
    let row_scale = rows.amax().powi(n as i32 - 1);
    if !(norm > 1e-12 * row_scale) {
        return None;
    }
    Some(v / norm)
}

fn next_subset(subset: &mut [usize], r: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < r - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}
