//! Reference computations that share no code path with the library under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randeig::cones::ConeSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(lo..=hi))
}

/// Exact membership `F v >= 0` with no tolerance.
fn member(f: &DMatrix<f64>, v: &DVector<f64>) -> bool {
    (f * v).iter().all(|&c| c >= 0.0)
}

/// `inf {beta : beta y - x in K}` by bisection on `log beta` over `[1e-16, 1e16]`.
pub fn bisect_upper(f: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let (mut lo, mut hi) = (-16f64 * 10f64.ln(), 16f64 * 10f64.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if member(f, &(y * mid.exp() - x)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.exp()
}

/// `sup {alpha : x - alpha y in K}` by bisection on `log alpha`.
pub fn bisect_lower(f: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let (mut lo, mut hi) = (-16f64 * 10f64.ln(), 16f64 * 10f64.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if member(f, &(x - y * mid.exp())) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

/// Hilbert distance from the order definition alone.
pub fn bisection_distance(cone: &ConeSpec, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let f = cone.facets();
    (bisect_upper(f, x, y) / bisect_lower(f, x, y)).ln()
}

/// Spectral radius and Perron vector (entries summing to one) of a positive matrix.
///
/// The eigenvalue comes from the Schur form; the vector spans the numerical
/// kernel of `A - lambda I`, read off the SVD.
pub fn perron_pair(a: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let n = a.nrows();
    let lambda = a
        .clone()
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-9)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted = a - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let (k, _) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) },
            );
    let v: DVector<f64> = v_t.row(k).transpose();
    let v = &v / v.sum();
    (lambda, v)
}

/// Largest pairwise Hilbert distance among images of many random section points.
pub fn dense_image_diameter(
    cone_in: &ConeSpec,
    cone_out: &ConeSpec,
    map: impl Fn(&DVector<f64>) -> DVector<f64>,
    samples: usize,
    seed: u64,
) -> f64 {
    let mut r = rng(seed);
    let phi = cone_in.default_functional();
    let mut pts: Vec<DVector<f64>> = (0..samples)
        .map(|_| {
            if r.random_bool(0.5) {
                cone_in.sample_section_face(&phi, &mut r)
            } else {
                cone_in.sample_section_interior(&phi, &mut r)
            }
        })
        .collect();
    pts.extend(cone_in.section_vertices(&phi));
    let imgs: Vec<_> = pts.iter().map(&map).collect();
    let f = cone_out.facets();
    let mut best: f64 = 0.0;
    for (i, p) in imgs.iter().enumerate() {
        for q in &imgs[i + 1..] {
            let fp = f * p;
            let fq = f * q;
            let ratios = fp.component_div(&fq);
            best = best.max(ratios.max().ln() - ratios.min().ln());
        }
    }
    best
}

/// Random polyhedral cone inside the orthant: the `n` coordinate facets plus `extra`
/// rows with mixed signs and positive row sums.
pub fn random_polyhedral(rng: &mut impl Rng, n: usize, extra: usize) -> ConeSpec {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for _ in 0..extra {
            let row: Vec<f64> = (0..n).map(|_| rng.random_range(-0.3..1.0)).collect();
            if row.iter().sum::<f64>() > 0.2 {
                rows.push(row);
            }
        }
        let f = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        if let Ok(c) = ConeSpec::polyhedral(f) {
            return c;
        }
    }
}

/// Random simplicial cone `G R^n_+` with `G = I + eps U`, `U` uniform in `[0, 1]`.
pub fn random_simplicial(rng: &mut impl Rng, n: usize, eps: f64) -> ConeSpec {
    let g = DMatrix::identity(n, n) + uniform_matrix(rng, n, 0.0, 1.0) * eps;
    ConeSpec::simplicial(g).expect("well conditioned")
}

/// A mix of orthants, simplicial and polyhedral cones of dimension 2 to 5.
pub fn random_cone(rng: &mut impl Rng) -> ConeSpec {
    let n = rng.random_range(2..=5);
    match rng.random_range(0..3) {
        0 => ConeSpec::orthant(n).unwrap(),
        1 => {
            let eps = rng.random_range(0.1..1.0);
            random_simplicial(rng, n, eps)
        }
        _ => {
            let extra = rng.random_range(1..=4);
            random_polyhedral(rng, n, extra)
        }
    }
}
