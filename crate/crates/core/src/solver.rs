//! Pullback solve for the random eigenvector and the forward eigenpair path.
//!
//! With `f_k(x) = D_{k-1}(x) / <phi_k, D_{k-1}(x)>` the normalized step from
//! the section of `K_{k-1}` to the section of `K_k`, the depth-`m` pullback is
//!
//! ```text
//! f^(m) = f_0 o f_-1 o ... o f_-m    (from the section of K_{-m-1} to that of K_0)
//!       = C(m+1, T^{-m-1} omega) x / <phi_0, C(m+1, T^{-m-1} omega) x>
//! ```
//!
//! Once the composite is strictly monotone its image of the whole section is a
//! compact subset of the interior, the images are nested in `m`, and their
//! Hilbert diameter shrinks to zero. The limit point is `x(omega)`.
//!
//! Diameters are estimated from a finite probe set. For linear maps the section
//! vertices are enough: the image of the section is the convex hull of the
//! vertex images and the Hilbert diameter of a polytope is attained at vertices.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{ConeSpec, Functional};
use crate::envpath::EnvironmentPath;
use crate::hilbert::MetricContext;
use crate::{Error, Result};

pub const REASON_NO_STRICTNESS: &str = "no strictness index <= max_depth";
pub const REASON_DIAMETER: &str = "diameter above tol at max_depth";

/// Which initial vectors are pushed through the pullback at each depth.
///
/// The first probe is the anchor whose image is reported as `x0`: the
/// barycenter of the section vertices, or with `include_extreme = false` the
/// mean of the random probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbePolicy {
    #[serde(default = "yes")]
    pub include_extreme: bool,
    #[serde(default = "default_random")]
    pub n_random: usize,
    #[serde(default)]
    pub seed: u64,
}

fn yes() -> bool {
    true
}

fn default_random() -> usize {
    8
}

impl Default for ProbePolicy {
    fn default() -> Self {
        ProbePolicy {
            include_extreme: true,
            n_random: default_random(),
            seed: 0,
        }
    }
}

impl ProbePolicy {
    pub fn random_only(n_random: usize, seed: u64) -> Self {
        ProbePolicy {
            include_extreme: false,
            n_random,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.include_extreme && self.n_random == 0 {
            return Err(Error::InvalidArgument(
                "probe policy selects no probes".into(),
            ));
        }
        Ok(())
    }

    /// Probes on the section of `cone`, the anchor first. `stream` decorrelates depths.
    pub fn probes(&self, cone: &ConeSpec, phi: &Functional, stream: u64) -> Vec<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let random: Vec<_> = (0..self.n_random)
            .map(|_| cone.sample_section_interior(phi, &mut rng))
            .collect();
        let mut out = Vec::with_capacity(random.len() + cone.extreme_rays().ncols() + 1);
        if self.include_extreme {
            out.push(cone.section_centroid(phi));
            out.extend(cone.section_vertices(phi));
        } else {
            let mean = random
                .iter()
                .fold(DVector::zeros(cone.dim()), |acc, v| acc + v)
                / random.len() as f64;
            out.push(mean);
        }
        out.extend(random);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    /// Extra depth at which the diameter must still be below `tol`.
    #[serde(default = "default_gap")]
    pub confirmation_gap: usize,
    #[serde(default)]
    pub probes: ProbePolicy,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_depth() -> usize {
    10_000
}

fn default_gap() -> usize {
    5
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: default_tol(),
            max_depth: default_max_depth(),
            confirmation_gap: default_gap(),
            probes: ProbePolicy::default(),
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_probes(mut self, probes: ProbePolicy) -> Self {
        self.probes = probes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tol {} must be positive",
                self.tol
            )));
        }
        self.probes.validate()
    }
}

/// Record of a pullback solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackTrace {
    /// Probes at index `-depth_reached - 1`.
    pub probes_used: Vec<Vec<f64>>,
    /// Empirical Hilbert diameter of the probe images at time 0, per depth `m`.
    /// `+inf` while the composite is not yet strictly monotone.
    pub diameters: Vec<f64>,
    /// First depth at which the composite is strictly monotone.
    pub m_strict: Option<usize>,
    pub depth_reached: usize,
    /// Anchor image at the last depth; interior and normalized when converged.
    pub x0: Vec<f64>,
    pub converged: bool,
    pub reason: Option<String>,
    /// Probe evaluations dropped because the composite sent the probe to zero.
    pub annihilated_probes: usize,
}

impl PullbackTrace {
    pub fn x0_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.x0)
    }

    pub fn final_diameter(&self) -> f64 {
        self.diameters.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Forward path `alpha_t x_{t+1} = D_t(x_t)` for `t = 0..H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPairPath {
    /// `x_0 ..= x_H`, each on the section of its cone.
    pub x: Vec<Vec<f64>>,
    /// `alpha_0 .. alpha_{H-1}`.
    pub alpha: Vec<f64>,
    /// `||alpha_t x_{t+1} - D_t(x_t)||_inf`.
    pub residuals: Vec<f64>,
    /// `||D_t(x_t)||_inf`, the scale for the residuals.
    pub scales: Vec<f64>,
}

impl EigenPairPath {
    pub fn horizon(&self) -> usize {
        self.alpha.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.residuals
            .iter()
            .zip(&self.scales)
            .map(|(r, s)| r / s)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: usize,
    pub sup_gap: f64,
}

/// Route A: `f_0 o ... o f_-m` applied step by step, normalizing after each map.
pub fn pullback_compose(env: &EnvironmentPath, m: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
    let start = -(m as i64) - 1;
    let cone = env.cone_at(start)?;
    if !cone.contains(x)? {
        return Err(Error::NotInCone);
    }
    let mut v = x.clone();
    for k in start..0 {
        let step = env.step_at(k)?;
        let phi_next = step.map.cone_out().default_functional();
        v = step.map.normalized_apply(&phi_next, &v)?;
    }
    Ok(v)
}

/// Route B: `C(m+1, T^{-m-1} omega) x` followed by a single normalization at time 0.
pub fn pullback_compose_cocycle(
    env: &EnvironmentPath,
    m: usize,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    let start = -(m as i64) - 1;
    let c = env.cocycle_apply(start, m + 1, x)?;
    if c.direction.amax() == 0.0 {
        return Err(Error::MapAnnihilates {
            witness: x.iter().copied().collect(),
        });
    }
    let k0 = env.cone_at(0)?;
    k0.section_normalize(&k0.default_functional(), &c.direction)
}

/// Accumulated product `A_-1 A_-2 ... A_-m-1` for linear environments, rescaled to unit max entry.
struct LinearPullback {
    product: DMatrix<f64>,
}

impl LinearPullback {
    fn extend(&mut self, a: &DMatrix<f64>) {
        self.product = &self.product * a;
        let s = self.product.amax();
        if s > 0.0 {
            self.product /= s;
        }
    }
}

/// Run the pullback iteration until the probe images agree to `opts.tol`.
///
/// Non-convergence is not an error: the trace carries `converged = false` and
/// a reason. Errors are reserved for invalid input or annihilated probes.
pub fn pullback_solve(env: &EnvironmentPath, opts: &SolverOptions) -> Result<PullbackTrace> {
    opts.validate()?;
    let k0 = env.cone_at(0)?;
    let ctx0 = MetricContext::with_default_functional(k0.clone());
    let phi0 = ctx0.functional().clone();
    let mut linear = env.scenario().is_linear().then(|| LinearPullback {
        product: DMatrix::identity(env.dim(), env.dim()),
    });

    let mut diameters = Vec::new();
    let mut m_strict = None;
    let mut first_ok: Option<usize> = None;
    let mut probes = Vec::new();
    let mut anchor = DVector::zeros(env.dim());
    let mut annihilated = 0;

    for m in 0..=opts.max_depth {
        let start = -(m as i64) - 1;
        let step = env.step_at(start)?;
        let cone = &step.cone;
        probes = opts.probes.probes(cone, &step.functional, m as u64);

        let (images, strict) = match linear.as_mut() {
            Some(lin) => {
                lin.extend(step.map.as_linear().expect("linear scenario"));
                let mut images = Vec::with_capacity(probes.len());
                for p in &probes {
                    let v = &lin.product * p;
                    let s = phi0.eval(&v);
                    if !(s > 0.0) {
                        return Err(Error::MapAnnihilates {
                            witness: p.iter().copied().collect(),
                        });
                    }
                    images.push(v / s);
                }
                let rays = &lin.product * cone.extreme_rays();
                let mut strict = true;
                for r in rays.column_iter() {
                    if !k0.interior_contains(&r.into_owned())? {
                        strict = false;
                        break;
                    }
                }
                (images, strict)
            }
            None => {
                // Maps that are not completely monotone can send boundary probes to zero.
                // Such a composite is not strictly monotone; the probe is left out.
                let mut images = Vec::with_capacity(probes.len());
                let mut strict = true;
                for (i, p) in probes.iter().enumerate() {
                    match pullback_compose(env, m, p) {
                        Ok(v) => images.push(v),
                        Err(Error::MapAnnihilates { .. }) if i > 0 => {
                            annihilated += 1;
                            strict = false;
                        }
                        Err(e) => return Err(e),
                    }
                }
                for v in &images {
                    if !k0.interior_contains(v)? {
                        strict = false;
                        break;
                    }
                }
                (images, strict)
            }
        };
        anchor = images[0].clone();

        if strict && m_strict.is_none() {
            m_strict = Some(m);
        }
        let rho = if m_strict.is_some() {
            ctx0.diameter(&images)?
        } else {
            f64::INFINITY
        };
        diameters.push(rho);

        if rho <= opts.tol {
            let m0 = *first_ok.get_or_insert(m);
            if m >= m0 + opts.confirmation_gap {
                return Ok(PullbackTrace {
                    probes_used: to_rows(&probes),
                    diameters,
                    m_strict,
                    depth_reached: m,
                    x0: anchor.iter().copied().collect(),
                    converged: true,
                    reason: None,
                    annihilated_probes: annihilated,
                });
            }
        } else {
            first_ok = None;
        }
    }

    let reason = if m_strict.is_none() {
        REASON_NO_STRICTNESS
    } else {
        REASON_DIAMETER
    };
    Ok(PullbackTrace {
        probes_used: to_rows(&probes),
        diameters,
        m_strict,
        depth_reached: opts.max_depth,
        x0: anchor.iter().copied().collect(),
        converged: false,
        reason: Some(reason.to_string()),
        annihilated_probes: annihilated,
    })
}

fn to_rows(v: &[DVector<f64>]) -> Vec<Vec<f64>> {
    v.iter().map(|x| x.iter().copied().collect()).collect()
}

/// Iterate `x_{t+1} = D_t(x_t) / <phi_{t+1}, D_t(x_t)>` for `horizon` steps.
pub fn forward_extend(
    env: &EnvironmentPath,
    x0: &DVector<f64>,
    horizon: usize,
) -> Result<EigenPairPath> {
    let k0 = env.cone_at(0)?;
    if !k0.interior_contains(x0)? {
        return Err(Error::NotInInterior);
    }
    let norm = k0.default_functional().eval(x0);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "x0 is not on the section (<phi_0, x0> = {norm})"
        )));
    }
    let mut path = EigenPairPath {
        x: Vec::with_capacity(horizon + 1),
        alpha: Vec::with_capacity(horizon),
        residuals: Vec::with_capacity(horizon),
        scales: Vec::with_capacity(horizon),
    };
    let mut x = x0.clone();
    path.x.push(x.iter().copied().collect());
    for t in 0..horizon {
        let step = env.step_at(t as i64)?;
        let dx = step.map.apply(&x)?;
        let phi_next = step.map.cone_out().default_functional();
        let alpha = phi_next.eval(&dx);
        if !(alpha > 0.0) {
            return Err(Error::MapAnnihilates {
                witness: x.iter().copied().collect(),
            });
        }
        let next = &dx / alpha;
        path.residuals.push((&next * alpha - &dx).amax());
        path.scales.push(dx.amax());
        path.alpha.push(alpha);
        path.x.push(next.iter().copied().collect());
        x = next;
    }
    Ok(path)
}

/// Hilbert distance at time 0 between the solutions of two probe policies.
pub fn uniqueness_check(
    env: &EnvironmentPath,
    opts: &SolverOptions,
    policy_a: &ProbePolicy,
    policy_b: &ProbePolicy,
) -> Result<f64> {
    let solve = |policy: &ProbePolicy| -> Result<DVector<f64>> {
        let trace = pullback_solve(env, &opts.clone().with_probes(policy.clone()))?;
        if !trace.converged {
            return Err(Error::NotConverged(trace.reason.unwrap_or_default()));
        }
        Ok(trace.x0_vector())
    };
    let a = solve(policy_a)?;
    let b = solve(policy_b)?;
    let ctx0 = MetricContext::with_default_functional(env.cone_at(0)?);
    ctx0.distance(&a, &b)
}

/// `sup_a ||C(t, T^-t omega) a / <phi_0, C(t, T^-t omega) a> - x0||_inf` for each `t`.
///
/// The supremum runs over the section vertices of `K_-t` and random interior
/// points drawn by `probes`.
pub fn uniform_convergence_profile(
    env: &EnvironmentPath,
    x0: &DVector<f64>,
    depths: &[usize],
    probes: &ProbePolicy,
) -> Result<Vec<ProfilePoint>> {
    let k0 = env.cone_at(0)?;
    let phi0 = k0.default_functional();
    depths
        .iter()
        .map(|&t| {
            let start = -(t as i64);
            let cone = env.cone_at(start)?;
            let phi = cone.default_functional();
            let mut sup_gap: f64 = 0.0;
            for a in probes.probes(&cone, &phi, t as u64) {
                let c = env.cocycle_apply(start, t, &a)?;
                if c.direction.amax() == 0.0 {
                    return Err(Error::MapAnnihilates {
                        witness: a.iter().copied().collect(),
                    });
                }
                let img = k0.section_normalize(&phi0, &c.direction)?;
                sup_gap = sup_gap.max((img - x0).amax());
            }
            Ok(ProfilePoint { t, sup_gap })
        })
        .collect()
}

/// Time average of `log alpha_t` with the i.i.d. standard error.
pub fn lyapunov_estimate(path: &EigenPairPath) -> Result<LyapunovEstimate> {
    let h = path.alpha.len();
    if h == 0 {
        return Err(Error::InvalidArgument("empty eigenpair path".into()));
    }
    if let Some(bad) = path.alpha.iter().find(|&&a| !(a > 0.0)) {
        return Err(Error::InvalidArgument(format!("non-positive alpha {bad}")));
    }
    let logs: Vec<f64> = path.alpha.iter().map(|a| a.ln()).collect();
    let mean = logs.iter().sum::<f64>() / h as f64;
    let stderr = if h > 1 {
        let var = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (h - 1) as f64;
        (var / h as f64).sqrt()
    } else {
        0.0
    };
    Ok(LyapunovEstimate {
        mean,
        stderr,
        steps: h,
    })
}
