//! Schrödinger discrepancy `Q[Ψ] = (-Δ_z + V - λ) Ψ` of the constructions,
//! by finite differences and (for BBK) in closed form, and its decay along
//! rays to infinity.
//!
//! Fields are differenced through their envelopes: with `Ψ = e^{i<z,q>} F`,
//! `Q[Ψ] = e^{i<z,q>} (-ΔF - 2i <q, ∇F> + V F)`, so `λ` cancels analytically
//! and the stencil only has to resolve the slow variation of `F`.

use crate::error::{Error, Result};
use crate::kinematics::{JacobiConfig, JacobiMomentum, Pair};
use crate::specfun::kummer_phi;
use crate::vec3::Vec3;
use crate::wavefn::{self, bbk_norm, sommerfeld};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

const SCREEN_TOL: f64 = 1e-12;

/// `V(z) = Σ_j α/|x_j|`.
pub fn potential(z: &JacobiConfig, alpha: f64) -> Result<f64> {
    let mut v = 0.0;
    for j in Pair::ALL {
        let x = z.frame(j).0.norm();
        if x < SCREEN_TOL {
            return Err(Error::OnScreen(j));
        }
        v += alpha / x;
    }
    Ok(v)
}

/// A three-body field `Ψ(z) = e^{i<z,q>} F(z)`, accessed through `F`.
pub trait Field: Sync {
    fn envelope(&self, z: &JacobiConfig) -> Result<C>;
}

impl<F> Field for F
where
    F: Fn(&JacobiConfig) -> Result<C> + Sync,
{
    fn envelope(&self, z: &JacobiConfig) -> Result<C> {
        self(z)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BbkField {
    pub q: JacobiMomentum,
    pub alpha: f64,
}

impl Field for BbkField {
    fn envelope(&self, z: &JacobiConfig) -> Result<C> {
        wavefn::bbk_envelope(z, &self.q, self.alpha)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChiField {
    pub q: JacobiMomentum,
    pub alpha: f64,
    pub pair: Pair,
}

impl Field for ChiField {
    fn envelope(&self, z: &JacobiConfig) -> Result<C> {
        wavefn::chi_envelope(z, &self.q, self.pair, self.alpha)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PsiAsField {
    pub q: JacobiMomentum,
    pub alpha: f64,
    pub mu: f64,
    pub nu: f64,
}

impl Field for PsiAsField {
    fn envelope(&self, z: &JacobiConfig) -> Result<C> {
        wavefn::psi_as_envelope(z, &self.q, self.alpha, self.mu, self.nu)
    }
}

/// `ψ_c(x_j, k_j) e^{i<y_j, p_j>}`: an exact eigenfunction when only the
/// pair-`j` potential is kept.
#[derive(Clone, Copy, Debug)]
pub struct PairField {
    pub q: JacobiMomentum,
    pub alpha: f64,
    pub pair: Pair,
}

impl Field for PairField {
    fn envelope(&self, z: &JacobiConfig) -> Result<C> {
        let (x, _) = z.frame(self.pair);
        let (k, _) = self.q.frame(self.pair);
        let w = wavefn::psi_c(&x, &k, self.alpha)?;
        Ok(w.norm_const * w.kummer.value)
    }
}

/// Finite-difference stencil along each of the six coordinate axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Stencil {
    /// Second order, 13 points.
    #[default]
    Central2,
    /// Eighth order, 49 points.
    Central8,
}

impl Stencil {
    /// `(offset, second-derivative weight, first-derivative weight)` for offsets `m >= 1`;
    /// the centre weight of the second derivative is returned separately.
    fn weights(self) -> (&'static [(f64, f64, f64)], f64) {
        match self {
            Stencil::Central2 => (&[(1.0, 1.0, 0.5)], -2.0),
            Stencil::Central8 => (
                &[
                    (1.0, 8.0 / 5.0, 4.0 / 5.0),
                    (2.0, -1.0 / 5.0, -1.0 / 5.0),
                    (3.0, 8.0 / 315.0, 4.0 / 105.0),
                    (4.0, -1.0 / 560.0, -1.0 / 280.0),
                ],
                -205.0 / 72.0,
            ),
        }
    }

    pub fn points(self) -> usize {
        1 + 12 * self.weights().0.len()
    }

    pub fn reach(self) -> f64 {
        self.weights().0.len() as f64
    }
}

/// Which potential enters the residual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PotentialTerm {
    #[default]
    Full,
    /// Only `α/|x_j|`; for checking exact two-body eigenfunctions.
    PairOnly(Pair),
}

/// Options of one residual evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualOptions {
    pub h: f64,
    pub stencil: Stencil,
    pub potential: PotentialTerm,
}

impl ResidualOptions {
    pub fn new(h: f64) -> Self {
        ResidualOptions { h, stencil: Stencil::Central2, potential: PotentialTerm::Full }
    }

    pub fn stencil(mut self, s: Stencil) -> Self {
        self.stencil = s;
        self
    }

    pub fn potential(mut self, p: PotentialTerm) -> Self {
        self.potential = p;
        self
    }
}

fn shifted(z: &JacobiConfig, axis: usize, d: f64) -> JacobiConfig {
    let mut a = z.to_array();
    a[axis] += d;
    JacobiConfig::from_array(a)
}

/// Residual pieces at one point.
#[derive(Clone, Copy, Debug)]
pub struct ResidualEval {
    /// `Q[Ψ](z)`
    pub q: C,
    /// `Ψ(z)`
    pub value: C,
    pub envelope: C,
}

/// Finite-difference `Q[Ψ](z)` with full control over the stencil and the potential.
pub fn numeric_residual_eval<F: Field + ?Sized>(
    field: &F,
    z: &JacobiConfig,
    q: &JacobiMomentum,
    alpha: f64,
    opts: &ResidualOptions,
) -> Result<ResidualEval> {
    let h = opts.h;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    let qn = q.norm();
    if qn > 0.0 && h > 0.05 * 2.0 * PI / qn {
        log::warn!("step {h} exceeds 5% of the wavelength 2π/|q| = {}", 2.0 * PI / qn);
    }
    let margin = 10.0 * h * opts.stencil.reach();
    for j in Pair::ALL {
        if z.frame(j).0.norm() < margin {
            return Err(Error::OnScreen(j));
        }
    }
    let v = match opts.potential {
        PotentialTerm::Full => potential(z, alpha)?,
        PotentialTerm::PairOnly(j) => alpha / z.frame(j).0.norm(),
    };
    let (side, centre) = opts.stencil.weights();
    let f0 = field.envelope(z)?;
    let qa = q.to_array();
    let mut lap = f0 * (6.0 * centre);
    let mut qgrad = C::new(0.0, 0.0);
    for (axis, &qc) in qa.iter().enumerate() {
        let mut d1 = C::new(0.0, 0.0);
        for &(m, w2, w1) in side {
            let fp = field.envelope(&shifted(z, axis, m * h))?;
            let fm = field.envelope(&shifted(z, axis, -m * h))?;
            lap += (fp + fm) * w2;
            d1 += (fp - fm) * w1;
        }
        qgrad += d1 * qc;
    }
    let lap = lap / (h * h);
    let qgrad = qgrad / h;
    let env_q = -lap - C::i() * 2.0 * qgrad + f0 * v;
    let phase = C::from_polar(1.0, z.dot(q));
    Ok(ResidualEval { q: env_q * phase, value: f0 * phase, envelope: f0 })
}

/// 13-point finite-difference `Q[Ψ](z)` with the full potential.
pub fn numeric_residual<F: Field + ?Sized>(
    field: &F,
    z: &JacobiConfig,
    q: &JacobiMomentum,
    alpha: f64,
    h: f64,
) -> Result<C> {
    Ok(numeric_residual_eval(field, z, q, alpha, &ResidualOptions::new(h))?.q)
}

/// Overall constant of the closed-form BBK discrepancy once `N_0 e^{i<z,q>}`
/// is factored out explicitly.
pub const C_Q: f64 = 1.0;

/// Closed-form `Q[Ψ^BBK]`:
/// `-c_Q N_0 e^{i<z,q>} Σ_{cyc} k_2 k_3 <k̂_2 - x̂_2, k̂_3 - x̂_3> Φ_1 Φ_2' Φ_3'`.
pub fn analytic_q_bbk(z: &JacobiConfig, q: &JacobiMomentum, alpha: f64) -> Result<C> {
    let mut phi = [C::new(0.0, 0.0); 3];
    let mut dphi = [C::new(0.0, 0.0); 3];
    let mut kn = [0.0; 3];
    let mut dirs = [Vec3::ZERO; 3];
    for j in Pair::ALL {
        let i = j.index();
        let (x, _) = z.frame(j);
        let (k, _) = q.frame(j);
        let xn = x.norm();
        if xn < SCREEN_TOL {
            return Err(Error::OnScreen(j));
        }
        kn[i] = k.norm();
        if kn[i] == 0.0 {
            return Err(Error::Domain(format!("k_{j} = 0")));
        }
        let zeta = C::new(0.0, kn[i] * xn - k.dot(&x));
        let e = kummer_phi(C::new(0.0, -sommerfeld(alpha, kn[i])), C::new(1.0, 0.0), zeta)?;
        phi[i] = e.value;
        dphi[i] = e.dz;
        dirs[i] = k * (1.0 / kn[i]) - x * (1.0 / xn);
    }
    let c = |a: usize, b: usize| kn[a] * kn[b] * dirs[a].dot(&dirs[b]);
    let sum = phi[0] * dphi[1] * dphi[2] * c(1, 2)
        + dphi[0] * phi[1] * dphi[2] * c(2, 0)
        + dphi[0] * dphi[1] * phi[2] * c(0, 1);
    Ok(-sum * bbk_norm(q, alpha)? * C::from_polar(C_Q, z.dot(q)))
}

/// Least-squares fit of `numeric ≈ c · analytic` over a sample set.
#[derive(Clone, Debug)]
pub struct Calibration {
    pub c_q: C,
    /// `max |numeric_i/analytic_i - c_q| / |c_q|`
    pub spread: f64,
    /// `max |numeric_i - c_q analytic_i| / |numeric_i|`
    pub max_rel_err: f64,
    pub points: usize,
}

/// Calibrates `analytic_q_bbk` (with `C_Q` divided out) against the
/// `Central8` numeric residual with step `h` at the given points.
pub fn calibrate_c_q(points: &[JacobiConfig], q: &JacobiMomentum, alpha: f64, h: f64) -> Result<Calibration> {
    let field = BbkField { q: *q, alpha };
    let opts = ResidualOptions::new(h).stencil(Stencil::Central8);
    let pairs: Vec<Result<(C, C)>> = points
        .par_iter()
        .map(|z| {
            let n = numeric_residual_eval(&field, z, q, alpha, &opts)?.q;
            let a = analytic_q_bbk(z, q, alpha)? / C_Q;
            Ok((n, a))
        })
        .collect();
    let pairs: Vec<(C, C)> = pairs.into_iter().collect::<Result<_>>()?;
    let (mut num, mut den) = (C::new(0.0, 0.0), 0.0);
    for (n, a) in &pairs {
        num += a.conj() * n;
        den += a.norm_sqr();
    }
    if den == 0.0 {
        return Err(Error::Singular("analytic discrepancy vanishes at every sample".into()));
    }
    let c_q = num / den;
    let spread = pairs.iter().map(|(n, a)| (n / a - c_q).norm() / c_q.norm()).fold(0.0, f64::max);
    let max_rel_err = pairs.iter().map(|(n, a)| (n - c_q * a).norm() / n.norm()).fold(0.0, f64::max);
    Ok(Calibration { c_q, spread, max_rel_err, points: pairs.len() })
}

/// Parametrized curve `t ↦ z(t)` to infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RayPath {
    /// `z(t) = offset + speed · t · direction` with a unit 6-vector `direction` (frame 1).
    Linear { direction: [f64; 6], offset: JacobiConfig, speed: f64 },
    /// In the frame of `pair`: `x = scale · (speed t)^exponent · x̂`, `y = speed t · ŷ`.
    /// `exponent = 0` keeps the pair at fixed distance from its screen.
    ScreenPower { pair: Pair, xhat: Vec3, yhat: Vec3, scale: f64, exponent: f64, speed: f64 },
}

impl RayPath {
    pub fn linear(direction: [f64; 6], offset: JacobiConfig) -> Result<RayPath> {
        let n = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain("ray direction must be a nonzero 6-vector".into()));
        }
        Ok(RayPath::Linear { direction: direction.map(|d| d / n), offset, speed: 1.0 })
    }

    pub fn screen(pair: Pair, xhat: Vec3, yhat: Vec3, scale: f64, exponent: f64) -> Result<RayPath> {
        let xhat = xhat.unit().ok_or_else(|| Error::Domain("x direction must be nonzero".into()))?;
        let yhat = yhat.unit().ok_or_else(|| Error::Domain("y direction must be nonzero".into()))?;
        Ok(RayPath::ScreenPower { pair, xhat, yhat, scale, exponent, speed: 1.0 })
    }

    pub fn point(&self, t: f64) -> JacobiConfig {
        match *self {
            RayPath::Linear { direction, offset, speed } => {
                let o = offset.to_array();
                let s = speed * t;
                JacobiConfig::from_array(std::array::from_fn(|i| o[i] + s * direction[i]))
            }
            RayPath::ScreenPower { pair, xhat, yhat, scale, exponent, speed } => {
                let s = speed * t;
                JacobiConfig::from_frame(pair, xhat * (scale * s.powf(exponent)), yhat * s)
            }
        }
    }

    /// The same curve in the parameter `t' = t / c`.
    pub fn reparametrize(&self, c: f64) -> RayPath {
        let mut r = *self;
        match &mut r {
            RayPath::Linear { speed, .. } | RayPath::ScreenPower { speed, .. } => *speed *= c,
        }
        r
    }
}

/// A ray with its sample parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RaySpec {
    pub path: RayPath,
    pub t_values: Vec<f64>,
}

impl RaySpec {
    pub fn new(path: RayPath, t_values: Vec<f64>) -> Result<RaySpec> {
        if t_values.len() < 2 {
            return Err(Error::Domain("a ray needs at least two samples".into()));
        }
        if t_values[0] < 10.0 || t_values.windows(2).any(|w| w[1] <= w[0] || w[1].is_nan()) {
            return Err(Error::Domain("ray parameters must be strictly increasing and >= 10".into()));
        }
        Ok(RaySpec { path, t_values })
    }

    /// `n` geometrically spaced samples on `[t_min, t_max]`.
    pub fn geometric(path: RayPath, t_min: f64, t_max: f64, n: usize) -> Result<RaySpec> {
        if n < 2 || t_max.is_nan() || t_max <= t_min || t_min <= 0.0 {
            return Err(Error::Domain(format!("bad sample window [{t_min}, {t_max}] with {n} samples")));
        }
        let r = (t_max / t_min).ln() / (n - 1) as f64;
        let ts = (0..n).map(|i| if i == n - 1 { t_max } else { t_min * (r * i as f64).exp() }).collect();
        RaySpec::new(path, ts)
    }

    /// Same points, parameter scaled by `1/c`.
    pub fn reparametrize(&self, c: f64) -> RaySpec {
        RaySpec { path: self.path.reparametrize(c), t_values: self.t_values.iter().map(|t| t / c).collect() }
    }

    pub fn points(&self) -> Vec<JacobiConfig> {
        self.t_values.iter().map(|&t| self.path.point(t)).collect()
    }
}

/// Finite-difference step rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepPolicy {
    Fixed(f64),
    /// `h = min(wavelength_fraction · 2π/|q|, screen_fraction · min_j |x_j|)`.
    Adaptive {
        wavelength_fraction: f64,
        screen_fraction: f64,
    },
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy::Adaptive { wavelength_fraction: 0.02, screen_fraction: 0.01 }
    }
}

impl StepPolicy {
    pub fn step(&self, z: &JacobiConfig, q: &JacobiMomentum) -> f64 {
        match *self {
            StepPolicy::Fixed(h) => h,
            StepPolicy::Adaptive { wavelength_fraction, screen_fraction } => {
                let xmin = Pair::ALL.iter().map(|&j| z.frame(j).0.norm()).fold(f64::INFINITY, f64::min);
                (wavelength_fraction * 2.0 * PI / q.norm()).min(screen_fraction * xmin)
            }
        }
    }
}

/// Least-squares line through `(ln t, ln |Q|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(t, |Q|)`
    pub samples: Vec<(f64, f64)>,
    /// The residuals sit at the rounding floor of the stencil; the slope is meaningless.
    pub floor_limited: bool,
}

/// Line fit of `ln y` against `ln t`; zero values are clamped to the smallest normal.
pub fn loglog_fit(samples: &[(f64, f64)]) -> (f64, f64, f64) {
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(t, y)| (t.ln(), y.max(f64::MIN_POSITIVE).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, my - slope * mx, r2)
}

/// Residual decay options.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub policy: StepPolicy,
    pub stencil: Stencil,
    pub potential: PotentialTerm,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { policy: StepPolicy::default(), stencil: Stencil::Central8, potential: PotentialTerm::Full }
    }
}

/// One sample of a ray scan.
#[derive(Clone, Copy, Debug)]
pub struct RaySample {
    pub t: f64,
    pub h: f64,
    pub residual: ResidualEval,
    /// Rounding level of the stencil at this point, in units of `|Q|`.
    pub noise: f64,
}

/// Residuals along the ray, evaluated in parallel and returned in order.
pub fn ray_residuals<F: Field + ?Sized>(
    field: &F,
    ray: &RaySpec,
    q: &JacobiMomentum,
    alpha: f64,
    opts: &FitOptions,
) -> Result<Vec<RaySample>> {
    let out: Vec<Result<RaySample>> = ray
        .t_values
        .par_iter()
        .map(|&t| {
            let z = ray.path.point(t);
            let h = opts.policy.step(&z, q);
            let ro = ResidualOptions { h, stencil: opts.stencil, potential: opts.potential };
            let residual = numeric_residual_eval(field, &z, q, alpha, &ro)?;
            let (side, centre) = opts.stencil.weights();
            let wsum = 6.0 * centre.abs() + 12.0 * side.iter().map(|s| s.1.abs()).sum::<f64>();
            let noise = 10.0 * f64::EPSILON * residual.envelope.norm() * wsum / (h * h);
            Ok(RaySample { t, h, residual, noise })
        })
        .collect();
    out.into_iter().collect()
}

/// Fits the decay exponent of `|Q[Ψ]|` along a ray.
///
/// Returns [`Error::PoorFit`] when `r² < 0.9`, unless every sample is at the
/// rounding floor, in which case the fit is returned with `floor_limited` set.
pub fn decay_fit<F: Field + ?Sized>(
    field: &F,
    ray: &RaySpec,
    q: &JacobiMomentum,
    alpha: f64,
    opts: &FitOptions,
) -> Result<DecayFit> {
    let samples = ray_residuals(field, ray, q, alpha, opts)?;
    fit_samples(&samples)
}

/// Builds a [`DecayFit`] from ray samples.
pub fn fit_samples(samples: &[RaySample]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.residual.q.norm())).collect();
    let floor_limited = samples.iter().all(|s| s.residual.q.norm() <= 100.0 * s.noise);
    let (slope, intercept, r_squared) = loglog_fit(&pts);
    let fit = DecayFit { slope, intercept, r_squared, samples: pts, floor_limited };
    if !floor_limited && r_squared < 0.9 {
        return Err(Error::PoorFit(Box::new(fit)));
    }
    Ok(fit)
}
