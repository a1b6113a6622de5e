//! Invariant suites shared by the command-line `selftest` and the acceptance run.
//!
//! Each suite draws its sample points from a seeded generator, so reports are
//! reproducible run to run.

use crate::kinematics::Pair;
use crate::specfun::{gamma, kummer_eval_with, kummer_phi, switch_radius, KummerMethod};
use crate::wavefn::{bbk, bbk_screen_factor, norm_const, psi_c, PLANE_WAVE_NORM};
use crate::{JacobiConfig, JacobiMomentum, Result, Vec3};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;

/// Outcome of one invariant suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_rel_err <= self.tolerance
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<24} cases={:<5} max_rel_err={:.3e} tol={:.1e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.max_rel_err,
            self.tolerance
        )
    }
}

/// Knobs for the suites. `norm_perturbation` scales the pair normalization by
/// `1 + norm_perturbation` inside the Gamow suite; it exists to prove the
/// harness can fail.
#[derive(Clone, Copy, Debug, Default)]
pub struct SelftestOptions {
    pub norm_perturbation: f64,
    pub seed: u64,
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

fn sin_pi(w: C) -> C {
    let r = w.re - 2.0 * (w.re / 2.0).round();
    (C::new(r, w.im) * PI).sin()
}

fn report(name: &'static str, tolerance: f64, errs: impl Iterator<Item = f64>) -> SuiteReport {
    let (mut cases, mut worst) = (0, 0.0f64);
    for e in errs {
        cases += 1;
        // NaN must not hide behind max()
        worst = if e.is_nan() { f64::INFINITY } else { worst.max(e) };
    }
    SuiteReport { name, cases, max_rel_err: worst, tolerance }
}

pub fn gamma_reflection(opts: &SelftestOptions, n: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6a);
    let mut errs = Vec::with_capacity(n);
    while errs.len() < n {
        let w = C::new(rng.gen_range(-10.0..10.0), rng.gen_range(-20.0..20.0));
        if w.im.abs() < 1e-3 && (w.re - w.re.round()).abs() < 1e-3 {
            continue;
        }
        let lhs = gamma(w)? * gamma(1.0 - w)?;
        errs.push(rel(lhs, C::new(PI, 0.0) / sin_pi(w)));
    }
    Ok(report("gamma_reflection", 1e-12, errs.into_iter()))
}

// eta <= 20, |zeta| up to 1e6, within a narrow wedge about the imaginary axis
fn kummer_point(rng: &mut ChaCha8Rng) -> (C, C, C) {
    let eta = rng.gen_range(0.0..20.0);
    let b = if rng.gen_bool(0.5) { 1.0 } else { 2.0 };
    let r = rng.gen_range((1e-6f64).ln()..(1e6f64).ln()).exp();
    let re = (r * rng.gen_range(-0.3..0.3)).clamp(-500.0, 500.0);
    let im = (r * r - re * re).sqrt() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    (C::new(0.0, -eta), C::new(b, 0.0), C::new(re, im))
}

/// Residual of `ζΦ'' + (b − ζ)Φ' − aΦ`, relative to the sum of the magnitudes of its terms.
pub fn kummer_equation(opts: &SelftestOptions, n: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x4b);
    let mut errs = Vec::with_capacity(n);
    for _ in 0..n {
        let (a, b, z) = kummer_point(&mut rng);
        let e = kummer_phi(a, b, z)?;
        let pp = kummer_phi(a + 2.0, b + 2.0, z)?.value * a * (a + 1.0) / (b * (b + 1.0));
        let terms = [z * pp, (b - z) * e.dz, a * e.value];
        let scale: f64 = terms.iter().map(|t| t.norm()).sum::<f64>().max(e.value.norm());
        errs.push((terms[0] + terms[1] - terms[2]).norm() / scale);
    }
    Ok(report("kummer_equation", 1e-8, errs.into_iter()))
}

pub fn kummer_transformation(opts: &SelftestOptions, n: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x4c);
    let mut errs = Vec::with_capacity(n);
    for _ in 0..n {
        let (a, b, z) = kummer_point(&mut rng);
        let lhs = kummer_phi(a, b, z)?.value;
        let rhs = kummer_phi(b - a, b, -z)?.value * z.exp();
        errs.push(rel(lhs, rhs));
    }
    Ok(report("kummer_transformation", 1e-9, errs.into_iter()))
}

/// Stepwise continuation against the large-argument expansion around the switch radius.
pub fn kummer_overlap(_opts: &SelftestOptions) -> Result<SuiteReport> {
    let mut errs = Vec::new();
    for eta in [0.05, 0.5, 2.0, 8.0, 20.0] {
        let a = C::new(0.0, -eta);
        for b in [1.0, 2.0] {
            let b = C::new(b, 0.0);
            let rs = switch_radius(a, b);
            for frac in [1.0, 1.4, 2.0] {
                for tilt in [0.0, 0.3, -0.3] {
                    for side in [1.0, -1.0] {
                        let z = C::new(tilt, side) * (frac * rs / (1.0 + tilt * tilt).sqrt());
                        let cont = kummer_eval_with(a, b, z, KummerMethod::Continuation)?;
                        let asym = kummer_eval_with(a, b, z, KummerMethod::Asymptotic)?;
                        errs.push(rel(asym.value, cont.value));
                    }
                }
            }
        }
    }
    Ok(report("kummer_overlap", 1e-8, errs.into_iter()))
}

fn pair_draw(rng: &mut ChaCha8Rng) -> (Vec3, Vec3, f64) {
    let mut unit = || loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if let Some(u) = v.unit() {
            if v.norm() <= 1.0 {
                break u;
            }
        }
    };
    let (xd, kd) = (unit(), unit());
    let x = xd * rng.gen_range(0.5..5.0);
    let k = kd * rng.gen_range(0.5..2.0);
    (x, k, rng.gen_range(0.2..2.0))
}

/// Seven-point second difference residual of the two-body equation, relative to `k²|ψ_c|`.
pub fn pair_wave_residual(x: Vec3, k: Vec3, alpha: f64, h: f64) -> Result<f64> {
    let f = |v: Vec3| psi_c(&v, &k, alpha).map(|w| w.value);
    let f0 = f(x)?;
    let mut lap = C::new(0.0, 0.0);
    for i in 0..3 {
        let mut e = Vec3::ZERO;
        e.0[i] = h;
        lap += (f(x + e)? - f0 * 2.0 + f(x - e)?) / (h * h);
    }
    let res = -lap + f0 * (alpha / x.norm() - k.norm_sq());
    Ok(res.norm() / (k.norm_sq() * f0.norm()))
}

/// Returns the step-1e-3 residual suite and the convergence-order suite.
///
/// The order is read off one halving `h → h/2` with `h·|k| = 0.04`, where
/// truncation still dominates rounding.
pub fn pair_wave(opts: &SelftestOptions, n: usize) -> Result<(SuiteReport, SuiteReport)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x70);
    let (mut res, mut order) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let (x, k, alpha) = pair_draw(&mut rng);
        res.push(pair_wave_residual(x, k, alpha, 1e-3)?);
        let h = 0.04 / k.norm();
        let (a, b) = (pair_wave_residual(x, k, alpha, h)?, pair_wave_residual(x, k, alpha, 0.5 * h)?);
        order.push(((a / b).log2() - 2.0).abs());
    }
    Ok((report("pair_wave_residual", 1e-6, res.into_iter()), report("pair_wave_order", 0.2, order.into_iter())))
}

pub fn gamow(opts: &SelftestOptions) -> Result<SuiteReport> {
    let mut errs = Vec::new();
    for eta in [0.1, 0.5, 1.0, 5.0] {
        let n = norm_const(eta)? * (1.0 + opts.norm_perturbation);
        let want = PLANE_WAVE_NORM.powi(2) * 2.0 * PI * eta / (2.0 * PI * eta).exp_m1();
        errs.push((n.norm_sqr() - want).abs() / want);
    }
    Ok(report("gamow", 1e-10, errs.into_iter()))
}

/// `ψ_c(x_j, k_j)·Ψ_j` rebuilds the BBK product for every screen.
pub fn factorization(opts: &SelftestOptions, n: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x66);
    let mut errs = Vec::with_capacity(3 * n);
    for _ in 0..n {
        let mut six = |s: f64| std::array::from_fn::<f64, 6, _>(|_| rng.gen_range(-s..s));
        let z = JacobiConfig::from_array(six(20.0));
        let q = JacobiMomentum::from_array(six(1.0));
        if !q.clear_of_screens(0.1) {
            continue;
        }
        let alpha = rng.gen_range(0.2..2.0);
        let want = bbk(&z, &q, alpha)?;
        for j in Pair::ALL {
            let (pc, rest) = bbk_screen_factor(&z, &q, j, alpha)?;
            errs.push(rel(pc * rest, want));
        }
    }
    Ok(report("factorization", 1e-12, errs.into_iter()))
}

/// Every suite at its default size.
pub fn run_all(opts: &SelftestOptions) -> Result<Vec<SuiteReport>> {
    let (res, order) = pair_wave(opts, 50)?;
    Ok(vec![
        gamma_reflection(opts, 1000)?,
        kummer_equation(opts, 1000)?,
        kummer_transformation(opts, 1000)?,
        kummer_overlap(opts)?,
        res,
        order,
        gamow(opts)?,
        factorization(opts, 200)?,
    ])
}
