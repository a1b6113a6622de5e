//! Kummer's confluent hypergeometric function `Φ(a, b, ζ) = 1F1(a; b; ζ)`
//! together with `∂Φ/∂ζ` and `∂Φ/∂a`.
//!
//! Three regimes:
//!
//! * power series for `|ζ| <= R_s` (a few units, smaller for large `|a|`),
//! * Taylor continuation of Kummer's equation along the ray from `R_s ζ/|ζ|`
//!   to `ζ`, carrying the parameter derivative through the inhomogeneous
//!   equation it satisfies,
//! * the two-branch large-`ζ` expansion once its smallest term at `|ζ|/2`
//!   is below `1e-9`, so that it is already accurate on the inner half of
//!   the switch annulus.

use super::gamma::{gamma, rgamma, rgamma_deriv};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

const EPS: f64 = 1e-17;
const MAX_TERMS: usize = 2000;
const SWITCH_TERM: f64 = 1e-9;
const MAX_RE_ZETA: f64 = 700.0;

/// Which representation produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KummerMethod {
    Series,
    Continuation,
    Asymptotic,
}

/// `Φ`, `∂Φ/∂ζ` and `∂Φ/∂a` at one point.
#[derive(Clone, Copy, Debug)]
pub struct KummerEval {
    pub a: C,
    pub b: C,
    pub zeta: C,
    pub value: C,
    pub dz: C,
    pub da: C,
    pub method: KummerMethod,
    /// Set when the chosen representation cannot reach `1e-9` relative accuracy.
    pub loss_of_accuracy: bool,
}

fn check_params(a: C, b: C, zeta: C) -> Result<()> {
    if a.im.abs() > 50.0 || a.re.abs() > 10.0 {
        return Err(Error::Domain(format!("Kummer parameter a = {a} outside |Re a| <= 10, |Im a| <= 50")));
    }
    if b.im != 0.0 || b.re <= 0.0 || b.re > 10.0 {
        return Err(Error::Domain(format!("Kummer parameter b = {b} must be real in (0, 10]")));
    }
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(Error::Domain(format!("Kummer argument {zeta} is not finite")));
    }
    if zeta.re > MAX_RE_ZETA {
        return Err(Error::Overflow(format!("Phi at Re zeta = {} exceeds the f64 range", zeta.re)));
    }
    Ok(())
}

/// Radius inside which the plain power series is used.
fn series_radius(a: C) -> f64 {
    4.0f64.min(16.0 / a.norm().max(1e-300))
}

/// Smallest term (relative to the leading 1) of the series
/// `Σ (p)_s (q)_s / s! r^{-s}`.
fn min_term(p: C, q: C, r: f64) -> f64 {
    let mut t = 1.0;
    let mut best = 1.0;
    for s in 0..MAX_TERMS {
        let sf = s as f64;
        t *= (p + sf).norm() * (q + sf).norm() / ((sf + 1.0) * r);
        if t < best {
            best = t;
        }
        if t == 0.0 || (t > 1e3 * best && sf > r) {
            break;
        }
    }
    best
}

fn asymptotic_min_term(a: C, b: C, r: f64) -> f64 {
    min_term(1.0 - a, b - a, r).max(min_term(a, a - b + 1.0, r))
}

/// Radius beyond which the large-`ζ` expansion is used.
pub fn switch_radius(a: C, b: C) -> f64 {
    let mut r = 2.0 * series_radius(a);
    while asymptotic_min_term(a, b, 0.5 * r) > SWITCH_TERM && r < 1e5 {
        r *= 1.02;
    }
    r
}

struct Local {
    f: C,
    df: C,
    g: C,
    dg: C,
}

fn series(a: C, b: C, z: C) -> (Local, bool) {
    let one = C::new(1.0, 0.0);
    let (mut t, mut dt) = (one, C::new(0.0, 0.0));
    let (mut f, mut g) = (one, dt);
    let (mut df, mut dg) = (a / b, one / b);
    let mut biggest = 1.0f64;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let w = z / ((b + nf) * (nf + 1.0));
        let ratio = (a + nf) * w;
        dt = dt * ratio + t * w;
        t *= ratio;
        f += t;
        g += dt;
        let n1 = nf + 1.0;
        df += t * (a + n1) / (b + n1);
        dg += dt * (a + n1) / (b + n1) + t / (b + n1);
        biggest = biggest.max(t.norm());
        let small = t.norm() <= EPS * f.norm() && (dt.norm() <= EPS * g.norm() || dt.norm() == 0.0);
        if small && n1 > z.norm() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let lossy = biggest > 1e7 * f.norm();
    (Local { f, df, g, dg }, lossy)
}

/// One Taylor step of Kummer's equation (and its `a`-derivative) from `z0` to `z0 + h`.
fn taylor_step(a: C, b: C, z0: C, h: C, s: &Local) -> Local {
    let (mut c0, mut c1) = (s.f, s.df);
    let (mut d0, mut d1) = (s.g, s.dg);
    let mut hp = h; // h^(n+1)
    let mut f = c0 + c1 * h;
    let mut g = d0 + d1 * h;
    let (mut df, mut dg) = (c1, d1);
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let den = z0 * ((nf + 1.0) * (nf + 2.0));
        let k = (nf + 1.0) * (b + nf - z0);
        let c2 = ((a + nf) * c0 - k * c1) / den;
        let d2 = ((a + nf) * d0 - k * d1 + c0) / den;
        let tf = c2 * hp; // coefficient times h^(n+1), feeds the derivative
        let tg = d2 * hp;
        df += tf * (nf + 2.0);
        dg += tg * (nf + 2.0);
        hp *= h;
        let vf = c2 * hp;
        let vg = d2 * hp;
        f += vf;
        g += vg;
        let small = vf.norm() <= EPS * f.norm()
            && tf.norm() <= EPS * df.norm()
            && (vg.norm() <= EPS * g.norm() || vg.norm() == 0.0);
        if small {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        c0 = c1;
        c1 = c2;
        d0 = d1;
        d1 = d2;
    }
    Local { f, df, g, dg }
}

fn continuation(a: C, b: C, z: C) -> (Local, bool) {
    let r = z.norm();
    let dir = z / r;
    let r0 = series_radius(a);
    let (mut state, mut lossy) = series(a, b, dir * r0);
    let mut rho = r0;
    let an = a.norm().max(1e-300);
    while rho < r {
        let step = (0.5 * rho).min(4.0).min(2.0 * (rho / an).sqrt()).min(r - rho);
        let z0 = dir * rho;
        state = taylor_step(a, b, z0, dir * step, &state);
        rho += step;
        if !(state.f.re.is_finite() && state.f.im.is_finite()) {
            lossy = true;
            break;
        }
    }
    (state, lossy)
}

struct AsymSeries {
    s: C,
    ds_dz: C,
    ds_da: C,
    min_term: f64,
}

/// `Σ (p)_k (q)_k / k! w^{-k}` with `p, q` affine in `a` (`dp/da = sp`,
/// `dq/da = sq`), its `w`-derivative scaled by `w` and its `a`-derivative.
fn asym_sum(p: C, q: C, sp: f64, sq: f64, w: C) -> AsymSeries {
    let one = C::new(1.0, 0.0);
    let (mut t, mut dt) = (one, C::new(0.0, 0.0));
    let (mut s, mut zs, mut ds) = (one, C::new(0.0, 0.0), C::new(0.0, 0.0));
    let mut best = 1.0f64;
    let winv = w.inv();
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let ratio = (p + kf) * (q + kf) * winv / (kf + 1.0);
        let dratio = ((q + kf) * sp + (p + kf) * sq) * winv / (kf + 1.0);
        let nt = t * ratio;
        let ndt = dt * ratio + t * dratio;
        if nt.norm() > t.norm() && kf > 0.5 * w.norm() {
            break;
        }
        t = nt;
        dt = ndt;
        s += t;
        zs -= t * (kf + 1.0);
        ds += dt;
        best = best.min(t.norm());
        if t.norm() <= EPS * s.norm() && (dt.norm() <= EPS * ds.norm() || dt.norm() == 0.0) {
            break;
        }
        if t.norm() == 0.0 && dt.norm() == 0.0 {
            break;
        }
    }
    AsymSeries { s, ds_dz: zs, ds_da: ds, min_term: best }
}

fn asymptotic(a: C, b: C, z: C) -> Result<(Local, bool)> {
    let gb = gamma(b)?;
    let lz = z.ln();
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let zinv = z.inv();

    // e^ζ ζ^{a-b} / Γ(a) Σ (1-a)_s (b-a)_s / s! ζ^{-s}
    let s1 = asym_sum(1.0 - a, b - a, -1.0, -1.0, z);
    let e1 = (z + (a - b) * lz).exp();
    let (r1, r1d) = (rgamma(a), rgamma_deriv(a));
    let t1 = e1 * r1 * s1.s;
    let t1_z = t1 * (1.0 + (a - b) * zinv) + e1 * r1 * s1.ds_dz * zinv;
    let t1_a = e1 * (lz * r1 * s1.s + r1d * s1.s + r1 * s1.ds_da);

    // e^{±iπa} ζ^{-a} / Γ(b-a) Σ (a)_s (a-b+1)_s / s! (-ζ)^{-s}
    let s2 = asym_sum(a, a - b + 1.0, 1.0, 1.0, -z);
    let ipi = C::new(0.0, sign * PI);
    let e2 = (ipi * a - a * lz).exp();
    let (r2, r2d) = (rgamma(b - a), rgamma_deriv(b - a));
    let t2 = e2 * r2 * s2.s;
    let t2_z = -t2 * a * zinv + e2 * r2 * s2.ds_dz * zinv;
    let t2_a = e2 * ((ipi - lz) * r2 * s2.s - r2d * s2.s + r2 * s2.ds_da);

    let lossy = s1.min_term.max(s2.min_term) > SWITCH_TERM;
    let out = Local { f: gb * (t1 + t2), df: gb * (t1_z + t2_z), g: gb * (t1_a + t2_a), dg: C::new(0.0, 0.0) };
    Ok((out, lossy))
}

fn finish(a: C, b: C, zeta: C, l: Local, method: KummerMethod, lossy: bool) -> Result<KummerEval> {
    for v in [l.f, l.df, l.g] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Overflow(format!("Phi({a}, {b}, {zeta})")));
        }
    }
    Ok(KummerEval { a, b, zeta, value: l.f, dz: l.df, da: l.g, method, loss_of_accuracy: lossy })
}

/// Evaluates `Φ` and both derivatives with an explicitly chosen representation.
pub fn kummer_eval_with(a: C, b: C, zeta: C, method: KummerMethod) -> Result<KummerEval> {
    check_params(a, b, zeta)?;
    let r = zeta.norm();
    let (local, lossy) = match method {
        KummerMethod::Series => series(a, b, zeta),
        KummerMethod::Continuation if r > series_radius(a) => continuation(a, b, zeta),
        KummerMethod::Continuation => series(a, b, zeta),
        KummerMethod::Asymptotic => {
            if r == 0.0 {
                return Err(Error::Domain("large-argument expansion at zeta = 0".into()));
            }
            asymptotic(a, b, zeta)?
        }
    };
    finish(a, b, zeta, local, method, lossy)
}

/// Picks the representation for `(a, b, ζ)`.
pub fn choose_method(a: C, b: C, zeta: C) -> KummerMethod {
    let r = zeta.norm();
    if r <= series_radius(a) {
        KummerMethod::Series
    } else if asymptotic_min_term(a, b, 0.5 * r) <= SWITCH_TERM {
        KummerMethod::Asymptotic
    } else {
        KummerMethod::Continuation
    }
}

/// `Φ(a, b, ζ)` with `∂Φ/∂ζ` and `∂Φ/∂a`.
pub fn kummer_phi(a: C, b: C, zeta: C) -> Result<KummerEval> {
    check_params(a, b, zeta)?;
    kummer_eval_with(a, b, zeta, choose_method(a, b, zeta))
}

pub fn kummer_phi_dz(a: C, b: C, zeta: C) -> Result<C> {
    Ok(kummer_phi(a, b, zeta)?.dz)
}

pub fn kummer_phi_da(a: C, b: C, zeta: C) -> Result<C> {
    Ok(kummer_phi(a, b, zeta)?.da)
}
