//! Coefficient algebra of the near-screen asymptotics and a numerical check
//! of the weak (distributional) large-`x` limit of the pair wave.
//!
//! For screen `j` the spectator pairs are `(j+1, j+2)`, written `2` and `3`
//! below as for `j = 1`.

use crate::error::{Error, Result};
use crate::kinematics::{JacobiConfig, JacobiMomentum, Pair};
use crate::specfun::gamma;
use crate::vec3::Vec3;
use crate::wavefn::{psi_c, sommerfeld, PLANE_WAVE_NORM};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const TWO_PI_CUBED_INV: f64 = 1.0 / (8.0 * PI * PI * PI);

fn unit(v: &Vec3, what: &str) -> Result<Vec3> {
    v.unit().ok_or_else(|| Error::Domain(format!("{what} must be nonzero")))
}

/// `k^{iη} = e^{iη ln k}`.
fn cpow_i(base: f64, eta: f64) -> C {
    C::from_polar(1.0, eta * base.ln())
}

/// Coefficients of the weak asymptotics of `Ψ_1` as `y_j → ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScreenAsymCoeffs {
    pub z2p: f64,
    pub z2m: f64,
    pub z3p: f64,
    pub z3m: f64,
    pub v2p: f64,
    pub v2m: f64,
    pub v3p: f64,
    pub v3m: f64,
    pub omega: f64,
    pub b0: C,
    pub eta2: f64,
    pub eta3: f64,
}

/// `Z_2^± = (√3/2)(1 ± <p̂,k̂_2>)`, `Z_3^± = (√3/2)(1 ∓ <p̂,k̂_3>)`,
/// `V_2^± = <x̂, k̂_2 ± p̂>`, `V_3^± = <x̂, k̂_3 ∓ p̂>`,
/// `ω = η_2 + η_3`, `B_0 = -(2π)^{-3} k_2^{iη_2} k_3^{iη_3}`.
pub fn screen_coeffs(q: &JacobiMomentum, xhat: &Vec3, phat: &Vec3, pair: Pair, alpha: f64) -> Result<ScreenAsymCoeffs> {
    let (s2, s3) = pair.spectators();
    screen_coeffs_from_parts(&q.frame(s2).0, &q.frame(s3).0, xhat, phat, alpha)
}

pub fn screen_coeffs_from_parts(
    k2: &Vec3,
    k3: &Vec3,
    xhat: &Vec3,
    phat: &Vec3,
    alpha: f64,
) -> Result<ScreenAsymCoeffs> {
    let (k2n, k3n) = (k2.norm(), k3.norm());
    let k2h = unit(k2, "k_2")?;
    let k3h = unit(k3, "k_3")?;
    let (c2, c3) = (phat.dot(&k2h), phat.dot(&k3h));
    let h = 0.5 * SQRT3;
    let (eta2, eta3) = (sommerfeld(alpha, k2n), sommerfeld(alpha, k3n));
    Ok(ScreenAsymCoeffs {
        z2p: h * (1.0 + c2),
        z2m: h * (1.0 - c2),
        z3p: h * (1.0 - c3),
        z3m: h * (1.0 + c3),
        v2p: xhat.dot(&(k2h + *phat)),
        v2m: xhat.dot(&(k2h - *phat)),
        v3p: xhat.dot(&(k3h - *phat)),
        v3m: xhat.dot(&(k3h + *phat)),
        omega: eta2 + eta3,
        b0: -cpow_i(k2n, eta2) * cpow_i(k3n, eta3) * TWO_PI_CUBED_INV,
        eta2,
        eta3,
    })
}

fn log_phase(eta: f64, zc: f64, v: f64, ratio: f64) -> Result<C> {
    let arg = zc + 0.5 * ratio * v;
    if arg <= 0.0 {
        return Err(Error::Domain(format!("logarithm of Z + (x/2y)V = {arg} <= 0")));
    }
    Ok(C::from_polar(1.0, eta * arg.ln()))
}

/// Coefficients of `δ(p̂_j, -ŷ_j)` (incoming) and `δ(p̂_j, ŷ_j)` (outgoing)
/// in the weak asymptotics of `Ψ_1` at the point `z`.
pub fn psi1_weak_amplitudes(z: &JacobiConfig, q: &JacobiMomentum, pair: Pair, alpha: f64) -> Result<(C, C)> {
    let (xj, yj) = z.frame(pair);
    let (_, pj) = q.frame(pair);
    let (x, y, p) = (xj.norm(), yj.norm(), pj.norm());
    if y == 0.0 {
        return Err(Error::Domain("weak asymptotics need y_j > 0".into()));
    }
    let phat = unit(&pj, "p_j")?;
    let xhat = xj.unit().unwrap_or(Vec3::ZERO);
    let c = screen_coeffs(q, &xhat, &phat, pair, alpha)?;
    let ratio = x / y;
    let pre = c.b0 * C::new(0.0, -2.0 * PI / (y * p)) * C::from_polar(1.0, c.omega * y.ln());
    let amp_in = pre
        * C::from_polar(1.0, -y * p)
        * log_phase(c.eta2, c.z2m, c.v2m, ratio)?
        * log_phase(c.eta3, c.z3m, c.v3m, ratio)?;
    let amp_out = -pre
        * C::from_polar(1.0, y * p)
        * log_phase(c.eta2, c.z2p, c.v2p, ratio)?
        * log_phase(c.eta3, c.z3p, c.v3p, ratio)?;
    Ok((amp_in, amp_out))
}

/// Scalar and vector coefficients of the kernel `R(q, q')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RKernelCoeffs {
    pub a: f64,
    pub b: f64,
    pub omega: f64,
    pub a_in: C,
    pub a_out: C,
    pub b_in: Vec3,
    pub b_out: Vec3,
    pub omega_in: Vec3,
    pub omega_out: Vec3,
    pub b0_in: C,
    pub b0_out: C,
    pub khat: Vec3,
    /// `|k|`
    pub k: f64,
}

impl RKernelCoeffs {
    /// `<B_in, k̂>`; zero under the orthogonality reading.
    pub fn b_in_along_k(&self) -> f64 {
        self.b_in.dot(&self.khat)
    }

    pub fn b_out_along_k(&self) -> f64 {
        self.b_out.dot(&self.khat)
    }

    /// `(p/k²) k̂ + Ω_out/(b k)`: the outgoing vector with the opposite sign
    /// on `Ω_out`, which is orthogonal to `k̂` when the spectator momenta
    /// come from the same Jacobi momentum.
    pub fn b_out_flipped(&self) -> Vec3 {
        self.b_out + self.omega_out * (2.0 / (self.b * self.k))
    }

    /// `(B_in, B_out)` with their `k̂` components removed.
    pub fn projected(&self) -> (Vec3, Vec3) {
        let k = self.khat;
        (self.b_in - k * self.b_in.dot(&k), self.b_out - k * self.b_out.dot(&k))
    }
}

pub fn rkernel_coeffs(q: &JacobiMomentum, pair: Pair, alpha: f64) -> Result<RKernelCoeffs> {
    let (k, p) = q.frame(pair);
    let (s2, s3) = pair.spectators();
    rkernel_coeffs_from_parts(&k, &p, &q.frame(s2).0, &q.frame(s3).0, alpha)
}

/// Same as [`rkernel_coeffs`] with the pair momentum `k`, the complementary
/// momentum `p` and the spectator momenta `k_2`, `k_3` given independently.
pub fn rkernel_coeffs_from_parts(k: &Vec3, p: &Vec3, k2: &Vec3, k3: &Vec3, alpha: f64) -> Result<RKernelCoeffs> {
    let (kn, pn) = (k.norm(), p.norm());
    let khat = unit(k, "k")?;
    let phat = unit(p, "p")?;
    let k2h = unit(k2, "k_2")?;
    let k3h = unit(k3, "k_3")?;
    let (eta2, eta3) = (sommerfeld(alpha, k2.norm()), sommerfeld(alpha, k3.norm()));
    let omega = eta2 + eta3;
    let shift = 2.0 * alpha / (SQRT3 * pn);
    let (a, b) = (omega - shift, omega + shift);
    let (c2, c3) = (phat.dot(&k2h), phat.dot(&k3h));
    for (d, what) in
        [(1.0 - c2, "1 - <p,k_2>"), (1.0 + c2, "1 + <p,k_2>"), (1.0 - c3, "1 - <p,k_3>"), (1.0 + c3, "1 + <p,k_3>")]
    {
        if d == 0.0 {
            return Err(Error::Singular(what.into()));
        }
    }
    let h = 0.5 * SQRT3;
    let kk = cpow_i(k2.norm(), eta2) * cpow_i(k3.norm(), eta3) * TWO_PI_CUBED_INV;
    let b0_in = cpow_i(h * (1.0 - c2), eta2) * cpow_i(h * (1.0 + c3), eta3) * kk;
    let b0_out = cpow_i(h * (1.0 + c2), eta2) * cpow_i(h * (1.0 - c3), eta3) * kk;
    let omega_in = ((k2h - phat) * (eta2 / (1.0 - c2)) + (k3h + phat) * (eta3 / (1.0 + c3))) * (1.0 / SQRT3);
    let omega_out = ((k2h + phat) * (eta2 / (1.0 + c2)) + (k3h - phat) * (eta3 / (1.0 - c3))) * (1.0 / SQRT3);
    if a == 0.0 {
        return Err(Error::Singular("a = 0".into()));
    }
    if b == 0.0 {
        return Err(Error::Singular("b = 0".into()));
    }
    let k_over_pi_i = C::new(0.0, -kn / PI);
    let a_in = -k_over_pi_i * gamma(C::new(1.0, -a))? * (0.5 * PI * a).exp() * b0_in;
    let a_out = k_over_pi_i * gamma(C::new(1.0, -b))? * (-0.5 * PI * b).exp() * b0_out;
    let along = khat * (pn / (kn * kn));
    Ok(RKernelCoeffs {
        a,
        b,
        omega,
        a_in,
        a_out,
        b_in: along - omega_in * (1.0 / (a * kn)),
        b_out: along - omega_out * (1.0 / (b * kn)),
        omega_in,
        omega_out,
        b0_in,
        b0_out,
        khat,
        k: kn,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for m in 2..=n {
                let mf = m as f64;
                let p2 = ((2.0 * mf - 1.0) * t * p1 - (mf - 1.0) * p0) / mf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Result of the weak-limit comparison at one radius.
#[derive(Clone, Copy, Debug)]
pub struct WeakCheckRecord {
    pub radius: f64,
    /// `∫ ψ_c(X x̂, k) f(x̂) dx̂` at `X = radius`.
    pub sphere_integral: C,
    /// Fitted coefficient of `e^{-ikX + iη ln X} / X`.
    pub extracted_in: C,
    pub predicted_in: C,
    /// Fitted coefficient of `e^{ikX - iη ln X} / X`.
    pub extracted_out: C,
    /// Available when `f` vanishes near the forward direction.
    pub predicted_out: Option<C>,
    pub rel_mismatch: f64,
}

fn orthonormal_frame(khat: Vec3) -> (Vec3, Vec3) {
    let seed = if khat[0].abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
    let e1 = (seed - khat * seed.dot(&khat)).unit().expect("independent seed");
    (e1, khat.cross(&e1))
}

const AZIMUTH_POINTS: usize = 64;

/// `F(u) = ∫ f(x̂) dφ` over the circle `<x̂, k̂> = u`.
fn azimuthal<F: Fn(Vec3) -> C + Sync>(f: &F, khat: Vec3, e1: Vec3, e2: Vec3, u: f64) -> C {
    let s = (1.0 - u * u).max(0.0).sqrt();
    let mut acc = C::new(0.0, 0.0);
    for m in 0..AZIMUTH_POINTS {
        let phi = 2.0 * PI * m as f64 / AZIMUTH_POINTS as f64;
        acc += f(khat * u + e1 * (s * phi.cos()) + e2 * (s * phi.sin()));
    }
    acc * (2.0 * PI / AZIMUTH_POINTS as f64)
}

fn sphere_integral_n<F: Fn(Vec3) -> C + Sync>(k: &Vec3, alpha: f64, radius: f64, f: &F, n: usize) -> Result<C> {
    let khat = unit(k, "k")?;
    let (e1, e2) = orthonormal_frame(khat);
    let (nodes, weights) = gauss_legendre(n);
    let terms: Vec<Result<C>> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&u, &w)| {
            let wave = psi_c(&(khat * (radius * u) + e1 * (radius * (1.0 - u * u).max(0.0).sqrt())), k, alpha)?;
            Ok(wave.value * azimuthal(f, khat, e1, e2, u) * w)
        })
        .collect();
    let mut acc = C::new(0.0, 0.0);
    for t in terms {
        acc += t?;
    }
    Ok(acc)
}

/// `∫ ψ_c(X x̂, k) f(x̂) dx̂` by Gauss–Legendre in `u = <x̂, k̂>` and the
/// trapezoid rule in azimuth; the node count doubles until two successive
/// estimates agree.
pub fn sphere_integral<F: Fn(Vec3) -> C + Sync>(k: &Vec3, alpha: f64, radius: f64, f: &F) -> Result<C> {
    let mut n = (1.5 * k.norm() * radius) as usize + 100;
    let mut coarse = sphere_integral_n(k, alpha, radius, f, n)?;
    for _ in 0..4 {
        let fine = sphere_integral_n(k, alpha, radius, f, 2 * n)?;
        let scale = fine.norm().max(PLANE_WAVE_NORM / (k.norm() * radius));
        if (fine - coarse).norm() <= 1e-8 * scale {
            return Ok(fine);
        }
        coarse = fine;
        n *= 2;
    }
    Err(Error::Quadrature(format!("sphere integral at X = {radius} not converged with {n} nodes")))
}

/// Classical Coulomb scattering amplitude
/// `f(θ) = -η/(2k sin²(θ/2)) exp(-iη ln sin²(θ/2) + 2iσ_0)`, `σ_0 = arg Γ(1+iη)`.
pub fn coulomb_amplitude(k: f64, alpha: f64, cos_theta: f64) -> Result<C> {
    let eta = sommerfeld(alpha, k);
    let s2 = 0.5 * (1.0 - cos_theta);
    if s2 <= 0.0 {
        return Err(Error::Singular("forward Coulomb amplitude".into()));
    }
    let sigma0 = gamma(C::new(1.0, eta))?.arg();
    Ok(C::from_polar(-eta / (2.0 * k * s2), -eta * s2.ln() + 2.0 * sigma0))
}

/// Compares the weak large-`X` limit of `ψ_c(X x̂, k)` tested against `f`
/// with the two-delta prediction, at each requested radius.
///
/// The incoming and outgoing coefficients are fitted from four radii
/// `X + m π/(2k)`, `m = 0..3`. `forward_free` declares that `f` vanishes
/// for `<x̂, k̂> >= 0.9`, which enables the outgoing prediction.
pub fn twobody_weak_check<F: Fn(Vec3) -> C + Sync>(
    k: &Vec3,
    alpha: f64,
    radii: &[f64],
    f: &F,
    forward_free: bool,
) -> Result<Vec<WeakCheckRecord>> {
    let kn = k.norm();
    let khat = unit(k, "k")?;
    let eta = sommerfeld(alpha, kn);
    let log2k = (2.0 * kn).ln();
    let predicted_in = C::new(0.0, 2.0 * PI / kn) * f(-khat) * C::from_polar(PLANE_WAVE_NORM, eta * log2k);
    let predicted_out = if forward_free {
        let (e1, e2) = orthonormal_frame(khat);
        let (nodes, weights) = gauss_legendre(400);
        let mut acc = C::new(0.0, 0.0);
        for (&u, &w) in nodes.iter().zip(&weights) {
            // u in [-1, 1] onto [-1, 0.9]
            let v = 0.95 * u - 0.05;
            acc += azimuthal(f, khat, e1, e2, v) * coulomb_amplitude(kn, alpha, v)? * (w * 0.95);
        }
        Some(acc * C::from_polar(PLANE_WAVE_NORM, -eta * log2k))
    } else {
        None
    };
    let mut out = Vec::with_capacity(radii.len());
    for &x0 in radii {
        let mut rows = Vec::with_capacity(4);
        let mut first = C::new(0.0, 0.0);
        for m in 0..4 {
            let x = x0 + m as f64 * PI / (2.0 * kn);
            let val = sphere_integral(k, alpha, x, f)?;
            if m == 0 {
                first = val;
            }
            let ph = -kn * x + eta * x.ln();
            rows.push((C::from_polar(1.0, ph), C::from_polar(1.0, -ph), val * x));
        }
        let (ext_in, ext_out) = lstsq2(&rows)?;
        let rel_mismatch = (ext_in - predicted_in).norm() / predicted_in.norm().max(1e-300);
        out.push(WeakCheckRecord {
            radius: x0,
            sphere_integral: first,
            extracted_in: ext_in,
            predicted_in,
            extracted_out: ext_out,
            predicted_out,
            rel_mismatch,
        });
    }
    Ok(out)
}

/// Complex least squares for `c ≈ A u + B v`.
fn lstsq2(rows: &[(C, C, C)]) -> Result<(C, C)> {
    let (mut uu, mut uv, mut vv, mut uc, mut vc) = (0.0, C::new(0.0, 0.0), 0.0, C::new(0.0, 0.0), C::new(0.0, 0.0));
    for &(u, v, c) in rows {
        uu += u.norm_sqr();
        vv += v.norm_sqr();
        uv += u.conj() * v;
        uc += u.conj() * c;
        vc += v.conj() * c;
    }
    let det = uu * vv - uv.norm_sqr();
    if det.abs() < 1e-12 * uu * vv {
        return Err(Error::Singular("weak-limit extraction matrix".into()));
    }
    let a = (uc * vv - uv * vc) / det;
    let b = (vc * uu - uv.conj() * uc) / det;
    Ok((a, b))
}
