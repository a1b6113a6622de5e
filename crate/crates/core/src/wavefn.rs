//! Pair Coulomb wave, the BBK product, the screen-shifted form `chi_j` and
//! the glued field `psi_as`.
//!
//! Every three-body field `Ψ` here has the form `e^{i<z,q>} F(z)` with a
//! slowly varying envelope `F`; the `*_envelope` functions return `F`
//! (including the constant `N_0`) and the plain functions return `Ψ`.

use crate::error::{Error, Result};
use crate::kinematics::{partition_weights, JacobiConfig, JacobiMomentum, Pair};
use crate::specfun::{digamma, gamma, kummer_phi, KummerEval};
use crate::vec3::{CVec3, Vec3};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// `(2π)^{-3/2}`
pub const PLANE_WAVE_NORM: f64 = 0.063_493_635_934_240_97;

fn check_k(k: &Vec3) -> Result<f64> {
    let kn = k.norm();
    if kn > 0.0 && kn.is_finite() {
        Ok(kn)
    } else {
        Err(Error::Domain(format!("pair momentum must be nonzero and finite, got {kn}")))
    }
}

/// Sommerfeld parameter `η = α/(2k)`.
pub fn sommerfeld(alpha: f64, k: f64) -> f64 {
    alpha / (2.0 * k)
}

/// `N_c(η) = (2π)^{-3/2} e^{-πη/2} Γ(1+iη)`.
pub fn norm_const(eta: f64) -> Result<C> {
    Ok(gamma(C::new(1.0, eta))? * (PLANE_WAVE_NORM * (-0.5 * PI * eta).exp()))
}

/// Principal `√<x,x>`, with the cut on the negative real axis rejected.
pub fn complex_magnitude(x: &CVec3) -> Result<C> {
    let s = x.dot_self();
    if s.im == 0.0 && s.re < 0.0 {
        return Err(Error::Branch(format!("<x,x> = {s} lies on the negative real axis")));
    }
    Ok(s.sqrt())
}

fn kummer_d(x: &CVec3, k: &Vec3, alpha: f64) -> Result<KummerEval> {
    let kn = check_k(k)?;
    let eta = sommerfeld(alpha, kn);
    let xm = complex_magnitude(x)?;
    let zeta = C::i() * (xm * kn - x.dot_real(k));
    kummer_phi(C::new(0.0, -eta), C::new(1.0, 0.0), zeta)
}

/// `D(x, k) = Φ(-iη, 1, i(k x - <x,k>))` for real or complex `x`.
pub fn coulomb_d(x: &CVec3, k: &Vec3, alpha: f64) -> Result<C> {
    Ok(kummer_d(x, k, alpha)?.value)
}

/// How `∇_k ψ_c / ψ_c` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GradMethod {
    #[default]
    Analytic,
    /// Five-point central differences in each component of `k`.
    Numeric,
}

/// The pair wave `ψ_c(x, k)` at one point with what is needed for its
/// logarithmic `k`-gradient.
#[derive(Clone, Copy, Debug)]
pub struct PairWave {
    pub x: Vec3,
    pub k: Vec3,
    pub alpha: f64,
    pub value: C,
    pub eta: f64,
    pub norm_const: C,
    pub kummer: KummerEval,
}

/// `ψ_c(x, k) = N_c e^{i<x,k>} D(x, k)`.
pub fn psi_c(x: &Vec3, k: &Vec3, alpha: f64) -> Result<PairWave> {
    let kn = check_k(k)?;
    let eta = sommerfeld(alpha, kn);
    let nc = norm_const(eta)?;
    let kummer = kummer_d(&x.to_complex(), k, alpha)?;
    let value = nc * C::from_polar(1.0, x.dot(k)) * kummer.value;
    Ok(PairWave { x: *x, k: *k, alpha, value, eta, norm_const: nc, kummer })
}

impl PairWave {
    fn check_nonzero(&self) -> Result<()> {
        if self.value.norm() < 1e-12 * self.norm_const.norm() {
            Err(Error::NearZeroWave)
        } else {
            Ok(())
        }
    }

    /// `∇_k ψ_c / ψ_c` from the closed form.
    pub fn loggrad_k(&self) -> Result<CVec3> {
        self.check_nonzero()?;
        let kn = self.k.norm();
        let khat = self.k * (1.0 / kn);
        let deta = -self.alpha / (2.0 * kn * kn); // along k̂
        let dln_nc = (C::new(-0.5 * PI, 0.0) + C::i() * digamma(C::new(1.0, self.eta))?) * deta;
        let phi = self.kummer.value;
        let a_part = self.kummer.da * C::new(0.0, -deta) / phi;
        let z_part = self.kummer.dz * C::i() / phi; // times (|x| k̂ - x)
        let xn = self.x.norm();
        let mut out = [C::new(0.0, 0.0); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = C::new(0.0, self.x[i]) + (dln_nc + a_part) * khat[i] + z_part * (xn * khat[i] - self.x[i]);
        }
        Ok(CVec3(out))
    }
}

/// `∇_k ψ_c / ψ_c` at `(x, k)`.
pub fn psi_c_loggrad_k(x: &Vec3, k: &Vec3, alpha: f64, method: GradMethod) -> Result<CVec3> {
    let wave = psi_c(x, k, alpha)?;
    match method {
        GradMethod::Analytic => wave.loggrad_k(),
        GradMethod::Numeric => {
            wave.check_nonzero()?;
            let h = 1e-3 * k.norm();
            let mut out = [C::new(0.0, 0.0); 3];
            for (i, o) in out.iter_mut().enumerate() {
                let mut e = Vec3::ZERO;
                e.0[i] = h;
                let f = |s: f64| psi_c(x, &(*k + e * s), alpha).map(|w| w.value);
                let d = (f(-2.0)? - f(2.0)? + (f(1.0)? - f(-1.0)?) * 8.0) / (12.0 * h);
                *o = d / wave.value;
            }
            Ok(CVec3(out))
        }
    }
}

/// `N_0 = Π_j N_c(η_j)`.
pub fn bbk_norm(q: &JacobiMomentum, alpha: f64) -> Result<C> {
    let mut n = C::new(1.0, 0.0);
    for j in Pair::ALL {
        let kn = check_k(&q.frame(j).0)?;
        n *= norm_const(sommerfeld(alpha, kn))?;
    }
    Ok(n)
}

fn plane(z: &JacobiConfig, q: &JacobiMomentum) -> C {
    C::from_polar(1.0, z.dot(q))
}

/// `N_0 Π_j D(x_j, k_j)`.
pub fn bbk_envelope(z: &JacobiConfig, q: &JacobiMomentum, alpha: f64) -> Result<C> {
    let mut f = bbk_norm(q, alpha)?;
    for j in Pair::ALL {
        let (xj, _) = z.frame(j);
        let (kj, _) = q.frame(j);
        f *= coulomb_d(&xj.to_complex(), &kj, alpha)?;
    }
    Ok(f)
}

/// `Ψ^BBK(z, q) = N_0 e^{i<z,q>} Π_j D(x_j, k_j)`.
pub fn bbk(z: &JacobiConfig, q: &JacobiMomentum, alpha: f64) -> Result<C> {
    Ok(bbk_envelope(z, q, alpha)? * plane(z, q))
}

/// Splits `Ψ^BBK = ψ_c(x_j, k_j) · Ψ_1` near screen `j`; returns `(ψ_c, Ψ_1)`.
pub fn bbk_screen_factor(z: &JacobiConfig, q: &JacobiMomentum, pair: Pair, alpha: f64) -> Result<(C, C)> {
    let (xj, yj) = z.frame(pair);
    let (kj, pj) = q.frame(pair);
    let wave = psi_c(&xj, &kj, alpha)?;
    let mut psi1 = C::from_polar(1.0, yj.dot(&pj));
    for s in [pair.next(), pair.next().next()] {
        let (xs, _) = z.frame(s);
        let (ks, _) = q.frame(s);
        psi1 *= norm_const(sommerfeld(alpha, check_k(&ks)?))? * coulomb_d(&xs.to_complex(), &ks, alpha)?;
    }
    Ok((wave.value, psi1))
}

/// Complex spectator coordinates of screen `j`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftedCoords {
    /// The two spectator pairs `(j+1, j+2)`.
    pub pairs: (Pair, Pair),
    pub x_tilde: [CVec3; 2],
    /// Principal `√<x̃,x̃>`.
    pub x_mag: [C; 2],
    /// `∇_k ψ_c / ψ_c` at `(x_j, k_j)`, shared by both spectators.
    pub loggrad: CVec3,
}

/// `x̃_{j+1} = -(√3/2) y_j + (i/2) g`, `x̃_{j+2} = (√3/2) y_j + (i/2) g`
/// with `g = ∇_k ψ_c(x_j, k_j) / ψ_c(x_j, k_j)`.
pub fn x_tilde(z: &JacobiConfig, q: &JacobiMomentum, pair: Pair, alpha: f64) -> Result<ShiftedCoords> {
    let (xj, yj) = z.frame(pair);
    let (kj, _) = q.frame(pair);
    let g = psi_c(&xj, &kj, alpha)?.loggrad_k()?;
    shifted_from(pair, yj, g)
}

fn shifted_from(pair: Pair, yj: Vec3, g: CVec3) -> Result<ShiftedCoords> {
    let half_ig = g.scale(C::new(0.0, 0.5));
    let a = CVec3::from(yj * -HALF_SQRT3) + half_ig;
    let b = CVec3::from(yj * HALF_SQRT3) + half_ig;
    Ok(ShiftedCoords {
        pairs: pair.spectators(),
        x_mag: [complex_magnitude(&a)?, complex_magnitude(&b)?],
        x_tilde: [a, b],
        loggrad: g,
    })
}

/// Envelope of `chi_j`: `N_0 D(x_j, k_j) D(x̃_{j+1}, k_{j+1}) D(x̃_{j+2}, k_{j+2})`.
pub fn chi_envelope(z: &JacobiConfig, q: &JacobiMomentum, pair: Pair, alpha: f64) -> Result<C> {
    let (xj, yj) = z.frame(pair);
    let (kj, _) = q.frame(pair);
    let wave = psi_c(&xj, &kj, alpha)?;
    let shifted = shifted_from(pair, yj, wave.loggrad_k()?)?;
    let mut f = bbk_norm(q, alpha)? * wave.kummer.value;
    let (s1, s2) = shifted.pairs;
    for (s, xt) in [(s1, &shifted.x_tilde[0]), (s2, &shifted.x_tilde[1])] {
        f *= coulomb_d(xt, &q.frame(s).0, alpha)?;
    }
    Ok(f)
}

/// `chi_j(z, q) = N_0 e^{i<z,q>} D(x_j, k_j) D(x̃_{j+1}, k_{j+1}) D(x̃_{j+2}, k_{j+2})`.
pub fn chi(z: &JacobiConfig, q: &JacobiMomentum, pair: Pair, alpha: f64) -> Result<C> {
    Ok(chi_envelope(z, q, pair, alpha)? * plane(z, q))
}

/// Envelope of `Ψ^as = Σ_j ζ_0j chi_j + ζ_0 Ψ^BBK`. Terms with zero weight are skipped.
pub fn psi_as_envelope(z: &JacobiConfig, q: &JacobiMomentum, alpha: f64, mu: f64, nu: f64) -> Result<C> {
    let w = partition_weights(z, mu, nu)?;
    let mut f = C::new(0.0, 0.0);
    for j in Pair::ALL {
        let wj = w.zeta0j[j.index()];
        if wj != 0.0 {
            f += chi_envelope(z, q, j, alpha)? * wj;
        }
    }
    if w.zeta0 != 0.0 {
        f += bbk_envelope(z, q, alpha)? * w.zeta0;
    }
    Ok(f)
}

pub fn psi_as(z: &JacobiConfig, q: &JacobiMomentum, alpha: f64, mu: f64, nu: f64) -> Result<C> {
    Ok(psi_as_envelope(z, q, alpha, mu, nu)? * plane(z, q))
}
