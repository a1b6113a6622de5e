//! Complex Gamma and digamma by recurrence up to `|w| >= 15` followed by the
//! Stirling series, with reflection into the right half plane.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const SHIFT_RADIUS: f64 = 15.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2m} / (2m (2m-1))
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// B_{2m} / (2m)
const DIGAMMA: [f64; 7] =
    [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32_760.0, 1.0 / 12.0];

/// `Some(m)` when `w = -m` for an integer `m >= 0`.
pub fn nonpositive_integer(w: Complex64) -> Option<u64> {
    if w.im == 0.0 && w.re <= 0.0 && w.re == w.re.round() {
        Some((-w.re) as u64)
    } else {
        None
    }
}

/// `sin(πw)` with the real part reduced first so that zeros are exact.
fn sin_pi(w: Complex64) -> Complex64 {
    let n = w.re.round();
    let s = (Complex64::new(w.re - n, w.im) * PI).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn cot_pi(w: Complex64) -> Complex64 {
    let n = w.re.round();
    let v = Complex64::new(w.re - n, w.im) * PI;
    v.cos() / v.sin()
}

fn ln_gamma_stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

/// `Γ(w)` for `Re w >= 1/2`.
fn gamma_right(w: Complex64) -> Complex64 {
    let mut v = w;
    let mut prod = Complex64::new(1.0, 0.0);
    while v.norm() < SHIFT_RADIUS {
        prod *= v;
        v += 1.0;
    }
    ln_gamma_stirling(v).exp() / prod
}

/// Complex Gamma function.
pub fn gamma(w: Complex64) -> Result<Complex64> {
    if let Some(m) = nonpositive_integer(w) {
        return Err(Error::Pole(format!("-{m}")));
    }
    let g = if w.re < 0.5 { Complex64::new(PI, 0.0) / (sin_pi(w) * gamma_right(1.0 - w)) } else { gamma_right(w) };
    if g.re.is_finite() && g.im.is_finite() {
        Ok(g)
    } else {
        Err(Error::Overflow(format!("Gamma({w})")))
    }
}

/// `1/Γ(w)`, entire: zero at the poles of `Γ`.
pub fn rgamma(w: Complex64) -> Complex64 {
    if nonpositive_integer(w).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if w.re < 0.5 {
        sin_pi(w) * gamma_right(1.0 - w) / PI
    } else {
        gamma_right(w).inv()
    }
}

/// `d/dw [1/Γ(w)] = -ψ(w)/Γ(w)`, continued through the poles where it
/// equals `(-1)^m m!` at `w = -m`.
pub fn rgamma_deriv(w: Complex64) -> Complex64 {
    match nonpositive_integer(w) {
        Some(m) => {
            let f: f64 = (1..=m).map(|i| i as f64).product();
            Complex64::new(if m % 2 == 0 { f } else { -f }, 0.0)
        }
        None => -digamma(w).expect("not a pole") * rgamma(w),
    }
}

/// Complex digamma `ψ(w) = Γ'(w)/Γ(w)`.
pub fn digamma(w: Complex64) -> Result<Complex64> {
    if let Some(m) = nonpositive_integer(w) {
        return Err(Error::Pole(format!("-{m}")));
    }
    if w.re < 0.5 {
        return Ok(digamma(1.0 - w)? - cot_pi(w) * PI);
    }
    let mut v = w;
    let mut acc = Complex64::new(0.0, 0.0);
    while v.norm() < SHIFT_RADIUS {
        acc -= v.inv();
        v += 1.0;
    }
    let inv2 = (v * v).inv();
    let mut p = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for c in DIGAMMA {
        series += p * c;
        p *= inv2;
    }
    Ok(acc + v.ln() - 0.5 * v.inv() - series)
}
