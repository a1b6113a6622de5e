//! Jacobi frames on the centre-of-mass space, screen regions and the
//! partition of unity that glues the near-screen and far-field forms.
//!
//! Points are stored in the pair-1 frame `(x, y)`. Frame `j` is reached by a
//! fixed rotation of the `(x, y)` block:
//!
//! ```text
//! x_j =  c_j x + s_j y        (c_j, s_j) = (1, 0), (-1/2, -√3/2), (-1/2, √3/2)
//! y_j = -s_j x + c_j y
//! ```
//!
//! so that `x_2 = -(√3/2) y - x/2` and `x_3 = (√3/2) y - x/2`, and the same
//! relation holds cyclically from any frame to the next two.

use crate::error::{Error, Result};
use crate::vec3::Vec3;
use std::fmt;

const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// Label of a particle pair (and of its screen `x_j = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pair {
    One,
    Two,
    Three,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::One, Pair::Two, Pair::Three];

    /// Zero-based index.
    pub fn index(self) -> usize {
        match self {
            Pair::One => 0,
            Pair::Two => 1,
            Pair::Three => 2,
        }
    }

    pub fn from_index(i: usize) -> Pair {
        Pair::ALL[i % 3]
    }

    /// The next pair in cyclic order (1 → 2 → 3 → 1).
    pub fn next(self) -> Pair {
        Pair::from_index(self.index() + 1)
    }

    /// The two other pairs `(j+1, j+2)`, ordered so that from frame `j`
    /// the first sits at `-(√3/2) y_j - x_j/2` and the second at `+(√3/2) y_j - x_j/2`.
    pub fn spectators(self) -> (Pair, Pair) {
        (self.next(), self.next().next())
    }

    fn rotation(self) -> (f64, f64) {
        match self {
            Pair::One => (1.0, 0.0),
            Pair::Two => (-0.5, -HALF_SQRT3),
            Pair::Three => (-0.5, HALF_SQRT3),
        }
    }
}

impl TryFrom<u8> for Pair {
    type Error = Error;
    fn try_from(n: u8) -> Result<Pair> {
        match n {
            1 => Ok(Pair::One),
            2 => Ok(Pair::Two),
            3 => Ok(Pair::Three),
            _ => Err(Error::Domain(format!("pair index must be 1, 2 or 3, got {n}"))),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

fn rotate(pair: Pair, a: Vec3, b: Vec3) -> (Vec3, Vec3) {
    let (c, s) = pair.rotation();
    (c * a + s * b, -s * a + c * b)
}

fn unrotate(pair: Pair, a: Vec3, b: Vec3) -> (Vec3, Vec3) {
    let (c, s) = pair.rotation();
    (c * a - s * b, s * a + c * b)
}

/// A point `z` of the configuration space, stored in the pair-1 frame.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JacobiConfig {
    pub x: Vec3,
    pub y: Vec3,
}

impl JacobiConfig {
    pub fn new(x: Vec3, y: Vec3) -> Self {
        JacobiConfig { x, y }
    }

    /// Builds a point from its coordinates `(x_j, y_j)` in frame `j`.
    pub fn from_frame(pair: Pair, xj: Vec3, yj: Vec3) -> Self {
        let (x, y) = unrotate(pair, xj, yj);
        JacobiConfig { x, y }
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        JacobiConfig { x: Vec3([a[0], a[1], a[2]]), y: Vec3([a[3], a[4], a[5]]) }
    }

    pub fn to_array(&self) -> [f64; 6] {
        let (x, y) = (self.x.0, self.y.0);
        [x[0], x[1], x[2], y[0], y[1], y[2]]
    }

    /// `(x_j, y_j)` for the requested pair.
    pub fn frame(&self, pair: Pair) -> (Vec3, Vec3) {
        rotate(pair, self.x, self.y)
    }

    pub fn norm(&self) -> f64 {
        (self.x.norm_sq() + self.y.norm_sq()).sqrt()
    }

    /// `<z, q>`, the same in every frame.
    pub fn dot(&self, q: &JacobiMomentum) -> f64 {
        self.x.dot(&q.k) + self.y.dot(&q.p)
    }
}

/// `pair_frame(z, j)`.
pub fn pair_frame(z: &JacobiConfig, pair: Pair) -> (Vec3, Vec3) {
    z.frame(pair)
}

/// A point `q` of momentum space, dual to [`JacobiConfig`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JacobiMomentum {
    pub k: Vec3,
    pub p: Vec3,
}

impl JacobiMomentum {
    pub fn new(k: Vec3, p: Vec3) -> Self {
        JacobiMomentum { k, p }
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        JacobiMomentum { k: Vec3([a[0], a[1], a[2]]), p: Vec3([a[3], a[4], a[5]]) }
    }

    pub fn to_array(&self) -> [f64; 6] {
        let (k, p) = (self.k.0, self.p.0);
        [k[0], k[1], k[2], p[0], p[1], p[2]]
    }

    pub fn frame(&self, pair: Pair) -> (Vec3, Vec3) {
        rotate(pair, self.k, self.p)
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `λ = |q|²`.
    pub fn energy(&self) -> f64 {
        self.k.norm_sq() + self.p.norm_sq()
    }

    /// Pair momenta `|k_j|` for all three pairs.
    pub fn pair_momenta(&self) -> [f64; 3] {
        Pair::ALL.map(|j| self.frame(j).0.norm())
    }

    /// True when every `|k_j| >= fraction * |q|`, i.e. `q` stays away from
    /// the momentum-space screens.
    pub fn clear_of_screens(&self, fraction: f64) -> bool {
        let q = self.norm();
        self.pair_momenta().iter().all(|&kj| kj >= fraction * q)
    }
}

/// `momentum_frame(q, j)`.
pub fn momentum_frame(q: &JacobiMomentum, pair: Pair) -> (Vec3, Vec3) {
    q.frame(pair)
}

/// Position of a channel relative to its screen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `x_j < y_j^mu`: deep inside the screen neighbourhood.
    Inner,
    /// `y_j^mu <= x_j <= y_j^nu`: where both forms are valid.
    Overlap,
    /// `x_j > y_j^nu`: away from the screen.
    Outer,
}

/// Default glue exponents.
pub const DEFAULT_MU: f64 = 0.6;
pub const DEFAULT_NU: f64 = 0.9;

pub fn check_exponents(mu: f64, nu: f64) -> Result<()> {
    if 0.5 < mu && mu < nu && nu < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("glue exponents must satisfy 1/2 < mu < nu < 1, got mu = {mu}, nu = {nu}")))
    }
}

/// `region_classify`: one label per channel.
pub fn region_classify(z: &JacobiConfig, mu: f64, nu: f64) -> Result<[Region; 3]> {
    check_exponents(mu, nu)?;
    let mut out = [Region::Outer; 3];
    for j in Pair::ALL {
        let (xj, yj) = z.frame(j);
        let (x, y) = (xj.norm(), yj.norm());
        if y <= 1.0 {
            return Err(Error::Domain(format!("region of channel {j} needs |y_{j}| > 1, got {y}")));
        }
        out[j.index()] = if x < y.powf(mu) {
            Region::Inner
        } else if x > y.powf(nu) {
            Region::Outer
        } else {
            Region::Overlap
        };
    }
    Ok(out)
}

/// Values of the partition of unity at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionWeights {
    /// Weight of the far-field (BBK) form.
    pub zeta0: f64,
    /// Weight of the near-screen form of each channel.
    pub zeta0j: [f64; 3],
    pub mu: f64,
    pub nu: f64,
}

impl RegionWeights {
    pub fn sum(&self) -> f64 {
        self.zeta0 + self.zeta0j.iter().sum::<f64>()
    }
}

/// C² quintic step: 0 for `s <= 0`, 1 for `s >= 1`, `S(1-s) = 1 - S(s)`.
pub fn smoothstep5(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// `ρ_j = ln x_j / ln y_j`, extended to `-∞` on the screen and to `+∞` when
/// `y_j <= 1 < x_j` (the point is then outside `V_0j` for every exponent).
pub fn channel_ratio(x: f64, y: f64) -> Result<f64> {
    if y > 1.0 {
        if x <= 0.0 {
            Ok(f64::NEG_INFINITY)
        } else {
            Ok(x.ln() / y.ln())
        }
    } else if x > 1.0 {
        Ok(f64::INFINITY)
    } else {
        Err(Error::Domain(format!("partition of unity undefined with |x_j| = {x} and |y_j| = {y} both <= 1")))
    }
}

/// Screen weight of one channel as a function of `ρ_j`.
pub fn channel_weight(rho: f64, mu: f64, nu: f64) -> f64 {
    1.0 - smoothstep5((rho - mu) / (nu - mu))
}

/// `partition_weights`.
///
/// Where several channels claim the point at once (only possible at small
/// `|z|`), the channel weights are rescaled to sum to one and `zeta0 = 0`.
pub fn partition_weights(z: &JacobiConfig, mu: f64, nu: f64) -> Result<RegionWeights> {
    check_exponents(mu, nu)?;
    let mut zeta0j = [0.0; 3];
    for j in Pair::ALL {
        let (xj, yj) = z.frame(j);
        let rho = channel_ratio(xj.norm(), yj.norm())?;
        zeta0j[j.index()] = channel_weight(rho, mu, nu);
    }
    let s: f64 = zeta0j.iter().sum();
    let zeta0 = if s > 1.0 {
        zeta0j.iter_mut().for_each(|w| *w /= s);
        0.0
    } else {
        1.0 - s
    };
    Ok(RegionWeights { zeta0, zeta0j, mu, nu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn pure_x_into_frame_two() {
        let z = JacobiConfig::new(Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO);
        let (x2, y2) = z.frame(Pair::Two);
        assert!(close(x2, Vec3::new(-0.5, 0.0, 0.0), 1e-15));
        assert!(close(y2, Vec3::new(HALF_SQRT3, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn pure_y_into_frame_three() {
        let z = JacobiConfig::new(Vec3::ZERO, Vec3::new(0.0, 1.0, 0.0));
        let (x3, _) = z.frame(Pair::Three);
        assert!(close(x3, Vec3::new(0.0, 3f64.sqrt() / 2.0, 0.0), 1e-15));
    }

    #[test]
    fn frame_one_is_identity() {
        let q = JacobiMomentum::new(Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO);
        assert_eq!(q.frame(Pair::One), (q.k, q.p));
    }

    #[test]
    fn spectator_relation_is_cyclic() {
        let z = JacobiConfig::new(Vec3::new(0.3, -1.1, 0.7), Vec3::new(2.0, 0.4, -0.9));
        for j in Pair::ALL {
            let (xj, yj) = z.frame(j);
            let (a, b) = j.spectators();
            let xa = -HALF_SQRT3 * yj - 0.5 * xj;
            let xb = HALF_SQRT3 * yj - 0.5 * xj;
            assert!(close(z.frame(a).0, xa, 1e-14), "pair {j}");
            assert!(close(z.frame(b).0, xb, 1e-14), "pair {j}");
        }
    }

    #[test]
    fn region_examples() {
        let mk = |x: f64, y: f64| JacobiConfig::new(Vec3::new(x, 0.0, 0.0), Vec3::new(0.0, y, 0.0));
        let labels = region_classify(&mk(2.0, 1e4), 0.6, 0.9).unwrap();
        assert_eq!(labels[0], Region::Inner);
        let labels = region_classify(&mk(10f64.powf(3.7), 1e4), 0.6, 0.9).unwrap();
        assert_eq!(labels[0], Region::Outer);
        // 10^3.5 sits below y^nu = 10^3.6
        let labels = region_classify(&mk(10f64.powf(3.5), 1e4), 0.6, 0.9).unwrap();
        assert_eq!(labels[0], Region::Overlap);
        let labels = region_classify(&mk(1e3, 1e4), 0.6, 0.9).unwrap();
        assert_eq!(labels[0], Region::Overlap);
    }

    #[test]
    fn region_needs_large_y() {
        let z = JacobiConfig::new(Vec3::new(0.5, 0.0, 0.0), Vec3::new(0.0, 0.5, 0.0));
        assert!(matches!(region_classify(&z, 0.6, 0.9), Err(Error::Domain(_))));
        assert!(matches!(partition_weights(&z, 0.6, 0.9), Err(Error::Domain(_))));
    }

    #[test]
    fn bad_exponents_rejected() {
        let z = JacobiConfig::new(Vec3::new(5.0, 0.0, 0.0), Vec3::new(0.0, 50.0, 0.0));
        assert!(partition_weights(&z, 0.4, 0.9).is_err());
        assert!(partition_weights(&z, 0.8, 0.7).is_err());
        assert!(partition_weights(&z, 0.6, 1.0).is_err());
    }

    #[test]
    fn plateau_weights() {
        // rho_1 = 0.3 with y_1 = 1e4; the other channels are far out.
        let y: f64 = 1e4;
        let x = y.powf(0.3);
        let z = JacobiConfig::new(Vec3::new(x, 0.0, 0.0), Vec3::new(0.0, y, 0.0));
        let w = partition_weights(&z, 0.6, 0.9).unwrap();
        assert_eq!(w.zeta0j, [1.0, 0.0, 0.0]);
        assert_eq!(w.zeta0, 0.0);

        let t = 1e3;
        let z = JacobiConfig::new(Vec3::new(t, 0.2 * t, 0.0), Vec3::new(0.1 * t, 0.0, t));
        let w = partition_weights(&z, 0.6, 0.9).unwrap();
        assert_eq!(w.zeta0, 1.0);
        assert_eq!(w.zeta0j, [0.0; 3]);
    }

    #[test]
    fn midpoint_weight_is_half() {
        let (mu, nu) = (0.6, 0.9);
        let y: f64 = 1e6;
        let x = y.powf(0.5 * (mu + nu));
        let z = JacobiConfig::new(Vec3::new(x, 0.0, 0.0), Vec3::new(0.0, 0.0, y));
        let w = partition_weights(&z, mu, nu).unwrap();
        assert!((w.zeta0j[0] - 0.5).abs() < 1e-12);
        assert!((w.zeta0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn on_screen_is_fully_inner() {
        let z = JacobiConfig::new(Vec3::ZERO, Vec3::new(0.0, 30.0, 0.0));
        let w = partition_weights(&z, DEFAULT_MU, DEFAULT_NU).unwrap();
        assert_eq!(w.zeta0j[0], 1.0);
    }

    #[test]
    fn overlapping_channels_renormalize() {
        // Small z: all three channels claim the point.
        let z = JacobiConfig::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0));
        let w = partition_weights(&z, 0.6, 0.9).unwrap();
        assert!((w.sum() - 1.0).abs() < 1e-15);
        assert!(w.zeta0 >= 0.0 && w.zeta0 <= 1.0);
    }

    #[test]
    fn smoothstep_is_c2_and_symmetric() {
        for i in 0..=100 {
            let s = i as f64 / 100.0;
            assert!((smoothstep5(1.0 - s) - (1.0 - smoothstep5(s))).abs() < 1e-14);
        }
        // first and second derivatives vanish at both ends
        let h = 1e-4;
        for s0 in [0.0, 1.0] {
            let d1 = (smoothstep5(s0 + h) - smoothstep5(s0 - h)) / (2.0 * h);
            let d2 = (smoothstep5(s0 + h) - 2.0 * smoothstep5(s0) + smoothstep5(s0 - h)) / (h * h);
            assert!(d1.abs() < 1e-6 && d2.abs() < 1e-3, "{s0}: {d1} {d2}");
        }
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-50.0f64..50.0).prop_map(Vec3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn frames_preserve_norm_and_pairing(x in vec3(), y in vec3(), k in vec3(), p in vec3()) {
            let z = JacobiConfig::new(x, y);
            let q = JacobiMomentum::new(k, p);
            let n2 = z.norm().powi(2);
            let zq = z.dot(&q);
            let scale = x.norm() * k.norm() + y.norm() * p.norm() + 1e-300;
            let mut xs = Vec3::ZERO;
            let mut ys = Vec3::ZERO;
            for j in Pair::ALL {
                let (xj, yj) = z.frame(j);
                let (kj, pj) = q.frame(j);
                prop_assert!(((xj.norm_sq() + yj.norm_sq()) - n2).abs() <= 1e-14 * n2.max(1e-300));
                prop_assert!(((kj.norm_sq() + pj.norm_sq()) - q.energy()).abs() <= 1e-14 * q.energy().max(1e-300));
                prop_assert!((xj.dot(&kj) + yj.dot(&pj) - zq).abs() <= 1e-14 * scale);
                xs += xj;
                ys += yj;
                let back = JacobiConfig::from_frame(j, xj, yj);
                prop_assert!(close(back.x, x, 1e-14 * (1.0 + z.norm())));
                prop_assert!(close(back.y, y, 1e-14 * (1.0 + z.norm())));
            }
            prop_assert!(xs.norm() <= 1e-14 * (1.0 + z.norm()));
            prop_assert!(ys.norm() <= 1e-14 * (1.0 + z.norm()));
        }

        #[test]
        fn weights_sum_to_one(x in vec3(), y in vec3(), s in 1.0f64..1e4) {
            let z = JacobiConfig::new(x * s, y * s);
            if let Ok(w) = partition_weights(&z, DEFAULT_MU, DEFAULT_NU) {
                prop_assert!((w.sum() - 1.0).abs() <= 2.0 * f64::EPSILON);
                prop_assert!(w.zeta0 >= 0.0 && w.zeta0 <= 1.0);
                for v in w.zeta0j {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
                if let Ok(labels) = region_classify(&z, DEFAULT_MU, DEFAULT_NU) {
                    for (l, &wj) in labels.iter().zip(&w.zeta0j) {
                        if *l == Region::Inner && w.zeta0j.iter().sum::<f64>() <= 1.0 {
                            prop_assert_eq!(wj, 1.0);
                        }
                    }
                    if labels.iter().all(|&l| l == Region::Outer) {
                        prop_assert_eq!(w.zeta0, 1.0);
                    }
                }
            }
        }
    }
}
