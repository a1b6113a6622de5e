//! Small fixed-size vectors over `f64` and `Complex64`.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn unit(&self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0).then(|| *self * (1.0 / n))
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Vec3([b * f - c * e, c * d - a * f, a * e - b * d])
    }

    pub fn to_complex(self) -> CVec3 {
        CVec3(self.0.map(|v| Complex64::new(v, 0.0)))
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3(self.0.map(|v| -v))
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3(self.0.map(|v| v * s))
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

/// A 3-vector with complex components. Products are bilinear (no conjugation).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CVec3(pub [Complex64; 3]);

impl CVec3 {
    /// Bilinear square `<v, v>` without conjugation.
    pub fn dot_self(&self) -> Complex64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn dot_real(&self, r: &Vec3) -> Complex64 {
        self.0[0] * r.0[0] + self.0[1] * r.0[1] + self.0[2] * r.0[2]
    }

    pub fn real(&self) -> Vec3 {
        Vec3(self.0.map(|c| c.re))
    }

    pub fn imag(&self) -> Vec3 {
        Vec3(self.0.map(|c| c.im))
    }

    /// Euclidean (Hermitian) norm, used for size comparisons only.
    pub fn abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> CVec3 {
        CVec3(self.0.map(|c| c * s))
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, o: CVec3) -> CVec3 {
        CVec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, o: CVec3) -> CVec3 {
        CVec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl From<Vec3> for CVec3 {
    fn from(v: Vec3) -> CVec3 {
        v.to_complex()
    }
}
