//! Fixed inputs shared by the kernel benchmarks.

use tricoul::{JacobiConfig, JacobiMomentum, Vec3};

pub const ALPHA: f64 = 1.0;

pub fn momentum() -> JacobiMomentum {
    JacobiMomentum::new(Vec3::new(0.4, 0.9, -0.3), Vec3::new(-0.6, 0.2, 0.8))
}

/// A point near the origin, where every Kummer call takes the series branch.
pub fn near_point() -> JacobiConfig {
    JacobiConfig::new(Vec3::new(0.7, -1.2, 2.1), Vec3::new(1.5, 0.3, -0.8))
}

/// A point far out in the outer region.
pub fn far_point() -> JacobiConfig {
    JacobiConfig::new(Vec3::new(300.0, 200.0, 100.0), Vec3::new(-250.0, 400.0, 150.0))
}

/// A point near screen 1, inside its screen region.
pub fn screen_point() -> JacobiConfig {
    JacobiConfig::new(Vec3::new(0.0, 0.0, 3.0), Vec3::new(500.0, 0.0, 0.0))
}
