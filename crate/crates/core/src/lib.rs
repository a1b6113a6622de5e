//! Asymptotic continuum eigenfunctions for three identical charged particles.
//!
//! The crate evaluates three constructions on the six-dimensional
//! centre-of-mass configuration space:
//!
//! * the BBK product of three two-body Coulomb distortion factors,
//! * the screen-corrected form `chi_j`, in which the two spectator factors
//!   are evaluated at complex-shifted coordinates near the screen `x_j = 0`,
//! * the glued field `psi_as`, a partition of unity between the two.
//!
//! Alongside them sit the special functions they need (complex Gamma,
//! digamma, Kummer's `1F1`), the coefficient algebra of the near-screen
//! asymptotics, and a residual engine that measures how fast the
//! Schrödinger discrepancy of each construction decays along rays.

pub mod error;
pub mod kinematics;
pub mod residual;
pub mod screenasym;
pub mod selftest;
pub mod specfun;
pub mod vec3;
pub mod wavefn;

pub use error::{Error, Result};
pub use kinematics::{JacobiConfig, JacobiMomentum, Pair, Region, RegionWeights};
pub use residual::{DecayFit, RayPath, RaySpec};
pub use vec3::{CVec3, Vec3};
