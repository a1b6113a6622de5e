use crate::kinematics::Pair;
use crate::residual::DecayFit;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the Gamma function at {0}")]
    Pole(String),

    #[error("branch cut: {0}")]
    Branch(String),

    #[error("value overflows f64: {0}")]
    Overflow(String),

    #[error("configuration lies on screen {0} (|x_{0}| below 1e-12)")]
    OnScreen(Pair),

    #[error("pair wave nearly vanishes at this point, logarithmic gradient undefined")]
    NearZeroWave,

    #[error("division by a vanishing coefficient: {0}")]
    Singular(String),

    #[error("log-log fit has r^2 = {:.4} < 0.9", .0.r_squared)]
    PoorFit(Box<DecayFit>),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}
