//! Complex Gamma, digamma and Kummer's function.

mod gamma;
mod kummer;

pub use gamma::{digamma, gamma, nonpositive_integer, rgamma, rgamma_deriv};
pub use kummer::{
    choose_method, kummer_eval_with, kummer_phi, kummer_phi_da, kummer_phi_dz, switch_radius, KummerEval, KummerMethod,
};

/// Names matching the rest of the API.
pub use gamma::{digamma as digamma_complex, gamma as gamma_complex};
