//! Special functions of complex argument.

mod bessel;
mod gamma;
mod spherical;

pub use bessel::{
    bessel_j_complex_order, bessel_j_reduced, bessel_j_reduced_terms, MAX_SERIES_TERMS,
};
pub use gamma::{gamma, ln_gamma, rgamma, sin_pi};
pub use spherical::{
    reduced_hankel_1, reduced_hankel_1_prime, reduced_j, spherical_bessel_j,
    spherical_bessel_j_prime, spherical_bessel_y, spherical_bessel_y_prime, spherical_hankel_1,
    spherical_hankel_1_prime, spherical_hankel_2, spherical_hankel_2_prime,
};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecialFunctionError {
    #[error("gamma function pole at {re}{im:+}i")]
    Pole { re: f64, im: f64 },
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("result overflowed")]
    Overflow,
    #[error("non-finite input")]
    NonFinite,
    #[error("domain error: {0}")]
    Domain(&'static str),
}
