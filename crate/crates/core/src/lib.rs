//! Momentum-space monopole kinematics and helicity-screened spectra.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: orthogonal polynomials, log-gamma, Gauss–Legendre rules.
//! - [`monopole_basis`]: monopole harmonics `Y_{lmμ}` and angular grids.
//! - [`gauge_field`]: patched monopole potentials, cocycle fluxes, Dirac check.
//! - [`hopf`]: spinors on S³, sections, helicity and Chern numbers.
//! - [`screening`]: spinor-overlap form factors and screened kernels.
//! - [`spectra`]: oscillator and hydrogen solvers with helicity screening.

pub mod error;
pub mod gauge_field;
pub mod hopf;
pub mod monopole_basis;
pub mod screening;
pub mod specfun;
pub mod spectra;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/harmonics.md")]
    mod harmonics {}
    #[doc = include_str!("../../../book/src/gauge.md")]
    mod gauge {}
    #[doc = include_str!("../../../book/src/hopf.md")]
    mod hopf {}
    #[doc = include_str!("../../../book/src/form_factors.md")]
    mod form_factors {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
