//! Residual Monge–Ampère masses of plurisubharmonic singularities.
//!
//! The crate has two halves:
//!
//! * an analytic half, generic over [`Real`] (`f32`/`f64`): generalized
//!   Cantor sets and their measures ([`cantor`]), the Green function of
//!   the round sphere and logarithmic potentials of Cantor measures
//!   ([`sphere`], [`potential`]);
//! * an exact half, generic over [`Exact`] rationals: Hilbert–Samuel
//!   multiplicities of monomial ideals ([`monomial`], [`newton`]), the
//!   intersection-number mass formula on blowups of projective space
//!   ([`intersection`]), and the masses of multiplier-ideal approximants
//!   together with the counterexample report ([`approximation`]).
//!
//! [`verify`] runs the acceptance checks used by the `verify` CLI command.

// `!(x > 0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximation;
pub mod cantor;
pub mod dyadic;
pub mod error;
pub mod format;
pub mod intersection;
pub mod monomial;
pub mod newton;
pub mod potential;
mod quadrature;
pub mod scalar;
pub mod sphere;
pub mod verify;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use scalar::{BigRational, Exact, Real};

/// Exact scalar used by default throughout the algebraic modules.
pub type Rational = BigRational;

pub type CantorParams64 = cantor::CantorParams<f64>;
pub type CantorApprox64 = cantor::CantorApprox<f64>;
pub type CantorPoint64 = cantor::CantorPoint<f64>;
pub type SpherePoint64 = sphere::SpherePoint<f64>;
pub type QuadratureConfig64 = potential::QuadratureConfig<f64>;

