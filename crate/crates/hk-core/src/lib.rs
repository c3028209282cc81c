//! Semiclassical Herman-Kluk (HK) propagation for one-dimensional systems,
//! built around the exactly solvable folding Hamiltonian `H = -g p^3 / 3`.
//!
//! The crate provides:
//! - self-contained special functions and adaptive quadrature ([`numerics`]),
//! - the folding model's exact, semiclassical, and reduced HK kernels ([`model`]),
//! - a general HK kernel for arbitrary 1D Hamiltonians with monodromy and
//!   branch-continuous prefactor tracking ([`propagator`]),
//! - saddle-point machinery for the reduced HK integral, including the
//!   shallow/deep tunneling border and the deep-tail evaluation ([`asymptotics`]),
//! - phase-space manifold evolution and caustic detection ([`manifold`]),
//! - independent exact-quantum references: a contour-rotated kernel quadrature
//!   and a split-operator grid propagator ([`oracle`]).
//!
//! The core is `no_std` (with `alloc`); all floating-point transcendentals go
//! through `libm`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod asymptotics;
pub mod error;
pub mod manifold;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod propagator;

pub use error::{Error, Result};
pub use model::{DerivedScales, ModelParams, PhasePoint, RegionClass};
pub use numerics::quad::QuadratureSpec;

/// Complex double used throughout the crate.
pub type Complex = num_complex::Complex64;
