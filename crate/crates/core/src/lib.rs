//! Bound-state wave functions synthesized from angle-action generating
//! functions.
//!
//! A kernel `A(q,θ)·exp[iF(q,θ)/ħ]` is expanded in powers of `z = e^(−2iθ)`;
//! its Taylor coefficients (Rodrigues extraction) or, equivalently, a
//! trapezoidal contour sum around `z = 0` give approximate wave functions.
//! These are orthonormalized and compared against exact eigenfunctions and
//! WKB baselines for the harmonic, Pöschl-Teller and Morse oscillators.
//!
//! Units throughout: ħ = m = 1; harmonic ω = 1; Pöschl-Teller well width
//! a = π; Morse range d = 1.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod jetseries;
pub mod metrics;
pub mod model;
pub mod ortho;
pub mod output;
pub mod par;
pub mod pipeline;
pub mod quadrature;
pub mod special;
pub mod synth;
pub mod verify;
pub mod wavefunction;
pub mod wkb;

pub mod cli;

pub use error::{Error, Result};
pub use wavefunction::{Grid, Provenance, WaveFunctionTable};
