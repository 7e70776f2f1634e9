//! Discrete Hilbert transform on discrete weighted Morrey spaces.
//!
//! The crate computes the transform `(Hb)_n = sum_{m != n} b_m / (n - m)` of
//! finitely supported sequences (direct and FFT paths), its maximal
//! truncations, the `l_p`, discrete Morrey and discrete weighted Morrey
//! norms, the discrete Muckenhoupt and (reverse) doubling constants of a
//! weight, and the continuous embedding used to transfer bounds from the
//! line to the lattice. The [`verify`] module turns the classical
//! inequalities for these objects into reproducible numerical checks.

// Negated float comparisons reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embedding;
pub mod error;
pub mod norms;
pub mod params;
pub mod seq;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use params::{EvalPlan, MorreyParams, TailPolicy};
pub use seq::{Fixture, Seq, Weight, WeightFamily};
