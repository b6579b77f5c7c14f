//! Generalized oscillator algebras of index `n`.
//!
//! The family interpolates between the Fermion algebra (`n = 2`) and the
//! Boson algebra (`n -> infinity`). Every member is realized on the truncated
//! ket space `|0>, ..., |n-1>`:
//!
//! - [`algebra`] builds the ladder matrices and checks the defining relations
//!   numerically.
//! - [`opcalc`] parses operator expressions in `e` and `e+` and reduces them
//!   to an exact, creators-left normal form.
//! - [`statistics`] evaluates the capped occupancy distribution and solves for
//!   the Lagrange factors of a level spectrum.

pub mod algebra;
pub mod opcalc;
pub mod statistics;

pub use algebra::{AlgebraError, AlgebraOrder, Ket, OperatorMatrix};
