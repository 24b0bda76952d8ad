//! Weighted tree automata over exact semirings.
//!
//! The crate evaluates tree series, checks and searches simulations between
//! automata, decomposes simulations into forward, diagonal and backward steps,
//! lifts the sum, Hadamard, σ₀-product and σ₀-iteration constructions to
//! simulations, and decides equivalence over ℚ, ℤ and ℕ by joint reduction.

pub mod cli;
pub mod constructions;
pub mod error;
pub mod generate;
pub mod jointred;
pub mod linalg;
pub mod semiring;
pub mod simulation;
pub mod text;
pub mod wta;

pub use error::{Error, Result};
pub use linalg::{IndexSet, Matrix, Vector};
pub use semiring::{Semiring, Value};
pub use wta::{RankedAlphabet, Tree, Wta};
