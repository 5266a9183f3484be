//! Finite-scale machinery for embedding models of the arithmetic of
//! nonnegative parts of discretely ordered rings into reduced powers of
//! the naturals.
//!
//! The crate provides:
//!
//! - [`syntax`]: terms and Diophantine formulas, canonical forms, token
//!   lengths, bounded enumeration, and the size budget g(n, m);
//! - [`models`]: the standard naturals and the integer-polynomial
//!   semiring, with a sampled axiom checker;
//! - [`solver`]: bounded brute-force and evaluation-based solvers for
//!   systems of equations over the naturals;
//! - [`filter`]: sequence prefixes modulo the cofinite filter and modulo
//!   regular filters presented by a witnessing family;
//! - [`embed`]: the solution-table pipeline mapping enumerated model
//!   elements to columns of natural numbers, with embedding checks;
//! - [`ordinal`], [`ufamily`]: ordinal notations in Cantor normal form
//!   with fundamental sequences, and the coherent family of finite
//!   ordinal sets indexed by (ordinal, stage);
//! - [`star`]: the componentwise witness construction against a regular
//!   family, with per-cell soundness rechecks and fact certificates.

pub mod embed;
pub mod filter;
pub mod models;
pub mod ordinal;
pub mod solver;
pub mod star;
pub mod syntax;
pub mod ufamily;
