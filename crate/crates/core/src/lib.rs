//! Exact computation of rational-function recurrences attached to modular
//! forms for the level-2 congruence subgroup, and of the residues that encode
//! those forms' Fourier coefficients.
//!
//! - [`exactnum`]: rationals and dense polynomials.
//! - [`ratfunc`]: rational functions with factored `(1 - j v)` denominators.
//! - [`recurrence`]: families, the `v`- and `u`-side recurrences, scans.
//! - [`qseries`]: truncated q-expansions and arithmetic oracles.
//! - [`verify`]: named check suites shared by the CLI.

pub mod exactnum;
pub mod qseries;
pub mod ratfunc;
pub mod recurrence;
pub mod verify;

pub use exactnum::{Poly, Rat};
pub use ratfunc::RatFunc;
pub use recurrence::{Family, SeqState};
