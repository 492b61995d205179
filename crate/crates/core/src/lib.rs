//! Proof checking and proof generation for provably recursive functions.
//!
//! * [`syntax`]: terms, formulas, programs and their textual formats.
//! * [`equational`]: Herbrand-Goedel equational derivations, bounded search
//!   and numeral evaluation with checkable certificates.
//! * [`kernel`]: natural-deduction checker for the theories A(P) and the
//!   discrete intrinsic theory, parameterized by an eigenterm policy.
//! * [`prlib`]: primitive recursive definitions, fullness, totality proof
//!   generators, eigenterm lowering and the search-to-function construction.
//! * [`intrinsic`]: relativization to `N` and the translation of
//!   primitive-recursive-policy proofs into the intrinsic theory.

pub mod equational;
pub mod intrinsic;
pub mod kernel;
pub mod prlib;
pub mod syntax;
