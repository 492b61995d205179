//! Equational logic over programs: certificates, their checker, bounded
//! derivation search, evaluation to numerals and coherence probing.

mod derivation;
mod eval;
mod search;

pub use derivation::{check_eq_derivation, parse_certificate, DerivationBuilder, EqDerivation, EqStep, EqVerdict};
pub use eval::{evaluate, non_orientable, rewrite_eval, EvalError, Evaluation};
pub use search::{coherence_probe, derive_bounded, BudgetError, CoherenceProbe, SearchBudget};
