//! The discrete intrinsic theory: relativization to the data predicate `N`,
//! `N`-closure of primitive recursive terms, relativized induction, and the
//! translation of proofs with primitive recursive eigenterms.

mod relativize;
mod translate;

pub use relativize::{is_relativized, relativize, relativized_path, unguard};
pub use translate::{
    derive_n_of_term, intrinsic_config, nat_label, pipeline, program_assumptions, program_label,
    relativized_induction_proof, totality_to_n, translate_pr_proof, IntrinsicError, PipelineRun,
};
