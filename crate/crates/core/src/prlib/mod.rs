//! Primitive recursive definitions: the registry language and catalog,
//! defining equations, fullness, and generators for basic-policy totality
//! proofs.

mod generate;
mod ktrick;
mod registry;

pub use generate::{
    gen_term_totality_proof, gen_totality_proof, lower_eigenterms, pr_config, term_totality_formula,
    totality_formula,
};
pub use ktrick::{build_k_program, gen_k_totality_proof, K_SYMBOL};
pub use registry::{
    param_names, witness_name, Fullness, PrDefinition, PrError, PrExpr, PrRegistry, PrSymbols,
};
