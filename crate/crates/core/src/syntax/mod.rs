//! Terms, formulas, equations and programs, with substitution machinery,
//! term-class predicates and the textual formats.

mod formula;
mod fresh;
pub mod parse;
mod program;
mod term;

pub use formula::{dedup_alpha, Formula, SubstError};
pub use fresh::{NameSupply, RESERVED_PREFIX};
pub use parse::{parse_equation, parse_formula, parse_program, parse_term, ProgramParseError, SyntaxError};
pub use program::{Equation, Program, ProgramError};
pub use term::{
    decode_numeral, fmt_path, is_basic, kind_of, numeral, Name, Path, Symbol, SymbolKind, Term, SUCC, ZERO,
};

/// Membership in the language of primitive recursive symbols.
pub trait PrLanguage {
    fn is_pr_symbol(&self, name: &str, arity: usize) -> bool;
}

/// True iff every non-constructor symbol of `t` is a registered primitive
/// recursive symbol.
pub fn is_pr_term(t: &Term, registry: &dyn PrLanguage) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => {
            let head = match kind_of(f) {
                SymbolKind::Zero => args.is_empty(),
                SymbolKind::Succ => args.len() == 1,
                SymbolKind::Program => registry.is_pr_symbol(f, args.len()),
            };
            head && args.iter().all(|a| is_pr_term(a, registry))
        }
    }
}

/// Parse a comma-separated variable list such as `x,y`.
pub fn parse_var_list(text: &str) -> Result<Vec<Name>, SyntaxError> {
    let mut p = parse::Parser::new(text, 1)?;
    let mut out = Vec::new();
    if p.at_end() {
        return Ok(out);
    }
    loop {
        out.push(p.variable()?);
        if p.at_end() {
            return Ok(out);
        }
        p.expect(&parse::Tok::Comma)?;
    }
}
