//! Lexer and recursive-descent parser shared by every textual format.
//!
//! Formula grammar, loosest first:
//!
//! ```text
//! formula := or ('->' formula)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '~' unary | ('forall' | 'exists') ident formula | atom
//! atom    := 'false' | 'N' '(' term ')' | '(' formula ')' | term '=' term
//! term    := ident | ident '(' terms ')' | digits
//! ```
//!
//! A quantifier extends as far right as possible, so it binds weakest.

use std::fmt;

use thiserror::Error;

use super::formula::Formula;
use super::program::{Equation, Program, ProgramError};
use super::term::{numeral, Name, Path, Term, SUCC};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax-error at {line}:{col}: {msg}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Semi,
    Eq,
    Arrow,
    Amp,
    Bar,
    Tilde,
    Turnstile,
    Assign,
    Bang,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Bar => write!(f, "`|`"),
            Tok::Tilde => write!(f, "`~`"),
            Tok::Turnstile => write!(f, "`|-`"),
            Tok::Assign => write!(f, "`:=`"),
            Tok::Bang => write!(f, "`!`"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub const KEYWORDS: &[&str] = &["forall", "exists", "false", "N"];

pub fn lex(text: &str, first_line: usize) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let lineno = first_line + li;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let push = |tok: Tok, out: &mut Vec<Spanned>| out.push(Spanned { tok, line: lineno, col });
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                push(Tok::Ident(chars[start..i].iter().collect()), &mut out);
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<u64>().map_err(|_| SyntaxError {
                    line: lineno,
                    col,
                    msg: format!("number `{s}` out of range"),
                })?;
                push(Tok::Num(n), &mut out);
                continue;
            }
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('|', Some('-')) => (Tok::Turnstile, 2),
                (':', Some('=')) => (Tok::Assign, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                (':', _) => (Tok::Colon, 1),
                (';', _) => (Tok::Semi, 1),
                ('=', _) => (Tok::Eq, 1),
                ('&', _) => (Tok::Amp, 1),
                ('|', _) => (Tok::Bar, 1),
                ('~', _) => (Tok::Tilde, 1),
                ('!', _) => (Tok::Bang, 1),
                _ => {
                    return Err(SyntaxError { line: lineno, col, msg: format!("unexpected character `{c}`") })
                }
            };
            push(tok, &mut out);
            i += len;
        }
    }
    Ok(out)
}

/// Cursor over a token stream.
pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
}

impl Parser {
    pub fn new(text: &str, first_line: usize) -> Result<Parser, SyntaxError> {
        let toks = lex(text, first_line)?;
        let end_line = first_line + text.lines().count().max(1) - 1;
        Ok(Parser { toks, pos: 0, end_line })
    }

    pub fn from_tokens(toks: Vec<Spanned>, end_line: usize) -> Parser {
        Parser { toks, pos: 0, end_line }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let (line, col) = match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => match self.toks.last() {
                Some(s) => (s.line, s.col + 1),
                None => (self.end_line, 1),
            },
        };
        SyntaxError { line, col, msg: msg.into() }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.to_string()))
        }
    }

    pub fn expect_end(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn number(&mut self) -> Result<u64, SyntaxError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("number")),
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    /// A bound or eigen variable name.
    pub fn variable(&mut self) -> Result<Name, SyntaxError> {
        let save = self.pos;
        let v = self.ident()?;
        if KEYWORDS.contains(&v.as_str()) || v == SUCC {
            self.pos = save;
            return Err(self.error(format!("`{v}` is reserved and cannot be a variable")));
        }
        Ok(v.into())
    }

    pub fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                if n > 100_000 {
                    return Err(self.error("numeral literal too large"));
                }
                self.pos += 1;
                Ok(numeral(n))
            }
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(self.error(format!("`{name}` is reserved and cannot start a term")));
                }
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.term()?);
                            if self.eat(&Tok::RParen) {
                                break;
                            }
                            self.expect(&Tok::Comma)?;
                        }
                    }
                    if name == SUCC && args.len() != 1 {
                        return Err(self.error("`S` takes exactly one argument"));
                    }
                    Ok(Term::App(name.into(), args))
                } else if name == SUCC {
                    Err(self.error("`S` must be applied to an argument"))
                } else {
                    Ok(Term::Var(name.into()))
                }
            }
            _ => Err(self.unexpected("term")),
        }
    }

    pub fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            let universal = self.is_keyword("forall");
            self.pos += 1;
            let x = self.variable()?;
            let body = Box::new(self.formula()?);
            return Ok(if universal { Formula::Forall(x, body) } else { Formula::Exists(x, body) });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        if self.is_keyword("false") {
            self.pos += 1;
            return Ok(Formula::False);
        }
        if self.is_keyword("N") {
            self.pos += 1;
            self.expect(&Tok::LParen)?;
            let t = self.term()?;
            self.expect(&Tok::RParen)?;
            return Ok(Formula::Nat(t));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(&Tok::RParen)?;
            return Ok(f);
        }
        let l = self.term()?;
        self.expect(&Tok::Eq)?;
        let r = self.term()?;
        Ok(Formula::Eq(l, r))
    }

    pub fn equation(&mut self) -> Result<Equation, SyntaxError> {
        let lhs = self.term()?;
        self.expect(&Tok::Eq)?;
        let rhs = self.term()?;
        Ok(Equation::new(lhs, rhs))
    }

    /// `1.0.2`; the empty path is written `.`
    pub fn path(&mut self) -> Result<Path, SyntaxError> {
        if self.eat(&Tok::Dot) {
            return Ok(Vec::new());
        }
        let mut p = vec![self.number()? as usize];
        while self.peek() == Some(&Tok::Dot) && matches!(self.peek_at(1), Some(Tok::Num(_))) {
            self.pos += 1;
            p.push(self.number()? as usize);
        }
        Ok(p)
    }
}

pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text, 1)?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text, 1)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

pub fn parse_equation(text: &str) -> Result<Equation, SyntaxError> {
    let mut p = Parser::new(text, 1)?;
    let e = p.equation()?;
    p.eat(&Tok::Dot);
    p.expect_end()?;
    Ok(e)
}

#[derive(Debug, Error)]
pub enum ProgramParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Program(#[from] ProgramError),
}

/// Program files: `lhs = rhs.` per equation, `#` comments, plus the
/// directives `!main f.` and `!link f.` / `!link f = def.`
pub fn parse_program(text: &str) -> Result<Program, ProgramParseError> {
    let mut p = Parser::new(text, 1)?;
    let mut equations = Vec::new();
    let mut main = None;
    let mut links = Vec::new();
    while !p.at_end() {
        if p.eat(&Tok::Bang) {
            let directive = p.ident()?;
            match directive.as_str() {
                "main" => main = Some(Name::from(p.ident()?)),
                "link" => {
                    let sym = p.ident()?;
                    let def = if p.eat(&Tok::Eq) { p.ident()? } else { sym.clone() };
                    links.push((Name::from(sym), Name::from(def)));
                }
                other => return Err(p.error(format!("unknown directive `!{other}`")).into()),
            }
        } else {
            equations.push(p.equation()?);
        }
        p.expect(&Tok::Dot)?;
    }
    let mut prog = Program::new(equations)?;
    if let Some(m) = main {
        prog = prog.with_main(&m)?;
    }
    for (s, d) in links {
        prog = prog.with_link(&s, &d)?;
    }
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_equation_line() {
        let prog = parse_program("add(x,0) = x.").unwrap();
        assert_eq!(prog.equations().len(), 1);
        let e = &prog.equations()[0];
        assert_eq!(e.lhs, Term::app("add", vec![Term::var("x"), Term::zero()]));
        assert_eq!(e.rhs, Term::var("x"));
    }

    #[test]
    fn parses_quantifier_prefix() {
        let f = parse_formula("forall x exists y f(x)=y").unwrap();
        let expected = Formula::forall(
            "x",
            Formula::exists("y", Formula::eq(Term::app("f", vec![Term::var("x")]), Term::var("y"))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn reports_position_of_error() {
        let err = parse_formula("f(x =").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.col >= 4, "{err}");
        assert!(parse_program("f(x) = 0.\ng(x = 0.").is_err());
        let e = match parse_program("f(x) = 0.\ng(x = 0.") {
            Err(ProgramParseError::Syntax(e)) => e,
            other => panic!("{other:?}"),
        };
        assert_eq!(e.line, 2);
    }

    #[test]
    fn arrow_is_right_associative() {
        let f = parse_formula("a = a -> b = b -> c = c").unwrap();
        match f {
            Formula::Imp(_, r) => assert!(matches!(*r, Formula::Imp(..))),
            _ => panic!(),
        }
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_formula("0 = 0 & forall x x = x -> x = 0").unwrap();
        assert_eq!(f.to_string(), "0 = 0 & forall x x = x -> x = 0");
        match f {
            Formula::And(_, r) => assert!(matches!(*r, Formula::Forall(..))),
            _ => panic!(),
        }
    }

    #[test]
    fn negation_and_numerals() {
        let f = parse_formula("~S(x) = 2").unwrap();
        assert_eq!(f, Formula::not(Formula::eq(Term::succ(Term::var("x")), numeral(2))));
        assert!(parse_term("S(0, 0)").is_err());
        assert!(parse_term("S").is_err());
        assert_eq!(parse_term("c()").unwrap(), Term::app("c", vec![]));
    }

    #[test]
    fn program_directives() {
        let p = parse_program("!main add.\n!link add.\nadd(x, 0) = x.\nadd(x, S(y)) = S(add(x, y)).").unwrap();
        assert_eq!(p.main().map(|m| &**m), Some("add"));
        assert_eq!(p.links().get("add").map(|d| &**d), Some("add"));
        assert!(parse_program("!main g.\nadd(x, 0) = x.").is_err());
        assert!(parse_program("f(x) = 0.\nf(x, y) = 0.").is_err());
    }
}
