//! Whitespace-insensitive parser for the formula, step, and proof-state
//! grammars. Identifiers in term position are variables when bound by an
//! enclosing quantifier and constants otherwise, so parsing a closed
//! canonical form always reproduces the original tree.

use super::formula::Formula;
use super::goal::{Goal, ProofState};
use super::step::{CertStep, ProofStep};
use super::term::{Signature, Term};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Special(String), // <hammer> and friends
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Arrow,
    Amp,
    Pipe,
    Tilde,
    Turnstile,
    GoalSep,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn lex(input: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = input.chars().peekable();
    let err = |line, col, message: String| ParseError { line, col, message };
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>,
                        line: &mut usize,
                        col: &mut usize| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars, &mut line, &mut col);
            continue;
        }
        let tok = match c {
            '(' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::RParen
            }
            '[' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::LBracket
            }
            ']' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::RBracket
            }
            ',' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Comma
            }
            '.' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Dot
            }
            ':' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Colon
            }
            '&' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Amp
            }
            '~' => {
                bump(&mut chars, &mut line, &mut col);
                Tok::Tilde
            }
            '-' => {
                bump(&mut chars, &mut line, &mut col);
                match chars.peek() {
                    Some('>') => {
                        bump(&mut chars, &mut line, &mut col);
                        Tok::Arrow
                    }
                    _ => return Err(err(tline, tcol, "expected `->`".into())),
                }
            }
            '|' => {
                bump(&mut chars, &mut line, &mut col);
                match chars.peek() {
                    Some('|') => {
                        bump(&mut chars, &mut line, &mut col);
                        Tok::GoalSep
                    }
                    Some('-') => {
                        bump(&mut chars, &mut line, &mut col);
                        Tok::Turnstile
                    }
                    _ => Tok::Pipe,
                }
            }
            '<' => {
                bump(&mut chars, &mut line, &mut col);
                let mut name = String::new();
                loop {
                    match chars.peek() {
                        Some('>') => {
                            bump(&mut chars, &mut line, &mut col);
                            break;
                        }
                        Some(&c2) if c2.is_alphanumeric() || c2 == '_' => {
                            name.push(bump(&mut chars, &mut line, &mut col));
                        }
                        _ => return Err(err(tline, tcol, "unterminated `<...>` token".into())),
                    }
                }
                if name.is_empty() {
                    return Err(err(tline, tcol, "empty `<...>` token".into()));
                }
                Tok::Special(format!("<{name}>"))
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_alphanumeric() || c2 == '_' {
                        name.push(bump(&mut chars, &mut line, &mut col));
                    } else {
                        break;
                    }
                }
                Tok::Ident(name)
            }
            other => return Err(err(tline, tcol, format!("unexpected character `{other}`"))),
        };
        toks.push((tok, tline, tcol));
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: (line, col),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next() {
                Some(Tok::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }
}

fn parse_term_inner(lx: &mut Lexer, scope: &[String]) -> Result<Term, ParseError> {
    let name = lx.ident("a term")?;
    if lx.peek() == Some(&Tok::LParen) {
        lx.next();
        let mut args = vec![parse_term_inner(lx, scope)?];
        while lx.peek() == Some(&Tok::Comma) {
            lx.next();
            args.push(parse_term_inner(lx, scope)?);
        }
        lx.expect(Tok::RParen, "`)`")?;
        Ok(Term::App(name, args))
    } else if scope.iter().any(|v| *v == name) {
        Ok(Term::Var(name))
    } else {
        Ok(Term::App(name, Vec::new()))
    }
}

fn parse_unary(lx: &mut Lexer, scope: &mut Vec<String>) -> Result<Formula, ParseError> {
    match lx.peek() {
        Some(Tok::Tilde) => {
            lx.next();
            Ok(Formula::not(parse_unary(lx, scope)?))
        }
        Some(Tok::LParen) => {
            lx.next();
            let f = parse_implies(lx, scope)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(f)
        }
        Some(Tok::Ident(name)) if name == "forall" || name == "exists" => {
            let kind = name.clone();
            lx.next();
            let var = lx.ident("a bound variable")?;
            lx.expect(Tok::Dot, "`.`")?;
            scope.push(var.clone());
            let body = parse_implies(lx, scope)?;
            scope.pop();
            Ok(if kind == "forall" {
                Formula::forall(var, body)
            } else {
                Formula::exists(var, body)
            })
        }
        Some(Tok::Ident(_)) => {
            let pred = lx.ident("an atom")?;
            if lx.peek() == Some(&Tok::LParen) {
                lx.next();
                let mut args = vec![parse_term_inner(lx, scope)?];
                while lx.peek() == Some(&Tok::Comma) {
                    lx.next();
                    args.push(parse_term_inner(lx, scope)?);
                }
                lx.expect(Tok::RParen, "`)`")?;
                Ok(Formula::Atom(pred, args))
            } else {
                Ok(Formula::Atom(pred, Vec::new()))
            }
        }
        _ => Err(lx.error("expected a formula")),
    }
}

fn parse_and(lx: &mut Lexer, scope: &mut Vec<String>) -> Result<Formula, ParseError> {
    let mut f = parse_unary(lx, scope)?;
    while lx.peek() == Some(&Tok::Amp) {
        lx.next();
        f = Formula::and(f, parse_unary(lx, scope)?);
    }
    Ok(f)
}

fn parse_or(lx: &mut Lexer, scope: &mut Vec<String>) -> Result<Formula, ParseError> {
    let mut f = parse_and(lx, scope)?;
    while lx.peek() == Some(&Tok::Pipe) {
        lx.next();
        f = Formula::or(f, parse_and(lx, scope)?);
    }
    Ok(f)
}

fn parse_implies(lx: &mut Lexer, scope: &mut Vec<String>) -> Result<Formula, ParseError> {
    let lhs = parse_or(lx, scope)?;
    if lx.peek() == Some(&Tok::Arrow) {
        lx.next();
        let rhs = parse_implies(lx, scope)?;
        Ok(Formula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

/// Parses a formula. Unbound identifiers in term position become constants,
/// so the result is always closed.
pub fn parse_formula(input: &str) -> Result<Formula, ParseError> {
    let mut lx = lex(input)?;
    let f = parse_implies(&mut lx, &mut Vec::new())?;
    lx.expect_end()?;
    Ok(f)
}

/// Parses a ground term (witness terms in `exists` steps).
pub fn parse_term(input: &str) -> Result<Term, ParseError> {
    let mut lx = lex(input)?;
    let t = parse_term_inner(&mut lx, &[])?;
    lx.expect_end()?;
    Ok(t)
}

/// Parses a proof step. `by_cert` steps come back without a certificate
/// payload; the caller resolves the id against a certificate store before
/// the kernel can replay them.
pub fn parse_step(input: &str) -> Result<ProofStep, ParseError> {
    let mut lx = lex(input)?;
    let step = match lx.peek() {
        Some(Tok::Special(s)) if s == "<hammer>" => {
            lx.next();
            ProofStep::HammerToken
        }
        Some(Tok::Ident(_)) => {
            let kw = lx.ident("a step keyword")?;
            match kw.as_str() {
                "intro" => ProofStep::Intro,
                "split" => ProofStep::Split,
                "left" => ProofStep::Left,
                "right" => ProofStep::Right,
                "assumption" => ProofStep::Assumption,
                "exists" => ProofStep::ExistsWitness(parse_term_inner(&mut lx, &[])?),
                "destruct" => ProofStep::Destruct(lx.ident("a hypothesis name")?),
                "cases" => ProofStep::Cases(lx.ident("a hypothesis name")?),
                "apply" => ProofStep::Apply(lx.ident("a fact name")?),
                "by_cert" => {
                    let cert_id = lx.ident("a certificate id")?;
                    let mut premises = Vec::new();
                    if lx.peek() == Some(&Tok::LBracket) {
                        lx.next();
                        if lx.peek() != Some(&Tok::RBracket) {
                            premises.push(lx.ident("a fact name")?);
                            while lx.peek() == Some(&Tok::Comma) {
                                lx.next();
                                premises.push(lx.ident("a fact name")?);
                            }
                        }
                        lx.expect(Tok::RBracket, "`]`")?;
                    }
                    ProofStep::ByCertificate(CertStep {
                        cert_id,
                        premises,
                        certificate: None,
                    })
                }
                other => return Err(lx.error(format!("unknown step keyword `{other}`"))),
            }
        }
        _ => return Err(lx.error("expected a proof step")),
    };
    lx.expect_end()?;
    Ok(step)
}

fn parse_goal(lx: &mut Lexer) -> Result<Goal, ParseError> {
    let mut hypotheses = Vec::new();
    if lx.peek() != Some(&Tok::Turnstile) {
        loop {
            let name = lx.ident("a hypothesis name")?;
            lx.expect(Tok::Colon, "`:`")?;
            let f = parse_implies(lx, &mut Vec::new())?;
            hypotheses.push((name, f));
            match lx.peek() {
                Some(Tok::Comma) => {
                    lx.next();
                }
                Some(Tok::Turnstile) => break,
                _ => return Err(lx.error("expected `,` or `|-`")),
            }
        }
    }
    lx.expect(Tok::Turnstile, "`|-`")?;
    let conclusion = parse_implies(lx, &mut Vec::new())?;
    Ok(Goal {
        hypotheses,
        conclusion,
    })
}

/// Parses a serialized proof state (goals joined by `||`) against a base
/// signature. Constants not in the base signature are inferred as local
/// 0-ary functions; unknown predicates or non-constant unknown functions are
/// errors.
pub fn parse_state(input: &str, base: &Signature) -> Result<ProofState, ParseError> {
    let mut lx = lex(input)?;
    let mut goals = vec![parse_goal(&mut lx)?];
    while lx.peek() == Some(&Tok::GoalSep) {
        lx.next();
        goals.push(parse_goal(&mut lx)?);
    }
    lx.expect_end()?;

    let mut local = Signature::default();
    for g in &goals {
        for f in g
            .hypotheses
            .iter()
            .map(|(_, f)| f)
            .chain(std::iter::once(&g.conclusion))
        {
            let syms = f.symbols();
            for p in &syms.predicates {
                if base.predicate_arity(p).is_none() {
                    return Err(ParseError {
                        line: 1,
                        col: 1,
                        message: format!("unknown predicate `{p}`"),
                    });
                }
            }
            for fun in &syms.functions {
                if base.function_arity(fun).is_none() && local.function_arity(fun).is_none() {
                    // Only fresh constants can be introduced by proof steps.
                    local.functions.insert(fun.clone(), 0);
                }
            }
        }
    }
    let merged = base.merged(&local);
    for g in &goals {
        for f in g
            .hypotheses
            .iter()
            .map(|(_, f)| f)
            .chain(std::iter::once(&g.conclusion))
        {
            if !f.well_formed(&merged) {
                return Err(ParseError {
                    line: 1,
                    col: 1,
                    message: format!("ill-formed formula `{f}` in parsed state"),
                });
            }
        }
    }
    Ok(ProofState {
        goals,
        local_signature: local,
        step_count: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_round_trips() {
        for s in [
            "p",
            "p(a,b)",
            "~p",
            "~~p",
            "p & q",
            "p & q & r",
            "p | q & r",
            "p -> q -> r",
            "(p -> q) -> r",
            "~(p & q)",
            "forall x. p(x) -> q(x)",
            "(forall x. p(x)) -> q",
            "exists x. p(x) & q",
            "p | (q | r)",
            "forall x. exists y. r(x,y)",
            "p(f(a,g(x)))",
        ] {
            let f = parse_formula(s).unwrap();
            assert_eq!(f.to_string(), s, "canonical form mismatch for `{s}`");
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_formula("p&q->r").unwrap();
        let b = parse_formula("p & q  ->\n r").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "p & q -> r");
    }

    #[test]
    fn bound_vs_constant_identifiers() {
        let f = parse_formula("forall x. p(x,c)").unwrap();
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::atom("p", vec![Term::var("x"), Term::constant("c")])
            )
        );
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_formula("a -> b -> c").unwrap();
        assert_eq!(
            f,
            Formula::implies(
                Formula::atom("a", vec![]),
                Formula::implies(Formula::atom("b", vec![]), Formula::atom("c", vec![]))
            )
        );
    }

    #[test]
    fn steps_round_trip() {
        for s in [
            "intro",
            "split",
            "left",
            "right",
            "exists c0",
            "exists f(a,b)",
            "assumption",
            "destruct h0",
            "cases h3",
            "apply t0_f2",
            "by_cert c9aff01",
            "by_cert c9aff01 [t0_f1,t0_f2]",
            "<hammer>",
        ] {
            let step = parse_step(s).unwrap();
            assert_eq!(step.to_string(), s);
        }
    }

    #[test]
    fn step_parse_errors() {
        assert!(parse_step("frobnicate").is_err());
        assert!(parse_step("intro intro").is_err());
        assert!(parse_step("destruct").is_err());
        // Lexes as a special token, but only `<hammer>` is a step.
        assert!(parse_step("<jackhammer>").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_formula("p &\n& q").unwrap_err();
        assert_eq!((err.line, err.col), (2, 1));
    }

    #[test]
    fn state_round_trips_and_infers_locals() {
        let mut base = Signature::default();
        base.declare_predicate("p", 1).unwrap();
        base.declare_predicate("q", 0).unwrap();
        let s = "h0 : p(_c0), h1 : q |- p(_c0) || |- q";
        let state = parse_state(s, &base).unwrap();
        assert_eq!(state.to_string(), s);
        assert_eq!(state.local_signature.function_arity("_c0"), Some(0));
        assert_eq!(state.goals.len(), 2);
    }

    #[test]
    fn state_rejects_unknown_predicates() {
        let base = Signature::default();
        assert!(parse_state("|- mystery(a)", &base).is_err());
    }
}
