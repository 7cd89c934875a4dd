//! Canonical textual forms. The printer is the definition of "canonical":
//! single spaces around binary operators, no space inside argument lists,
//! parentheses only where precedence requires them.

use super::formula::Formula;
use super::goal::{Goal, ProofState};
use super::step::ProofStep;
use super::term::Term;
use std::fmt;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

// Precedence levels: quantifiers 0, -> 1 (right-assoc), | 2, & 3 (both
// left-assoc), ~ 4, atoms 5. `fmt_prec(f, min)` parenthesizes when the node
// binds looser than `min`.
fn fmt_prec(form: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = match form {
        Formula::Forall(..) | Formula::Exists(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        Formula::Atom(..) => 5,
    };
    let parens = prec < min;
    if parens {
        write!(f, "(")?;
    }
    match form {
        Formula::Atom(p, args) => {
            write!(f, "{p}")?;
            if !args.is_empty() {
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")?;
            }
        }
        Formula::Not(a) => {
            write!(f, "~")?;
            fmt_prec(a, 4, f)?;
        }
        Formula::And(a, b) => {
            fmt_prec(a, 3, f)?;
            write!(f, " & ")?;
            fmt_prec(b, 4, f)?;
        }
        Formula::Or(a, b) => {
            fmt_prec(a, 2, f)?;
            write!(f, " | ")?;
            fmt_prec(b, 3, f)?;
        }
        Formula::Implies(a, b) => {
            fmt_prec(a, 2, f)?;
            write!(f, " -> ")?;
            fmt_prec(b, 1, f)?;
        }
        Formula::Forall(v, a) => {
            write!(f, "forall {v}. ")?;
            fmt_prec(a, 0, f)?;
        }
        Formula::Exists(v, a) => {
            write!(f, "exists {v}. ")?;
            fmt_prec(a, 0, f)?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStep::Intro => write!(f, "intro"),
            ProofStep::Split => write!(f, "split"),
            ProofStep::Left => write!(f, "left"),
            ProofStep::Right => write!(f, "right"),
            ProofStep::ExistsWitness(t) => write!(f, "exists {t}"),
            ProofStep::Assumption => write!(f, "assumption"),
            ProofStep::Destruct(h) => write!(f, "destruct {h}"),
            ProofStep::Cases(h) => write!(f, "cases {h}"),
            ProofStep::Apply(name) => write!(f, "apply {name}"),
            ProofStep::ByCertificate(c) => {
                write!(f, "by_cert {}", c.cert_id)?;
                if !c.premises.is_empty() {
                    write!(f, " [")?;
                    for (i, p) in c.premises.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{p}")?;
                    }
                    write!(f, "]")?;
                }
                Ok(())
            }
            ProofStep::HammerToken => write!(f, "<hammer>"),
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, hyp)) in self.hypotheses.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name} : {hyp}")?;
        }
        if !self.hypotheses.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {}", self.conclusion)
    }
}

impl fmt::Display for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.goals.iter().enumerate() {
            if i > 0 {
                write!(f, " || ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}
