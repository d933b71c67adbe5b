//! Formula AST. Universal quantification and conjunction are parser sugar;
//! the tree only ever holds the five core node kinds.

use std::fmt;

/// A term: a quantified variable or a terminal constant `l_i` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Exists(String, Box<Formula>),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Adjacency atom `t1 ~ t2`.
    Adj(Term, Term),
    /// Equality atom `t1 = t2`.
    Eq(Term, Term),
}

impl Formula {
    pub fn exists(x: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(body: Formula) -> Formula {
        Formula::Not(Box::new(body))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    /// Number of quantifier nodes. Desugared universals contribute one each.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Exists(_, body) => 1 + body.quantifier_count(),
            Formula::Not(body) => body.quantifier_count(),
            Formula::Or(l, r) => l.quantifier_count() + r.quantifier_count(),
            Formula::Adj(..) | Formula::Eq(..) => 0,
        }
    }

    /// Largest constant index referenced, or 0 if none.
    pub fn max_constant(&self) -> usize {
        let term = |t: &Term| match t {
            Term::Const(i) => *i,
            Term::Var(_) => 0,
        };
        match self {
            Formula::Exists(_, body) => body.max_constant(),
            Formula::Not(body) => body.max_constant(),
            Formula::Or(l, r) => l.max_constant().max(r.max_constant()),
            Formula::Adj(a, b) | Formula::Eq(a, b) => term(a).max(term(b)),
        }
    }

    /// Free variables, in first-use order.
    pub fn free_variables(&self) -> Vec<String> {
        fn walk(f: &Formula, scope: &mut Vec<String>, out: &mut Vec<String>) {
            match f {
                Formula::Exists(x, body) => {
                    scope.push(x.clone());
                    walk(body, scope, out);
                    scope.pop();
                }
                Formula::Not(body) => walk(body, scope, out),
                Formula::Or(l, r) => {
                    walk(l, scope, out);
                    walk(r, scope, out);
                }
                Formula::Adj(a, b) | Formula::Eq(a, b) => {
                    for t in [a, b] {
                        if let Term::Var(name) = t {
                            if !scope.contains(name) && !out.contains(name) {
                                out.push(name.clone());
                            }
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) => write!(f, "{name}"),
            Term::Const(i) => write!(f, "L{i}"),
        }
    }
}

/// Canonical ASCII rendering; parses back to the identical AST.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Exists(x, body) => write!(f, "E {x}. {body}"),
            Formula::Not(body) => write!(f, "!{body}"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Adj(a, b) => write!(f, "({a} ~ {b})"),
            Formula::Eq(a, b) => write!(f, "({a} = {b})"),
        }
    }
}
