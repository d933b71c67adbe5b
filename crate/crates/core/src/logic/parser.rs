//! Recursive-descent parser for the ASCII formula grammar:
//!
//! ```text
//! phi  := 'E' ident '.' phi
//!       | 'A' ident '.' phi
//!       | '!' phi
//!       | '(' phi '|' phi ')'
//!       | '(' phi '&' phi ')'
//!       | '(' term '~' term ')'
//!       | '(' term '=' term ')'
//! term := ident | 'L' digits
//! ```
//!
//! Whitespace insensitive. `A x. phi` desugars to `!E x. !phi` and
//! `(a & b)` to `!(!a | !b)`, so the AST only carries the core grammar.
//! Offsets in errors are 1-based character positions.

use super::ast::{Formula, Term};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("free variable `{name}` at offset {offset}")]
    FreeVariable { name: String, offset: usize },
    #[error("shadowed variable `{name}` at offset {offset}")]
    ShadowedVariable { name: String, offset: usize },
    #[error("constant L{index} at offset {offset} exceeds declared k = {k}")]
    ConstantOutOfRange { index: usize, offset: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Dot,
    Bang,
    Pipe,
    Amp,
    Tilde,
    Equals,
    Exists,
    Forall,
    Ident(String),
    Constant(usize),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let offset = i + 1;
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '.' => Some(Tok::Dot),
            '!' => Some(Tok::Bang),
            '|' => Some(Tok::Pipe),
            '&' => Some(Tok::Amp),
            '~' => Some(Tok::Tilde),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = simple {
            toks.push(Spanned { tok, offset });
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "E" => Tok::Exists,
                "A" => Tok::Forall,
                _ => {
                    let digits = &word[1..];
                    if word.starts_with('L') && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                        let index = digits.parse().map_err(|_| ParseError::Syntax {
                            offset: start + 1,
                            message: format!("constant index out of range in `{word}`"),
                        })?;
                        Tok::Constant(index)
                    } else {
                        Tok::Ident(word)
                    }
                }
            };
            toks.push(Spanned { tok, offset: start + 1 });
            continue;
        }
        return Err(ParseError::Syntax {
            offset,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof_offset: usize,
    k: usize,
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eof_offset, |s| s.offset)
    }

    fn advance(&mut self) -> Option<Spanned> {
        let s = self.toks.get(self.pos).cloned();
        if s.is_some() {
            self.pos += 1;
        }
        s
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { offset: self.offset(), message: message.into() }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.advance();
                Ok(())
            }
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn quantifier(&mut self, universal: bool) -> Result<Formula, ParseError> {
        self.advance();
        let (name, offset) = match self.advance() {
            Some(Spanned { tok: Tok::Ident(name), offset }) => (name, offset),
            _ => return Err(self.syntax("expected variable name after quantifier")),
        };
        if self.scope.contains(&name) {
            return Err(ParseError::ShadowedVariable { name, offset });
        }
        self.expect(Tok::Dot, "`.` after quantified variable")?;
        self.scope.push(name.clone());
        let body = self.phi()?;
        self.scope.pop();
        Ok(if universal {
            Formula::not(Formula::exists(name, Formula::not(body)))
        } else {
            Formula::exists(name, body)
        })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.advance();
                if self.scope.contains(&name) {
                    Ok(Term::Var(name))
                } else {
                    Err(ParseError::FreeVariable { name, offset })
                }
            }
            Some(Tok::Constant(index)) => {
                self.advance();
                if index == 0 || index > self.k {
                    Err(ParseError::ConstantOutOfRange { index, offset, k: self.k })
                } else {
                    Ok(Term::Const(index))
                }
            }
            _ => Err(ParseError::Syntax { offset, message: "expected term".into() }),
        }
    }

    fn parenthesized(&mut self) -> Result<Formula, ParseError> {
        self.advance(); // '('
        let atom_start = matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Constant(_)));
        if atom_start {
            let a = self.term()?;
            let phi = match self.peek() {
                Some(Tok::Tilde) => {
                    self.advance();
                    let b = self.term()?;
                    Formula::Adj(a, b)
                }
                Some(Tok::Equals) => {
                    self.advance();
                    let b = self.term()?;
                    Formula::Eq(a, b)
                }
                _ => return Err(self.syntax("expected `~` or `=` in atom")),
            };
            self.expect(Tok::RParen, "`)`")?;
            Ok(phi)
        } else {
            let l = self.phi()?;
            let op = match self.peek() {
                Some(Tok::Pipe) => false,
                Some(Tok::Amp) => true,
                _ => return Err(self.syntax("expected `|` or `&`")),
            };
            self.advance();
            let r = self.phi()?;
            self.expect(Tok::RParen, "`)`")?;
            Ok(if op {
                Formula::not(Formula::or(Formula::not(l), Formula::not(r)))
            } else {
                Formula::or(l, r)
            })
        }
    }

    fn phi(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Exists) => self.quantifier(false),
            Some(Tok::Forall) => self.quantifier(true),
            Some(Tok::Bang) => {
                self.advance();
                Ok(Formula::not(self.phi()?))
            }
            Some(Tok::LParen) => self.parenthesized(),
            _ => Err(self.syntax("expected formula")),
        }
    }
}

/// Parses a sentence over constants `L1..Lk`. Rejects free variables,
/// shadowing, and constants beyond `k`.
pub fn parse_formula(text: &str, k: usize) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let eof_offset = text.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, eof_offset, k, scope: Vec::new() };
    let phi = p.phi()?;
    if p.pos != p.toks.len() {
        return Err(p.syntax("trailing input after formula"));
    }
    debug_assert!(phi.free_variables().is_empty());
    Ok(phi)
}
