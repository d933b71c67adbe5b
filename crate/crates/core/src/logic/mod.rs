//! First-order logic over k-terminal graphs: AST, text parser, brute-force
//! model checker, and the Ehrenfeucht-Fraisse equivalence oracle.

mod ast;
mod ef;
mod eval;
mod parser;

pub use ast::{Formula, Term};
pub use ef::{ef_equivalent, ef_equivalent_with};
pub use eval::model_check;
pub use parser::{parse_formula, ParseError};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("terminal label count mismatch: {left} vs {right}")]
    TerminalCountMismatch { left: usize, right: usize },
    #[error("constant L{index} exceeds the graph's terminal count k = {k}")]
    ConstantOutOfRange { index: usize, k: usize },
    #[error("formula is not a sentence: free variable `{0}`")]
    FreeVariable(String),
}
