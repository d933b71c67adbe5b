//! Brute-force model checker. Existential quantification extends the
//! terminal labeling by one entry ranging over every vertex, which is
//! exactly the inductive semantics; bindings are kept in an environment
//! instead of rewriting the formula.

use super::ast::{Formula, Term};
use super::LogicError;
use crate::graph::Graph;

/// Decides whether the sentence `phi` holds on `g`. Errors if `phi` has a
/// free variable or references a constant beyond the graph's k.
pub fn model_check(g: &Graph, phi: &Formula) -> Result<bool, LogicError> {
    if let Some(name) = phi.free_variables().first() {
        return Err(LogicError::FreeVariable(name.clone()));
    }
    let max_const = phi.max_constant();
    if max_const > g.k() {
        return Err(LogicError::ConstantOutOfRange { index: max_const, k: g.k() });
    }
    let mut env = Vec::new();
    Ok(eval(g, phi, &mut env))
}

fn resolve(g: &Graph, env: &[(String, usize)], term: &Term) -> usize {
    match term {
        Term::Const(i) => g.terminals()[i - 1],
        Term::Var(name) => {
            env.iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|&(_, v)| v)
                .expect("bound variable")
        }
    }
}

fn eval(g: &Graph, phi: &Formula, env: &mut Vec<(String, usize)>) -> bool {
    match phi {
        Formula::Eq(a, b) => resolve(g, env, a) == resolve(g, env, b),
        Formula::Adj(a, b) => g.has_edge(resolve(g, env, a), resolve(g, env, b)),
        Formula::Not(body) => !eval(g, body, env),
        Formula::Or(l, r) => eval(g, l, env) || eval(g, r, env),
        Formula::Exists(x, body) => {
            for v in 0..g.vertex_count() {
                env.push((x.clone(), v));
                let holds = eval(g, body, env);
                env.pop();
                if holds {
                    return true;
                }
            }
            false
        }
    }
}
