//! q-round Ehrenfeucht-Fraisse game between two k-terminal graphs.
//!
//! Initial pebbles sit on the terminal pairs (T1(i), T2(i)). Duplicator
//! wins iff for every Spoiler vertex choice in either graph there is a
//! reply that keeps the pebbled partial map an isomorphism (equality,
//! adjacency, and constant positions). A Duplicator win certifies that the
//! graphs satisfy exactly the same sentences of quantifier depth at most
//! q, which covers every sentence with at most q quantifiers.

use std::collections::HashMap;

use super::LogicError;
use crate::graph::Graph;

struct Ctx {
    n1: usize,
    n2: usize,
    adj1: Vec<bool>,
    adj2: Vec<bool>,
}

impl Ctx {
    fn new(g1: &Graph, g2: &Graph) -> Self {
        let dense = |g: &Graph| {
            let n = g.vertex_count();
            let mut m = vec![false; n * n];
            for (u, v) in g.edges() {
                m[u * n + v] = true;
                m[v * n + u] = true;
            }
            m
        };
        Ctx { n1: g1.vertex_count(), n2: g2.vertex_count(), adj1: dense(g1), adj2: dense(g2) }
    }

    #[inline]
    fn consistent(&self, (a, b): (usize, usize), (x, y): (usize, usize)) -> bool {
        ((a == x) == (b == y)) && (self.adj1[a * self.n1 + x] == self.adj2[b * self.n2 + y])
    }
}

type Memo = Option<HashMap<(usize, Vec<(usize, usize)>), bool>>;

/// Game states are memoized by the *set* of pebble pairs: the game value
/// does not depend on the order pebbles were placed. The memo can be
/// switched off to differential-test the bare search.
pub fn ef_equivalent_with(
    g1: &Graph,
    g2: &Graph,
    q: usize,
    memoize: bool,
) -> Result<bool, LogicError> {
    if g1.k() != g2.k() {
        return Err(LogicError::TerminalCountMismatch { left: g1.k(), right: g2.k() });
    }
    let ctx = Ctx::new(g1, g2);
    let mut pos: Vec<(usize, usize)> = g1
        .terminals()
        .iter()
        .copied()
        .zip(g2.terminals().iter().copied())
        .collect();
    // the initial pebbling must itself be a partial isomorphism
    for i in 0..pos.len() {
        for j in 0..i {
            if !ctx.consistent(pos[i], pos[j]) {
                return Ok(false);
            }
        }
    }
    let mut memo = if memoize { Some(HashMap::new()) } else { None };
    Ok(duplicator_wins(&ctx, &mut pos, q, &mut memo))
}

pub fn ef_equivalent(g1: &Graph, g2: &Graph, q: usize) -> Result<bool, LogicError> {
    ef_equivalent_with(g1, g2, q, true)
}

fn duplicator_wins(ctx: &Ctx, pos: &mut Vec<(usize, usize)>, rounds: usize, memo: &mut Memo) -> bool {
    if rounds == 0 {
        return true;
    }
    let key = memo.as_ref().map(|_| {
        let mut k = pos.clone();
        k.sort_unstable();
        k.dedup();
        (rounds, k)
    });
    if let (Some(m), Some(k)) = (memo.as_ref(), key.as_ref()) {
        if let Some(&hit) = m.get(k) {
            return hit;
        }
    }
    let result =
        spoiler_side(ctx, pos, rounds, memo, false) && spoiler_side(ctx, pos, rounds, memo, true);
    if let (Some(m), Some(k)) = (memo.as_mut(), key) {
        m.insert(k, result);
    }
    result
}

/// One Spoiler side: every choice in the picked graph must admit a reply.
fn spoiler_side(
    ctx: &Ctx,
    pos: &mut Vec<(usize, usize)>,
    rounds: usize,
    memo: &mut Memo,
    swap: bool,
) -> bool {
    let (pick_n, reply_n) = if swap { (ctx.n2, ctx.n1) } else { (ctx.n1, ctx.n2) };
    'choices: for choice in 0..pick_n {
        for reply in 0..reply_n {
            let pair = if swap { (reply, choice) } else { (choice, reply) };
            if pos.iter().all(|&prev| ctx.consistent(pair, prev)) {
                pos.push(pair);
                let won = duplicator_wins(ctx, pos, rounds - 1, memo);
                pos.pop();
                if won {
                    continue 'choices;
                }
            }
        }
        return false;
    }
    true
}
