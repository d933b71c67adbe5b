//! Block isomorphism over ranked path decompositions: the three-condition
//! test, compact signatures whose equality coincides with it, pigeonhole
//! searches for repeated blocks, and the bag-window locality bound.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

use crate::graph::Graph;
use crate::pathdecomp::RankedDecomposition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("block length mismatch: [{s1}, {t1}] vs [{s2}, {t2}]")]
    LengthMismatch { s1: usize, t1: usize, s2: usize, t2: usize },
    #[error("bag index {index} out of range (len = {len})")]
    OutOfRange { index: usize, len: usize },
    #[error("terminal set varies inside the window at bag {bag}")]
    TerminalSetVaries { bag: usize },
    #[error("pigeonhole window too small: {0}")]
    WindowTooSmall(String),
    #[error("non-terminal vertex {vertex} occurs in {count} bags, bound is {bound}")]
    OccurrenceBound { vertex: usize, count: usize, bound: usize },
    #[error("vertex {vertex} is not in bag {bag}")]
    VertexNotInBag { vertex: usize, bag: usize },
    #[error("vertex {0} is a terminal")]
    TerminalVertex(usize),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
}

fn check_range(rpd: &RankedDecomposition, index: usize) -> Result<(), BlockError> {
    if index >= rpd.len() {
        Err(BlockError::OutOfRange { index, len: rpd.len() })
    } else {
        Ok(())
    }
}

/// Vertices occurring in the bags `[s, t]`.
fn block_vertices(rpd: &RankedDecomposition, s: usize, t: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for j in s..=t {
        out.extend(rpd.bag(j).iter().copied());
    }
    out
}

/// The canonical rank/first-occurrence mapping from block [s1, t1] to block
/// [s2, s2 + (t1 - s1)]: each vertex goes to the vertex of the matching
/// offset bag that carries its rank. None if some target rank is missing.
pub fn canonical_block_map(
    rpd: &RankedDecomposition,
    s1: usize,
    t1: usize,
    s2: usize,
) -> Option<BTreeMap<usize, usize>> {
    let mut map = BTreeMap::new();
    for v in block_vertices(rpd, s1, t1) {
        let first = (s1..=t1).find(|&j| rpd.bag(j).contains(&v)).expect("member bag");
        let rank = rpd.rank_of(v).expect("ranked vertex");
        let target = rpd.vertex_with_rank(s2 + (first - s1), rank)?;
        map.insert(v, target);
    }
    Some(map)
}

/// The three-condition block-isomorphism test: per-bag per-rank occupancy,
/// matching rank introductions, and the canonical mapping being a
/// terminal-respecting isomorphism between the two induced subgraphs
/// (terminals included).
pub fn block_isomorphic(
    rpd: &RankedDecomposition,
    g: &Graph,
    s1: usize,
    t1: usize,
    s2: usize,
    t2: usize,
) -> Result<bool, BlockError> {
    if t1 < s1 || t2 < s2 || t1 - s1 != t2 - s2 {
        return Err(BlockError::LengthMismatch { s1, t1, s2, t2 });
    }
    for idx in [s1, t1, s2, t2] {
        check_range(rpd, idx)?;
    }

    // condition 1: equal rank occupancy per offset
    for d in 0..=(t1 - s1) {
        if rpd.rank_set(s1 + d) != rpd.rank_set(s2 + d) {
            return Ok(false);
        }
    }
    // condition 2: matching introductions for every non-initial offset
    for d in 1..=(t1 - s1) {
        if introduced_ranks(rpd, s1 + d) != introduced_ranks(rpd, s2 + d) {
            return Ok(false);
        }
    }
    // condition 3: the canonical map is a terminal-respecting isomorphism
    let map = match canonical_block_map(rpd, s1, t1, s2) {
        Some(m) => m,
        None => return Ok(false),
    };
    let bv1 = block_vertices(rpd, s1, t1);
    let bv2 = block_vertices(rpd, s2, t2);
    let terminal_set = g.terminal_set();

    let mut full: BTreeMap<usize, usize> = map;
    for &t in &terminal_set {
        full.entry(t).or_insert(t);
    }
    let w1: BTreeSet<usize> = bv1.union(&terminal_set).copied().collect();
    let w2: BTreeSet<usize> = bv2.union(&terminal_set).copied().collect();
    let image: BTreeSet<usize> = full.values().copied().collect();
    if image.len() != full.len() || image != w2 || full.len() != w1.len() {
        return Ok(false);
    }
    for i in 0..g.k() {
        let t = g.terminals()[i];
        if full.get(&t) != Some(&t) {
            return Ok(false);
        }
    }
    let verts: Vec<usize> = w1.iter().copied().collect();
    for (i, &u) in verts.iter().enumerate() {
        for &v in &verts[i + 1..] {
            if g.has_edge(u, v) != g.has_edge(full[&u], full[&v]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn introduced_ranks(rpd: &RankedDecomposition, j: usize) -> BTreeSet<usize> {
    rpd.bag(j)
        .iter()
        .filter(|v| !rpd.bag(j - 1).contains(v))
        .map(|v| rpd.rank_of(*v).expect("ranked vertex"))
        .collect()
}

/// Per-offset payload of a block signature, in (offset, rank) coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct OffsetSignature {
    ranks: Vec<usize>,
    /// Ranks introduced relative to the previous bag. For the first bag of
    /// the block every rank counts as introduced relative to the block.
    introduced: Vec<usize>,
    /// Edges among this bag's vertices as (low rank, high rank) pairs.
    inbag_edges: Vec<(usize, usize)>,
    /// (rank, terminal label position) pairs, positions 1-based; repeated
    /// terminals are recorded per position.
    terminal_adjacency: Vec<(usize, usize)>,
}

/// Signature of a block inside a window of constant terminal set. Two
/// blocks of equal length inside such windows are block-isomorphic iff
/// their signatures are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSignature {
    window_terminals: Vec<usize>,
    offsets: Vec<OffsetSignature>,
}

impl BlockSignature {
    /// Size of the canonical bit encoding, excluding the window terminal
    /// set (which is precondition data shared by compared blocks):
    /// per offset, rank membership and introductions cost p bits each,
    /// in-bag adjacency at most p(p-1)/2, terminal adjacency p*k.
    pub fn bit_length(&self, num_ranks: usize, k: usize) -> usize {
        let p = num_ranks;
        self.offsets.len() * (2 * p + p * (p - 1) / 2 + p * k)
    }

    pub fn block_length(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }
}

/// Computes the signature of the block [s, s + len]. Errors if any two
/// bags of the block carry different terminal sets.
pub fn block_signature(
    rpd: &RankedDecomposition,
    g: &Graph,
    s: usize,
    len: usize,
) -> Result<BlockSignature, BlockError> {
    check_range(rpd, s)?;
    check_range(rpd, s + len)?;
    let terminal_set = g.terminal_set();
    let window_terminals: Vec<usize> = rpd
        .bag(s)
        .iter()
        .copied()
        .filter(|v| terminal_set.contains(v))
        .collect();
    let mut offsets = Vec::with_capacity(len + 1);
    for d in 0..=len {
        let j = s + d;
        let bag = rpd.bag(j);
        let in_window: Vec<usize> = bag.iter().copied().filter(|v| terminal_set.contains(v)).collect();
        if in_window != window_terminals {
            return Err(BlockError::TerminalSetVaries { bag: j });
        }
        let rank = |v: usize| rpd.rank_of(v).expect("ranked vertex");
        let mut ranks: Vec<usize> = bag.iter().map(|&v| rank(v)).collect();
        ranks.sort_unstable();
        let mut introduced: Vec<usize> = if d == 0 {
            ranks.clone()
        } else {
            bag.iter()
                .filter(|v| !rpd.bag(j - 1).contains(v))
                .map(|&v| rank(v))
                .collect()
        };
        introduced.sort_unstable();
        let verts: Vec<usize> = bag.iter().copied().collect();
        let mut inbag_edges = Vec::new();
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                if g.has_edge(u, v) {
                    let (a, b) = (rank(u).min(rank(v)), rank(u).max(rank(v)));
                    inbag_edges.push((a, b));
                }
            }
        }
        inbag_edges.sort_unstable();
        let mut terminal_adjacency = Vec::new();
        for &u in &verts {
            for (pos, &t) in g.terminals().iter().enumerate() {
                if g.has_edge(u, t) {
                    terminal_adjacency.push((rank(u), pos + 1));
                }
            }
        }
        terminal_adjacency.sort_unstable();
        terminal_adjacency.dedup();
        offsets.push(OffsetSignature { ranks, introduced, inbag_edges, terminal_adjacency });
    }
    Ok(BlockSignature { window_terminals, offsets })
}

/// Scans the stride-(l+1) progression from `s` for two signature-equal
/// block starts. `r_cap` limits the scan to `[s, s + r_cap - (l + 1)]`
/// (lab mode); without it the scan runs to the end of the window. The
/// returned pair is re-checked with [`block_isomorphic`].
pub fn find_pair(
    rpd: &RankedDecomposition,
    g: &Graph,
    t1: usize,
    t2: usize,
    l: usize,
    s: usize,
    r_cap: Option<usize>,
) -> Result<(usize, usize), BlockError> {
    check_range(rpd, t1)?;
    check_range(rpd, t2)?;
    let mut limit = t2.saturating_sub(l);
    if let Some(r) = r_cap {
        limit = limit.min(s + r.saturating_sub(l + 1));
    }
    if s + (l + 1) > limit {
        return Err(BlockError::WindowTooSmall(format!(
            "no two stride-{} starts fit in [{}, {}]",
            l + 1,
            s,
            limit
        )));
    }
    let mut seen: HashMap<BlockSignature, usize> = HashMap::new();
    let mut j = s;
    while j <= limit {
        let sig = block_signature(rpd, g, j, l)?;
        if let Some(&first) = seen.get(&sig) {
            if !block_isomorphic(rpd, g, first, first + l, j, j + l)? {
                return Err(BlockError::Postcondition(format!(
                    "signature match at ({first}, {j}) fails block_isomorphic"
                )));
            }
            return Ok((first, j));
        }
        seen.insert(sig, j);
        j += l + 1;
    }
    Err(BlockError::WindowTooSmall(format!(
        "no signature-equal pair on the stride-{} progression in [{s}, {limit}]",
        l + 1
    )))
}

/// Scans the stride-(r+1) progression from `t1` for q+1 signature-equal
/// block starts with pairwise gap > r. `rstar_cap` bounds the scan length
/// in lab mode. Every returned pair is re-checked with
/// [`block_isomorphic`].
pub fn find_repeats(
    rpd: &RankedDecomposition,
    g: &Graph,
    t1: usize,
    t2: usize,
    r: usize,
    q: usize,
    rstar_cap: Option<usize>,
) -> Result<Vec<usize>, BlockError> {
    check_range(rpd, t1)?;
    check_range(rpd, t2)?;
    let mut limit = t2.saturating_sub(r);
    if let Some(rstar) = rstar_cap {
        limit = limit.min(t1 + rstar.saturating_sub(r + 1));
    }
    if t1 > limit {
        return Err(BlockError::WindowTooSmall(format!(
            "no stride-{} starts fit in [{t1}, {limit}]",
            r + 1
        )));
    }
    let mut classes: HashMap<BlockSignature, Vec<usize>> = HashMap::new();
    let mut j = t1;
    while j <= limit {
        let sig = block_signature(rpd, g, j, r)?;
        let members = classes.entry(sig).or_default();
        members.push(j);
        if members.len() == q + 1 {
            let found = members.clone();
            for (a, &x) in found.iter().enumerate() {
                for &y in &found[a + 1..] {
                    if y - x <= r {
                        return Err(BlockError::Postcondition(format!(
                            "repeat spacing {x}..{y} not greater than {r}"
                        )));
                    }
                    if !block_isomorphic(rpd, g, x, x + r, y, y + r)? {
                        return Err(BlockError::Postcondition(format!(
                            "signature class members ({x}, {y}) fail block_isomorphic"
                        )));
                    }
                }
            }
            return Ok(found);
        }
        j += r + 1;
    }
    Err(BlockError::WindowTooSmall(format!(
        "no signature class reached {} members on the stride-{} progression",
        q + 1,
        r + 1
    )))
}

/// Bag-window locality check: given that every non-terminal occurs in at
/// most `dbound` bags, every non-terminal of the ball B_r(v) around
/// `v` (a non-terminal member of bag `j`) must occur in a bag with index
/// in `[j - r*dbound, j + r*dbound]`.
pub fn ball_within_window(
    rpd: &RankedDecomposition,
    g: &Graph,
    v: usize,
    j: usize,
    r: usize,
    dbound: usize,
) -> Result<bool, BlockError> {
    check_range(rpd, j)?;
    for u in g.vertices() {
        if !g.is_terminal(u) {
            let count = rpd
                .occurrence_count(u)
                .map_err(|_| BlockError::VertexNotInBag { vertex: u, bag: 0 })?;
            if count > dbound {
                return Err(BlockError::OccurrenceBound { vertex: u, count, bound: dbound });
            }
        }
    }
    if g.is_terminal(v) {
        return Err(BlockError::TerminalVertex(v));
    }
    if !rpd.bag(j).contains(&v) {
        return Err(BlockError::VertexNotInBag { vertex: v, bag: j });
    }
    let ball = g.ball(v, r).expect("non-terminal center");
    let lo = j.saturating_sub(r * dbound);
    let hi = j + r * dbound;
    for &old_id in &ball.to_old {
        if g.is_terminal(old_id) {
            continue;
        }
        let (s, t) = match rpd.span(old_id) {
            Some(span) => span,
            None => return Ok(false),
        };
        if s.max(lo) > t.min(hi) {
            return Ok(false);
        }
    }
    Ok(true)
}
