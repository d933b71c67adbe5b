//! The rewiring surgery on a ranked path decomposition, its safety
//! certificate, identical-part extraction and deletion, and the
//! interval-collapse used by the simplification pipeline.
//!
//! Bag indices are 0-based here; the safety margins convert to 1-based
//! positions so the inequalities read the same as on paper.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::blockiso::{block_isomorphic, canonical_block_map, BlockError};
use crate::graph::{
    is_terminal_respecting_isomorphism, Graph, GraphError, VertexMapping,
};
use crate::pathdecomp::RankedDecomposition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewireError {
    #[error("cut pairs disagree on offsets: {0:?}")]
    MismatchedCutPairs(Vec<(usize, usize)>),
    #[error("parts are not disjoint")]
    OverlappingParts,
    #[error("witness validation failed for part {0}")]
    WitnessInvalid(usize),
    #[error("need at least {need} identical parts, have {have}")]
    NotEnoughParts { need: usize, have: usize },
    #[error("rank {rank} present in the right cut bag has no mate in the left cut bag")]
    IdentificationTargetMissing { rank: usize },
    #[error("collapse would delete or merge terminal {0}")]
    TerminalAffected(usize),
    #[error("collapse produced an invalid decomposition: {0}")]
    CollapseInvalid(String),
    #[error("bag index {index} out of range (len = {len})")]
    BagOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Block(#[from] BlockError),
}

/// Violations of the rewiring safety conditions, reported in check order.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SafetyViolation {
    #[error("non-terminal vertex {vertex} occurs in {count} bags, bound is {bound}")]
    OccurrenceBound { vertex: usize, count: usize, bound: usize },
    #[error("left margin violated: need s1 > 4L (s1 = {s1}, L = {l}, 1-based)")]
    LeftMargin { s1: usize, l: usize },
    #[error("right margin violated: need s2 < l - 4L (s2 = {s2}, bags = {bags}, L = {l}, 1-based)")]
    RightMargin { s2: usize, bags: usize, l: usize },
    #[error("cut gap violated: need s2 - s1 > 6L (gap = {gap}, L = {l})")]
    CutGap { gap: usize, l: usize },
    #[error("blocks around the cuts are not block-isomorphic at radius {l}")]
    BlocksNotIsomorphic { l: usize },
    #[error("block comparison failed: {0}")]
    Block(#[from] BlockError),
}

/// Certificate that rewiring at (s1, s2) preserves all sentences with at
/// most q quantifiers. Carries the canonical block map f* between the two
/// radius-L blocks around the cuts.
#[derive(Debug, Clone)]
pub struct SafetyCertificate {
    pub s1: usize,
    pub s2: usize,
    pub q: usize,
    pub dbound: usize,
    pub l: usize,
    pub block_map: BTreeMap<usize, usize>,
}

/// One of a family of pairwise identical vertex sets. The witness is a
/// terminal-respecting self-isomorphism of the whole graph swapping this
/// part with the family's first part and fixing everything else (the
/// identity for the first part itself).
#[derive(Debug, Clone)]
pub struct IdenticalPart {
    pub vertices: BTreeSet<usize>,
    pub witness: VertexMapping,
}

fn span(rpd: &RankedDecomposition, v: usize) -> (usize, usize) {
    rpd.span(v).expect("vertex occurs in the decomposition")
}

/// Applies the two rewiring clauses literally and returns the edited
/// graph. Edges incident to terminals are untouched; the decomposition is
/// not updated (the result is generally not covered by it).
///
/// Clause (i): an edge from a non-terminal v in bag s1 to a non-terminal u
/// occurring only strictly between the cuts is replaced by an edge from u
/// to the vertex of bag s2 with v's rank, when that vertex exists.
/// Clause (ii): symmetrically, edges from non-terminals of bag s2 to
/// non-terminals occurring only after s2 are re-routed to the
/// rank-matching vertex of bag s1.
pub fn rewire(g: &Graph, rpd: &RankedDecomposition, s1: usize, s2: usize) -> Graph {
    assert!(s1 < s2 && s2 < rpd.len(), "cut indices in range");
    let strictly_between = |u: usize| {
        let (s, t) = span(rpd, u);
        s > s1 && t < s2
    };
    let after = |u: usize| span(rpd, u).0 > s2;

    let mut deletions: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut additions: BTreeSet<(usize, usize)> = BTreeSet::new();
    let norm = |a: usize, b: usize| (a.min(b), a.max(b));

    for &v in rpd.bag(s1) {
        if g.is_terminal(v) {
            continue;
        }
        let mate = rpd.vertex_with_rank(s2, rpd.rank_of(v).expect("ranked"));
        for &u in g.neighbors(v) {
            if !g.is_terminal(u) && strictly_between(u) {
                deletions.insert(norm(u, v));
                if let Some(m) = mate {
                    additions.insert(norm(u, m));
                }
            }
        }
    }
    for &v in rpd.bag(s2) {
        if g.is_terminal(v) {
            continue;
        }
        let mate = rpd.vertex_with_rank(s1, rpd.rank_of(v).expect("ranked"));
        for &u in g.neighbors(v) {
            if !g.is_terminal(u) && after(u) {
                deletions.insert(norm(u, v));
                if let Some(m) = mate {
                    additions.insert(norm(u, m));
                }
            }
        }
    }

    let mut edges: BTreeSet<(usize, usize)> = g.edges().into_iter().collect();
    for e in deletions {
        edges.remove(&e);
    }
    edges.extend(additions);
    g.with_edges(edges).expect("rewired edge set")
}

/// Verifies the rewiring safety conditions: the global occurrence bound,
/// the three positional margins for L = dbound * (2^q - 1), and
/// block-isomorphism of the radius-L blocks around the cuts.
pub fn check_rewire_safety(
    g: &Graph,
    rpd: &RankedDecomposition,
    s1: usize,
    s2: usize,
    q: usize,
    dbound: usize,
) -> Result<SafetyCertificate, SafetyViolation> {
    for v in g.vertices() {
        if !g.is_terminal(v) {
            let count = rpd.occurrence_count(v).map_err(|_| SafetyViolation::OccurrenceBound {
                vertex: v,
                count: 0,
                bound: dbound,
            })?;
            if count > dbound {
                return Err(SafetyViolation::OccurrenceBound { vertex: v, count, bound: dbound });
            }
        }
    }
    let l = dbound * ((1usize << q) - 1);
    let bags = rpd.len();
    // positions are 1-based in the margin arithmetic
    let p1 = s1 + 1;
    let p2 = s2 + 1;
    if p1 <= 4 * l {
        return Err(SafetyViolation::LeftMargin { s1: p1, l });
    }
    if p2 + 4 * l >= bags {
        return Err(SafetyViolation::RightMargin { s2: p2, bags, l });
    }
    if p2 - p1 <= 6 * l {
        return Err(SafetyViolation::CutGap { gap: p2 - p1, l });
    }
    if !block_isomorphic(rpd, g, s1 - l, s1 + l, s2 - l, s2 + l)? {
        return Err(SafetyViolation::BlocksNotIsomorphic { l });
    }
    let block_map = canonical_block_map(rpd, s1 - l, s1 + l, s2 - l)
        .expect("map exists for isomorphic blocks");
    Ok(SafetyCertificate { s1, s2, q, dbound, l, block_map })
}

/// The part carved out by a rewired cut pair (c1, c2): the vertices
/// occurring only strictly between the cuts, plus the right cut bag,
/// minus terminals.
pub fn part_vertices(
    rpd: &RankedDecomposition,
    g: &Graph,
    c1: usize,
    c2: usize,
) -> BTreeSet<usize> {
    let mut part: BTreeSet<usize> = BTreeSet::new();
    for v in rpd.decomposition().vertices() {
        let (s, t) = span(rpd, v);
        if s > c1 && t < c2 {
            part.insert(v);
        }
    }
    part.extend(rpd.bag(c2).iter().copied());
    part.retain(|&v| !g.is_terminal(v));
    part
}

/// Extracts the identical parts produced by rewiring at every cut pair.
/// The cut pairs must sit at the same offsets inside pairwise
/// block-isomorphic windows and the rewiring must already have been
/// applied to `g`. Each part's witness is rebuilt from the canonical
/// block maps and re-validated as a terminal-respecting self-isomorphism.
pub fn extract_identical_parts(
    g: &Graph,
    rpd: &RankedDecomposition,
    cut_pairs: &[(usize, usize)],
) -> Result<Vec<IdenticalPart>, RewireError> {
    let mut pairs = cut_pairs.to_vec();
    pairs.sort_unstable();
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    for &(c1, c2) in &pairs {
        if c1 >= c2 {
            return Err(RewireError::MismatchedCutPairs(pairs));
        }
        if c2 >= rpd.len() {
            return Err(RewireError::BagOutOfRange { index: c2, len: rpd.len() });
        }
    }
    let gap = pairs[0].1 - pairs[0].0;
    if pairs.iter().any(|&(c1, c2)| c2 - c1 != gap) {
        return Err(RewireError::MismatchedCutPairs(pairs));
    }

    let parts: Vec<BTreeSet<usize>> = pairs
        .iter()
        .map(|&(c1, c2)| part_vertices(rpd, g, c1, c2))
        .collect();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for part in &parts {
        for &v in part {
            if !seen.insert(v) {
                return Err(RewireError::OverlappingParts);
            }
        }
    }

    let mut out = Vec::with_capacity(parts.len());
    for (idx, part) in parts.iter().enumerate() {
        let witness = if idx == 0 {
            VertexMapping::identity(g.vertex_count())
        } else {
            // canonical map over the blocks [c1, c2], swapping part 0 with
            // part idx and fixing everything else
            let (a1, a2) = pairs[0];
            let (b1, _) = pairs[idx];
            let fwd = canonical_block_map(rpd, a1, a2, b1)
                .ok_or(RewireError::WitnessInvalid(idx))?;
            let mut forward: Vec<usize> = (0..g.vertex_count()).collect();
            for &v in &parts[0] {
                let w = *fwd.get(&v).ok_or(RewireError::WitnessInvalid(idx))?;
                if !part.contains(&w) {
                    return Err(RewireError::WitnessInvalid(idx));
                }
                forward[v] = w;
                forward[w] = v;
            }
            VertexMapping::new(forward)
        };
        if !is_terminal_respecting_isomorphism(g, g, &witness) {
            return Err(RewireError::WitnessInvalid(idx));
        }
        out.push(IdenticalPart { vertices: part.clone(), witness });
    }
    Ok(out)
}

fn witness_swaps(g: &Graph, first: &BTreeSet<usize>, part: &BTreeSet<usize>, w: &VertexMapping) -> bool {
    if w.len() != g.vertex_count() {
        return false;
    }
    for v in g.vertices() {
        let image = w.map(v);
        if first.contains(&v) {
            if !part.contains(&image) {
                return false;
            }
        } else if part.contains(&v) {
            if !first.contains(&image) {
                return false;
            }
        } else if image != v {
            return false;
        }
    }
    true
}

/// Deletes the first of at least q + 1 pairwise identical parts. All
/// witnesses are re-validated before the cut. The surviving graph keeps
/// its terminals; `to_old` traces the dense renumbering.
pub fn delete_one_part(
    g: &Graph,
    parts: &[IdenticalPart],
    q: usize,
) -> Result<(Graph, Vec<usize>), RewireError> {
    if parts.len() < q + 1 {
        return Err(RewireError::NotEnoughParts { need: q + 1, have: parts.len() });
    }
    let first = &parts[0].vertices;
    for (idx, part) in parts.iter().enumerate() {
        if !is_terminal_respecting_isomorphism(g, g, &part.witness)
            || !witness_swaps(g, first, &part.vertices, &part.witness)
        {
            return Err(RewireError::WitnessInvalid(idx));
        }
    }
    let keep: BTreeSet<usize> = g.vertices().filter(|v| !first.contains(v)).collect();
    let ind = g.induced_subgraph(&keep)?;
    Ok((ind.graph, ind.to_old))
}

/// Result of collapsing a bag interval: the identified-and-pruned graph,
/// its spliced decomposition with the inherited ranking, and the vertex
/// renumbering.
#[derive(Debug, Clone)]
pub struct CollapseOutcome {
    pub graph: Graph,
    pub rpd: RankedDecomposition,
    /// `to_old[new_id] = old_id`; merged vertices trace to their left mate.
    pub to_old: Vec<usize>,
}

/// Identifies each vertex of bag q1 with the same-rank vertex of bag q2,
/// deletes every vertex occurring in [q1, q2] without appearing in either
/// cut bag, and splices the decomposition (bags up to q1, then bags after
/// q2 with the identified vertices renamed). The ranking is inherited,
/// never recomputed; the output decomposition is redundancy-removed and
/// re-validated.
pub fn collapse_interval(
    g: &Graph,
    rpd: &RankedDecomposition,
    q1: usize,
    q2: usize,
) -> Result<CollapseOutcome, RewireError> {
    if q2 >= rpd.len() || q1 >= q2 {
        return Err(RewireError::BagOutOfRange { index: q2, len: rpd.len() });
    }
    // rename right-cut vertices to their rank mates in the left cut bag
    let mut rename: BTreeMap<usize, usize> = BTreeMap::new();
    for &w in rpd.bag(q2) {
        if rpd.bag(q1).contains(&w) {
            continue;
        }
        let rank = rpd.rank_of(w).expect("ranked");
        let mate = rpd
            .vertex_with_rank(q1, rank)
            .ok_or(RewireError::IdentificationTargetMissing { rank })?;
        rename.insert(w, mate);
    }
    // vertices strictly inside the interval are deleted
    let mut deleted: BTreeSet<usize> = BTreeSet::new();
    for v in rpd.decomposition().vertices() {
        let (s, t) = span(rpd, v);
        if s > q1 && t < q2 && !rpd.bag(q2).contains(&v) {
            deleted.insert(v);
        }
    }
    for &t in g.terminals() {
        if deleted.contains(&t) || rename.contains_key(&t) {
            return Err(RewireError::TerminalAffected(t));
        }
    }

    let survives = |v: usize| !deleted.contains(&v) && !rename.contains_key(&v);
    let to_old: Vec<usize> = g.vertices().filter(|&v| survives(v)).collect();
    let to_new: BTreeMap<usize, usize> =
        to_old.iter().enumerate().map(|(n, &o)| (o, n)).collect();
    let project = |v: usize| -> Option<usize> {
        let v = *rename.get(&v).unwrap_or(&v);
        to_new.get(&v).copied()
    };

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (u, v) in g.edges() {
        if let (Some(a), Some(b)) = (project(u), project(v)) {
            debug_assert_ne!(a, b, "identification cannot create a loop");
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let terminals: Vec<usize> = g
        .terminals()
        .iter()
        .map(|&t| to_new[&t])
        .collect();
    let graph = Graph::new(to_old.len(), edges, terminals)?;

    let mut bags: Vec<BTreeSet<usize>> = Vec::new();
    for j in (0..=q1).chain(q2 + 1..rpd.len()) {
        let bag: BTreeSet<usize> = rpd.bag(j).iter().filter_map(|&v| project(v)).collect();
        bags.push(bag);
    }
    let spliced = crate::pathdecomp::remove_redundant_bags(
        &crate::pathdecomp::PathDecomposition::new(bags),
    );
    let report = crate::pathdecomp::validate(&graph, &spliced);
    if !report.is_valid() {
        return Err(RewireError::CollapseInvalid(
            report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
        ));
    }
    let rho: BTreeMap<usize, usize> = to_old
        .iter()
        .enumerate()
        .map(|(new, &old)| (new, rpd.rank_of(old).expect("ranked")))
        .collect();
    let rpd_out = RankedDecomposition::from_parts(spliced, rho)
        .map_err(|e| RewireError::CollapseInvalid(e.to_string()))?;
    Ok(CollapseOutcome { graph, rpd: rpd_out, to_old })
}
