//! Path decompositions: validation, redundancy removal, the companion
//! interval graph, and the greedy ranking that produces normalized ranked
//! decompositions.
//!
//! Bags are indexed `0..len` in memory; the text format is 1-based.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathDecompError {
    #[error("vertex {0} does not occur in the decomposition")]
    UnknownVertex(usize),
    #[error("bag index {index} out of range (len = {len})")]
    BagOutOfRange { index: usize, len: usize },
    #[error("two vertices of rank {rank} share bag {bag}")]
    DuplicateRankInBag { rank: usize, bag: usize },
    #[error("vertex {0} has no rank")]
    UnrankedVertex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    bags: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UncoveredVertex(usize),
    UncoveredEdge(usize, usize),
    /// The bags containing the vertex do not form a contiguous interval.
    BrokenInterval(usize),
    BagVertexOutOfRange { bag: usize, vertex: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::UncoveredVertex(v) => write!(f, "vertex {v} is in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge {u}-{v} is in no bag"),
            Violation::BrokenInterval(v) => write!(f, "bags of vertex {v} are not contiguous"),
            Violation::BagVertexOutOfRange { bag, vertex } => {
                write!(f, "bag {} lists vertex {vertex} outside the graph", bag + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PathDecomposition {
    pub fn new(bags: Vec<BTreeSet<usize>>) -> Self {
        PathDecomposition { bags }
    }

    pub fn from_slices(bags: &[&[usize]]) -> Self {
        PathDecomposition::new(bags.iter().map(|b| b.iter().copied().collect()).collect())
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn bag(&self, j: usize) -> &BTreeSet<usize> {
        &self.bags[j]
    }

    pub fn bags(&self) -> &[BTreeSet<usize>] {
        &self.bags
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    /// Width = max bag size - 1 (0 for degenerate empty input).
    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.bags.iter().flatten().copied().collect()
    }

    /// First and last bag index per vertex. Contiguity is a validity
    /// condition, not a promise of this accessor.
    pub fn spans(&self) -> BTreeMap<usize, (usize, usize)> {
        let mut spans: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (j, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                spans
                    .entry(v)
                    .and_modify(|(_, t)| *t = j)
                    .or_insert((j, j));
            }
        }
        spans
    }
}

/// Checks coverage of vertices and edges plus the interval condition,
/// reporting every violation with a witness.
pub fn validate(g: &Graph, pd: &PathDecomposition) -> ValidationReport {
    let mut violations = Vec::new();
    for (j, bag) in pd.bags.iter().enumerate() {
        for &v in bag {
            if v >= g.vertex_count() {
                violations.push(Violation::BagVertexOutOfRange { bag: j, vertex: v });
            }
        }
    }
    let covered = pd.vertices();
    for v in g.vertices() {
        if !covered.contains(&v) {
            violations.push(Violation::UncoveredVertex(v));
        }
    }
    for (u, v) in g.edges() {
        if !pd.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            violations.push(Violation::UncoveredEdge(u, v));
        }
    }
    let spans = pd.spans();
    for (&v, &(s, t)) in &spans {
        let occurrences = pd.bags[s..=t].iter().filter(|b| b.contains(&v)).count();
        if occurrences != t - s + 1 {
            violations.push(Violation::BrokenInterval(v));
        }
    }
    ValidationReport { violations }
}

/// Repeatedly deletes any bag that is a subset of its predecessor. The
/// result is valid whenever the input is, every bag after the first
/// introduces a vertex absent from the previous bag, and the operation is
/// idempotent.
pub fn remove_redundant_bags(pd: &PathDecomposition) -> PathDecomposition {
    let mut bags = pd.bags.clone();
    let mut i = 1;
    while i < bags.len() {
        if bags[i].is_subset(&bags[i - 1]) {
            bags.remove(i);
        } else {
            i += 1;
        }
    }
    PathDecomposition::new(bags)
}

/// The interval graph H of the decomposition: one vertex per decomposition
/// vertex, an edge whenever two occurrence intervals intersect (that is,
/// whenever two vertices share a bag).
pub fn build_interval_graph(pd: &PathDecomposition) -> Graph {
    let spans = pd.spans();
    let n = spans.keys().max().map_or(0, |&v| v + 1);
    let mut edges = Vec::new();
    let items: Vec<(usize, (usize, usize))> = spans.into_iter().collect();
    for (i, &(u, (su, tu))) in items.iter().enumerate() {
        for &(v, (sv, tv)) in &items[i + 1..] {
            if su.max(sv) <= tu.min(tv) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges, vec![]).expect("interval graph construction")
}

/// A path decomposition with a ranking function: no bag holds two vertices
/// of the same rank. Ranks are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedDecomposition {
    pd: PathDecomposition,
    rho: BTreeMap<usize, usize>,
    spans: BTreeMap<usize, (usize, usize)>,
}

impl RankedDecomposition {
    /// Attaches an existing ranking, checking per-bag rank uniqueness.
    pub fn from_parts(
        pd: PathDecomposition,
        rho: BTreeMap<usize, usize>,
    ) -> Result<Self, PathDecompError> {
        for (j, bag) in pd.bags.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &v in bag {
                let rank = *rho.get(&v).ok_or(PathDecompError::UnrankedVertex(v))?;
                if !seen.insert(rank) {
                    return Err(PathDecompError::DuplicateRankInBag { rank, bag: j });
                }
            }
        }
        let spans = pd.spans();
        Ok(RankedDecomposition { pd, rho, spans })
    }

    pub fn decomposition(&self) -> &PathDecomposition {
        &self.pd
    }

    pub fn len(&self) -> usize {
        self.pd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pd.is_empty()
    }

    pub fn bag(&self, j: usize) -> &BTreeSet<usize> {
        self.pd.bag(j)
    }

    pub fn rank_of(&self, v: usize) -> Option<usize> {
        self.rho.get(&v).copied()
    }

    pub fn ranking(&self) -> &BTreeMap<usize, usize> {
        &self.rho
    }

    /// Number of ranks in use (the p of all threshold formulas).
    pub fn num_ranks(&self) -> usize {
        self.rho.values().max().copied().unwrap_or(0)
    }

    pub fn span(&self, v: usize) -> Option<(usize, usize)> {
        self.spans.get(&v).copied()
    }

    /// t(v) - s(v) + 1.
    pub fn occurrence_count(&self, v: usize) -> Result<usize, PathDecompError> {
        let (s, t) = self.spans.get(&v).ok_or(PathDecompError::UnknownVertex(v))?;
        Ok(t - s + 1)
    }

    /// The unique vertex of the given rank in bag `j`, if present.
    pub fn vertex_with_rank(&self, j: usize, rank: usize) -> Option<usize> {
        self.pd.bags[j]
            .iter()
            .copied()
            .find(|v| self.rho.get(v) == Some(&rank))
    }

    pub fn rank_set(&self, j: usize) -> BTreeSet<usize> {
        self.pd.bags[j].iter().map(|v| self.rho[v]).collect()
    }

    /// Invariant violations of the normalized ranked form, as messages.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (j, bag) in self.pd.bags.iter().enumerate() {
            let ranks: Vec<usize> = bag.iter().map(|v| self.rho[v]).collect();
            let mut dedup = ranks.clone();
            dedup.sort_unstable();
            dedup.dedup();
            if dedup.len() != ranks.len() {
                out.push(format!("bag {} holds two vertices of equal rank", j + 1));
            }
            if j > 0 && bag.iter().all(|v| self.pd.bags[j - 1].contains(v)) {
                out.push(format!("bag {} introduces no new vertex", j + 1));
            }
        }
        // each vertex sees at most two co-bag vertices of any higher rank
        for (&v, &(s, t)) in &self.spans {
            let my_rank = self.rho[&v];
            let mut per_rank: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for bag in &self.pd.bags[s..=t] {
                for &u in bag {
                    let r = self.rho[&u];
                    if r > my_rank {
                        per_rank.entry(r).or_default().insert(u);
                    }
                }
            }
            for (r, us) in per_rank {
                if us.len() > 2 {
                    out.push(format!(
                        "vertex {v} (rank {my_rank}) shares bags with {} vertices of rank {r}",
                        us.len()
                    ));
                }
            }
        }
        out
    }
}

/// Greedy ranking: repeatedly extract a maximal independent set of the
/// interval graph, always taking the admissible vertex with minimum t(v)
/// (ties broken by vertex id), and assign ranks 1, 2, ... in extraction
/// order. Uses at most 8 * (max bag size) ranks on valid input.
///
/// Taking the minimum-t admissible interval is the classic left-to-right
/// sweep: an interval is admissible exactly when it starts after the last
/// taken interval ends, so each class is one pass over the (t, id)-sorted
/// remainder.
pub fn rank(pd: &PathDecomposition) -> RankedDecomposition {
    let spans = pd.spans();
    let mut order: Vec<usize> = spans.keys().copied().collect();
    order.sort_by_key(|&v| (spans[&v].1, v));
    let mut rho = BTreeMap::new();
    let mut next_rank = 1;
    while !order.is_empty() {
        let mut rest = Vec::with_capacity(order.len());
        let mut last_end: Option<usize> = None;
        for &v in &order {
            let (s, t) = spans[&v];
            let admissible = last_end.is_none_or(|end| s > end);
            if admissible {
                rho.insert(v, next_rank);
                last_end = Some(t);
            } else {
                rest.push(v);
            }
        }
        order = rest;
        next_rank += 1;
    }
    RankedDecomposition { pd: pd.clone(), rho, spans }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bags(list: &[&[usize]]) -> PathDecomposition {
        PathDecomposition::from_slices(list)
    }

    #[test]
    fn validate_accepts_p3() {
        let g = Graph::new(3, [(0, 1), (1, 2)], vec![]).unwrap();
        let pd = bags(&[&[0, 1], &[1, 2]]);
        assert!(validate(&g, &pd).is_valid());
    }

    #[test]
    fn validate_reports_uncovered_edge() {
        let g = Graph::new(3, [(0, 1), (1, 2)], vec![]).unwrap();
        let pd = bags(&[&[0, 1], &[2]]);
        let report = validate(&g, &pd);
        assert!(report.violations.contains(&Violation::UncoveredEdge(1, 2)));
    }

    #[test]
    fn validate_reports_broken_interval() {
        let g = Graph::new(2, [], vec![]).unwrap();
        let pd = bags(&[&[0], &[1], &[0]]);
        let report = validate(&g, &pd);
        assert!(report.violations.contains(&Violation::BrokenInterval(0)));
    }

    #[test]
    fn redundant_bags_collapse() {
        let pd = bags(&[&[0, 1], &[0, 1], &[1]]);
        assert_eq!(remove_redundant_bags(&pd), bags(&[&[0, 1]]));
    }

    #[test]
    fn redundant_removal_keeps_interleaved_bags() {
        let pd = bags(&[&[0], &[0, 1], &[1], &[1, 2]]);
        assert_eq!(remove_redundant_bags(&pd), bags(&[&[0], &[0, 1], &[1, 2]]));
    }

    #[test]
    fn redundant_removal_is_idempotent_on_normalized_input() {
        let pd = bags(&[&[0], &[0, 1], &[1, 2]]);
        let once = remove_redundant_bags(&pd);
        assert_eq!(once, pd);
        assert_eq!(remove_redundant_bags(&once), once);
    }

    #[test]
    fn interval_graph_cases() {
        assert_eq!(build_interval_graph(&bags(&[&[0, 1], &[1, 2]])).edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(build_interval_graph(&bags(&[&[0, 1, 2]])).edge_count(), 3);
        assert_eq!(build_interval_graph(&bags(&[&[0], &[1]])).edge_count(), 0);
    }

    #[test]
    fn rank_alternates_on_a_path_decomposition() {
        let pd = bags(&[&[0, 1], &[1, 2], &[2, 3]]);
        let rpd = rank(&pd);
        assert_eq!(rpd.rank_of(0), Some(1));
        assert_eq!(rpd.rank_of(2), Some(1));
        assert_eq!(rpd.rank_of(1), Some(2));
        assert_eq!(rpd.rank_of(3), Some(2));
        assert_eq!(rpd.num_ranks(), 2);
    }

    #[test]
    fn rank_single_bag_uses_id_order() {
        let rpd = rank(&bags(&[&[0, 1, 2]]));
        assert_eq!(rpd.rank_of(0), Some(1));
        assert_eq!(rpd.rank_of(1), Some(2));
        assert_eq!(rpd.rank_of(2), Some(3));
    }

    #[test]
    fn rank_of_empty_decomposition_is_empty() {
        let rpd = rank(&bags(&[]));
        assert_eq!(rpd.num_ranks(), 0);
    }

    #[test]
    fn occurrence_counting() {
        let pd = bags(&[&[0], &[0, 1], &[0, 1], &[1]]);
        let rpd = rank(&pd);
        assert_eq!(rpd.occurrence_count(0).unwrap(), 3);
        assert_eq!(rpd.occurrence_count(1).unwrap(), 3);
        assert_eq!(rpd.occurrence_count(9), Err(PathDecompError::UnknownVertex(9)));
        // double counting: sum of occurrences = sum of bag sizes
        let total: usize = pd.vertices().iter().map(|&v| rpd.occurrence_count(v).unwrap()).sum();
        let bag_total: usize = pd.bags().iter().map(|b| b.len()).sum();
        assert_eq!(total, bag_total);
    }

    #[test]
    fn from_parts_rejects_rank_collisions() {
        let pd = bags(&[&[0, 1]]);
        let rho: BTreeMap<usize, usize> = [(0, 1), (1, 1)].into_iter().collect();
        assert_eq!(
            RankedDecomposition::from_parts(pd, rho),
            Err(PathDecompError::DuplicateRankInBag { rank: 1, bag: 0 })
        );
    }

    /// Deterministic random decomposition corpus for the ranking contract.
    fn random_decomposition(seed: u64, max_bag: usize, max_len: usize) -> PathDecomposition {
        let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut active: BTreeSet<usize> = [0].into_iter().collect();
        let mut fresh = 1usize;
        let mut bags = vec![active.clone()];
        while bags.len() < max_len {
            let grow = active.len() < max_bag && (next() % 2 == 0 || active.len() <= 1);
            if grow {
                active.insert(fresh);
                fresh += 1;
            } else {
                let idx = (next() % active.len() as u64) as usize;
                let v = *active.iter().nth(idx).unwrap();
                active.remove(&v);
                if active.is_empty() {
                    active.insert(fresh);
                    fresh += 1;
                }
            }
            bags.push(active.clone());
            if fresh > 3 * max_len / 2 {
                break;
            }
        }
        PathDecomposition::new(bags)
    }

    #[test]
    fn ranking_contract_on_random_corpus() {
        for seed in 0..40 {
            let pd = remove_redundant_bags(&random_decomposition(seed, 5, 60));
            let p = pd.max_bag_size();
            let rpd = rank(&pd);
            assert!(rpd.num_ranks() <= 8 * p, "seed {seed}: {} ranks", rpd.num_ranks());
            let violations = rpd.invariant_violations();
            assert!(violations.is_empty(), "seed {seed}: {violations:?}");
            // rank-1 vertices appear in at most 2p bags
            for v in pd.vertices() {
                if rpd.rank_of(v) == Some(1) {
                    assert!(rpd.occurrence_count(v).unwrap() <= 2 * p, "seed {seed} vertex {v}");
                }
            }
        }
    }
}
