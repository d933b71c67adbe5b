//! k-terminal graphs: adjacency, induced subgraphs, terminal-avoiding balls,
//! and terminal-respecting isomorphism search.
//!
//! Vertices are dense ids `0..n`. Operations that drop vertices return a
//! remap table (`to_old`) so callers can trace original ids. The terminal
//! labeling is a sequence (repeats allowed) and is always treated
//! positionally, never as a set.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("terminal outside induced set: label {label} maps to dropped vertex {vertex}")]
    TerminalOutsideInducedSet { label: usize, vertex: usize },
    #[error("terminal label count mismatch: {left} vs {right}")]
    TerminalCountMismatch { left: usize, right: usize },
    #[error("ball center {0} is a terminal")]
    BallCenterIsTerminal(usize),
    #[error("mapping covers {have} vertices, graph has {want}")]
    MappingSizeMismatch { have: usize, want: usize },
}

/// An undirected k-terminal graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
    edge_count: usize,
    terminals: Vec<usize>,
}

impl Graph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        terminals: Vec<usize>,
    ) -> Result<Self, GraphError> {
        let mut adj = vec![BTreeSet::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adj[u].insert(v) {
                adj[v].insert(u);
                edge_count += 1;
            }
        }
        for &t in &terminals {
            if t >= n {
                return Err(GraphError::VertexOutOfRange { vertex: t, n });
            }
        }
        Ok(Graph { n, adj, edge_count, terminals })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        0..self.n
    }

    /// Edges as normalized (u, v) pairs with u < v, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for &v in self.adj[u].range(u + 1..) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Number of terminal labels (the k of a k-terminal graph).
    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    /// The terminal labeling as a positional sequence; entry `i` is the
    /// vertex labeled `l_{i+1}`.
    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    /// Image of the labeling function.
    pub fn terminal_set(&self) -> BTreeSet<usize> {
        self.terminals.iter().copied().collect()
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminals.contains(&v)
    }

    /// Same graph with a different labeling sequence.
    pub fn with_terminals(&self, terminals: Vec<usize>) -> Result<Graph, GraphError> {
        for &t in &terminals {
            if t >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: t, n: self.n });
            }
        }
        Ok(Graph { terminals, ..self.clone() })
    }

    /// Same graph with the labeling dropped (k = 0).
    pub fn without_terminals(&self) -> Graph {
        Graph { terminals: Vec::new(), ..self.clone() }
    }

    /// Same vertices and terminals, replaced edge set.
    pub fn with_edges(&self, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph, GraphError> {
        Graph::new(self.n, edges, self.terminals.clone())
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Subgraph induced by `keep`, which must contain every terminal.
    /// Surviving vertices are renumbered densely; `to_old[new] = old`.
    pub fn induced_subgraph(&self, keep: &BTreeSet<usize>) -> Result<InducedSubgraph, GraphError> {
        for &v in keep {
            self.check_vertex(v)?;
        }
        for (i, &t) in self.terminals.iter().enumerate() {
            if !keep.contains(&t) {
                return Err(GraphError::TerminalOutsideInducedSet { label: i + 1, vertex: t });
            }
        }
        self.induced_inner(keep, false)
    }

    /// Like [`Graph::induced_subgraph`] but terminal labels whose vertex is
    /// dropped are removed from the sequence (k shrinks).
    pub fn induced_subgraph_dropping_terminals(
        &self,
        keep: &BTreeSet<usize>,
    ) -> Result<InducedSubgraph, GraphError> {
        for &v in keep {
            self.check_vertex(v)?;
        }
        self.induced_inner(keep, true)
    }

    fn induced_inner(&self, keep: &BTreeSet<usize>, drop_terminals: bool) -> Result<InducedSubgraph, GraphError> {
        let to_old: Vec<usize> = keep.iter().copied().collect();
        let to_new: BTreeMap<usize, usize> =
            to_old.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mut edges = Vec::new();
        for (new_u, &old_u) in to_old.iter().enumerate() {
            for &old_v in self.adj[old_u].range(old_u + 1..) {
                if let Some(&new_v) = to_new.get(&old_v) {
                    edges.push((new_u, new_v));
                }
            }
        }
        let terminals = self
            .terminals
            .iter()
            .filter_map(|t| to_new.get(t).copied())
            .collect::<Vec<_>>();
        if !drop_terminals {
            debug_assert_eq!(terminals.len(), self.terminals.len());
        }
        let graph = Graph::new(to_old.len(), edges, terminals)?;
        Ok(InducedSubgraph { graph, to_old, to_new })
    }

    /// The ball B_r(v): subgraph induced by T plus every vertex reachable
    /// from `v` by a path of length at most `r` whose internal vertices are
    /// all non-terminals. `v` itself must be a non-terminal.
    pub fn ball(&self, v: usize, r: usize) -> Result<Ball, GraphError> {
        self.check_vertex(v)?;
        if self.is_terminal(v) {
            return Err(GraphError::BallCenterIsTerminal(v));
        }
        let mut dist = vec![usize::MAX; self.n];
        dist[v] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            if dist[u] == r {
                continue;
            }
            if u != v && self.is_terminal(u) {
                // terminals may end a path but never continue one
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        let mut keep = self.terminal_set();
        keep.extend((0..self.n).filter(|&u| dist[u] != usize::MAX));
        let ind = self.induced_subgraph(&keep)?;
        let center = ind.to_new[&v];
        Ok(Ball { graph: ind.graph, center, to_old: ind.to_old })
    }
}

/// Result of an induced-subgraph operation, with id provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `to_old[new_id] = old_id`
    pub to_old: Vec<usize>,
    /// `to_new[old_id] = new_id` for surviving vertices
    pub to_new: BTreeMap<usize, usize>,
}

/// A ball around a center vertex. `center` is the center's id in `graph`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub graph: Graph,
    pub center: usize,
    pub to_old: Vec<usize>,
}

/// A total injective map from the vertices of one graph into another
/// (or the same) graph; `forward[u]` is the image of `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMapping {
    forward: Vec<usize>,
}

impl VertexMapping {
    pub fn new(forward: Vec<usize>) -> Self {
        VertexMapping { forward }
    }

    pub fn identity(n: usize) -> Self {
        VertexMapping { forward: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn map(&self, u: usize) -> usize {
        self.forward[u]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().copied().enumerate()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.forward.iter().all(|&v| seen.insert(v))
    }

    /// Inverse of a bijection on `0..n`; None if not such a bijection.
    pub fn inverse(&self) -> Option<VertexMapping> {
        let n = self.forward.len();
        let mut back = vec![usize::MAX; n];
        for (u, &v) in self.forward.iter().enumerate() {
            if v >= n || back[v] != usize::MAX {
                return None;
            }
            back[v] = u;
        }
        Some(VertexMapping { forward: back })
    }
}

/// Checks that `m` is a terminal-respecting isomorphism from `g1` to `g2`:
/// a bijection preserving edges in both directions and fixing every
/// terminal label positionally.
pub fn is_terminal_respecting_isomorphism(g1: &Graph, g2: &Graph, m: &VertexMapping) -> bool {
    if g1.k() != g2.k() || g1.vertex_count() != g2.vertex_count() {
        return false;
    }
    if m.len() != g1.vertex_count() || !m.is_injective() {
        return false;
    }
    if m.pairs().any(|(_, v)| v >= g2.vertex_count()) {
        return false;
    }
    for i in 0..g1.k() {
        if m.map(g1.terminals()[i]) != g2.terminals()[i] {
            return false;
        }
    }
    if g1.edge_count() != g2.edge_count() {
        return false;
    }
    g1.edges()
        .into_iter()
        .all(|(u, v)| g2.has_edge(m.map(u), m.map(v)))
}

const UNMAPPED: usize = usize::MAX;

struct IsoSearch<'a> {
    g1: &'a Graph,
    g2: &'a Graph,
    map: Vec<usize>,
    rev: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> IsoSearch<'a> {
    fn terminal_signature(g: &Graph, v: usize) -> Vec<(bool, bool)> {
        g.terminals()
            .iter()
            .map(|&t| (g.has_edge(v, t), v == t))
            .collect()
    }

    fn consistent(&self, v: usize, w: usize) -> bool {
        if self.g1.degree(v) != self.g2.degree(w) {
            return false;
        }
        if Self::terminal_signature(self.g1, v) != Self::terminal_signature(self.g2, w) {
            return false;
        }
        let mut mapped = 0;
        for &u in self.g1.neighbors(v) {
            if self.map[u] != UNMAPPED {
                mapped += 1;
                if !self.g2.has_edge(w, self.map[u]) {
                    return false;
                }
            }
        }
        let mapped_back = self
            .g2
            .neighbors(w)
            .iter()
            .filter(|&&x| self.rev[x] != UNMAPPED)
            .count();
        mapped == mapped_back
    }

    fn assign(&mut self, v: usize, w: usize) -> bool {
        if self.map[v] != UNMAPPED {
            return self.map[v] == w;
        }
        if self.rev[w] != UNMAPPED {
            return false;
        }
        if !self.consistent(v, w) {
            return false;
        }
        self.map[v] = w;
        self.rev[w] = v;
        true
    }

    fn unassign(&mut self, v: usize, w: usize) {
        self.map[v] = UNMAPPED;
        self.rev[w] = UNMAPPED;
    }

    fn dfs(&mut self, idx: usize) -> bool {
        let v = match self.order.get(idx) {
            Some(&v) if self.map[v] != UNMAPPED => return self.dfs(idx + 1),
            Some(&v) => v,
            None => return true,
        };
        for w in 0..self.g2.vertex_count() {
            if self.rev[w] == UNMAPPED && self.consistent(v, w) {
                self.map[v] = w;
                self.rev[w] = v;
                if self.dfs(idx + 1) {
                    return true;
                }
                self.unassign(v, w);
            }
        }
        false
    }
}

/// Searches for a terminal-respecting isomorphism from `g1` to `g2`.
/// Errors only on mismatched k; graphs that cannot be isomorphic yield
/// `Ok(None)`.
pub fn find_terminal_respecting_isomorphism(
    g1: &Graph,
    g2: &Graph,
) -> Result<Option<VertexMapping>, GraphError> {
    find_terminal_respecting_isomorphism_pinned(g1, g2, &[])
}

/// Isomorphism search with extra required assignments (used to pin ball
/// centers for r-similarity).
pub fn find_terminal_respecting_isomorphism_pinned(
    g1: &Graph,
    g2: &Graph,
    pins: &[(usize, usize)],
) -> Result<Option<VertexMapping>, GraphError> {
    if g1.k() != g2.k() {
        return Err(GraphError::TerminalCountMismatch { left: g1.k(), right: g2.k() });
    }
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let mut degs1: Vec<usize> = (0..g1.vertex_count()).map(|v| g1.degree(v)).collect();
    let mut degs2: Vec<usize> = (0..g2.vertex_count()).map(|v| g2.degree(v)).collect();
    degs1.sort_unstable();
    degs2.sort_unstable();
    if degs1 != degs2 {
        return Ok(None);
    }

    let n = g1.vertex_count();
    let mut search = IsoSearch {
        g1,
        g2,
        map: vec![UNMAPPED; n],
        rev: vec![UNMAPPED; n],
        order: Vec::new(),
    };
    for i in 0..g1.k() {
        if !search.assign(g1.terminals()[i], g2.terminals()[i]) {
            return Ok(None);
        }
    }
    for &(v, w) in pins {
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n });
        }
        if w >= n {
            return Err(GraphError::VertexOutOfRange { vertex: w, n });
        }
        if !search.assign(v, w) {
            return Ok(None);
        }
    }

    // deterministic: high degree first, then terminal signature, then id
    let mut order: Vec<usize> = (0..n).filter(|&v| search.map[v] == UNMAPPED).collect();
    order.sort_by(|&a, &b| {
        g1.degree(b)
            .cmp(&g1.degree(a))
            .then_with(|| {
                IsoSearch::terminal_signature(g1, a).cmp(&IsoSearch::terminal_signature(g1, b))
            })
            .then_with(|| a.cmp(&b))
    });
    search.order = order;

    if search.dfs(0) {
        let m = VertexMapping::new(search.map);
        debug_assert!(is_terminal_respecting_isomorphism(g1, g2, &m));
        Ok(Some(m))
    } else {
        Ok(None)
    }
}

/// r-similarity: a terminal-respecting isomorphism between the two balls
/// that maps center to center.
pub fn r_similar(
    g1: &Graph,
    v1: usize,
    g2: &Graph,
    v2: usize,
    r: usize,
) -> Result<bool, GraphError> {
    if g1.k() != g2.k() {
        return Err(GraphError::TerminalCountMismatch { left: g1.k(), right: g2.k() });
    }
    let b1 = g1.ball(v1, r)?;
    let b2 = g2.ball(v2, r)?;
    let found = find_terminal_respecting_isomorphism_pinned(
        &b1.graph,
        &b2.graph,
        &[(b1.center, b2.center)],
    )?;
    Ok(found.is_some())
}
