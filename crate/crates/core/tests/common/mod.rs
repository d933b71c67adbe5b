//! Shared helpers for the integration suites: an independent rank-type
//! oracle for EF cross-checks, a small-sentence enumerator, and instance
//! builders.

#![allow(dead_code)]

use std::collections::BTreeSet;

use fopw_core::graph::Graph;
use fopw_core::logic::{Formula, Term};
use fopw_core::pathdecomp::{rank, remove_redundant_bags, PathDecomposition, RankedDecomposition};

/// Quantifier-depth-q type of a structure with parameters, computed by the
/// textbook recursion: the depth-0 type is the atom table over the
/// parameters, the depth-q type is the set of depth-(q-1) types of all
/// one-point extensions. Two graphs have equal types iff they agree on
/// every sentence of quantifier depth at most q. This is an independent
/// route from the game search in the library.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RankType {
    Atoms(Vec<bool>),
    Step(BTreeSet<RankType>),
}

pub fn rank_type(g: &Graph, params: &[usize], q: usize) -> RankType {
    if q == 0 {
        let mut atoms = Vec::new();
        for i in 0..params.len() {
            for j in 0..i {
                atoms.push(params[i] == params[j]);
                atoms.push(g.has_edge(params[i], params[j]));
            }
        }
        RankType::Atoms(atoms)
    } else {
        let mut set = BTreeSet::new();
        for v in g.vertices() {
            let mut ps = params.to_vec();
            ps.push(v);
            set.insert(rank_type(g, &ps, q - 1));
        }
        RankType::Step(set)
    }
}

pub fn types_equal(g1: &Graph, g2: &Graph, q: usize) -> bool {
    rank_type(g1, g1.terminals(), q) == rank_type(g2, g2.terminals(), q)
}

/// All sentences built from one or two quantifiers over small matrices:
/// literals and two-literal disjunctions/conjunctions over the atoms of
/// two variables and the first k constants.
pub fn small_sentences(k: usize) -> Vec<Formula> {
    let x = || Term::Var("x".into());
    let y = || Term::Var("y".into());
    let mut terms_xy: Vec<Term> = vec![x(), y()];
    let mut terms_x: Vec<Term> = vec![x()];
    for i in 1..=k {
        terms_xy.push(Term::Const(i));
        terms_x.push(Term::Const(i));
    }
    let atoms = |terms: &[Term]| -> Vec<Formula> {
        let mut out = Vec::new();
        for i in 0..terms.len() {
            for j in 0..i {
                out.push(Formula::Adj(terms[i].clone(), terms[j].clone()));
                out.push(Formula::Eq(terms[i].clone(), terms[j].clone()));
            }
        }
        out
    };
    let matrices = |atoms: Vec<Formula>| -> Vec<Formula> {
        let mut lits: Vec<Formula> = Vec::new();
        for a in atoms {
            lits.push(a.clone());
            lits.push(Formula::not(a));
        }
        let mut out = lits.clone();
        for a in &lits {
            for b in &lits {
                out.push(Formula::or(a.clone(), b.clone()));
            }
        }
        out
    };
    let quantify = |m: Formula, var: &str, universal: bool| {
        if universal {
            Formula::not(Formula::exists(var, Formula::not(m)))
        } else {
            Formula::exists(var, m)
        }
    };
    let mut out = Vec::new();
    // two quantifiers
    for m in matrices(atoms(&terms_xy)) {
        for outer in [false, true] {
            for inner in [false, true] {
                out.push(quantify(quantify(m.clone(), "y", inner), "x", outer));
            }
        }
    }
    // one quantifier
    for m in matrices(atoms(&terms_x)) {
        for outer in [false, true] {
            out.push(quantify(m.clone(), "x", outer));
        }
    }
    // quantifier-free over constants
    if k >= 2 {
        let consts: Vec<Term> = (1..=k).map(Term::Const).collect();
        out.extend(matrices(atoms(&consts)));
    }
    out
}

/// Deterministic xorshift for corpus construction inside tests.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x2545f4914f6cdd1d))
    }

    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n.max(1) as u64) as usize
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.next() % den < num
    }
}

pub fn random_graph(rng: &mut TestRng, n: usize, k: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.chance(1, 2) {
                edges.push((u, v));
            }
        }
    }
    let terms = (0..k).map(|_| rng.below(n)).collect();
    Graph::new(n, edges, terms).unwrap()
}

pub fn ranked(g: &Graph, pd: &PathDecomposition) -> RankedDecomposition {
    let _ = g;
    rank(&remove_redundant_bags(pd))
}

/// P_n with the sliding two-vertex bags and the parity ranking.
pub fn ranked_path(n: usize) -> (Graph, RankedDecomposition) {
    let (g, pd) = fopw_core::corpus::generate(fopw_core::corpus::Family::Path, n, 0).unwrap();
    let rpd = rank(&pd);
    (g, rpd)
}

/// Star: center 0 in every bag, one leaf per bag.
pub fn star(leaves: usize) -> (Graph, RankedDecomposition) {
    let g = Graph::new(leaves + 1, (1..=leaves).map(|l| (0, l)), vec![]).unwrap();
    let pd = PathDecomposition::new((1..=leaves).map(|l| [0, l].into_iter().collect()).collect());
    (g, rank(&pd))
}

/// Fan: a path v_0..v_m plus an apex adjacent to every path vertex; the
/// apex is vertex m + 1 and sits in every bag.
pub fn fan(path_len: usize) -> (Graph, RankedDecomposition) {
    let apex = path_len;
    let mut edges: Vec<(usize, usize)> = (0..path_len - 1).map(|i| (i, i + 1)).collect();
    edges.extend((0..path_len).map(|i| (i, apex)));
    let g = Graph::new(path_len + 1, edges, vec![]).unwrap();
    let bags: Vec<BTreeSet<usize>> = (0..path_len - 1)
        .map(|j| [j, j + 1, apex].into_iter().collect())
        .collect();
    (g, rank(&PathDecomposition::new(bags)))
}

/// Caterpillar with exactly one leaf per spine vertex: spine 0..spine-1,
/// leaf of spine j is spine + j. Bags alternate leaf bags and rail bags.
pub fn uniform_caterpillar(spine: usize) -> (Graph, RankedDecomposition) {
    let mut edges = Vec::new();
    let mut bags: Vec<BTreeSet<usize>> = Vec::new();
    for j in 0..spine {
        edges.push((j, spine + j));
        bags.push([j, spine + j].into_iter().collect());
        if j + 1 < spine {
            edges.push((j, j + 1));
            bags.push([j, j + 1].into_iter().collect());
        }
    }
    let g = Graph::new(2 * spine, edges, vec![]).unwrap();
    (g, rank(&PathDecomposition::new(bags)))
}

/// The disjoint union of P_8 and C_8 on 16 vertices: path 0..7, cycle 8..15.
pub fn p8_plus_c8() -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..7).map(|i| (i, i + 1)).collect();
    edges.extend((8..15).map(|i| (i, i + 1)));
    edges.push((15, 8));
    Graph::new(16, edges, vec![]).unwrap()
}

pub fn path_graph(n: usize) -> Graph {
    Graph::new(n, (0..n - 1).map(|i| (i, i + 1)), vec![]).unwrap()
}

/// Builds a graph with q + 1 identical copies of a random gadget attached
/// identically to a random core, returning the graph and the parts with
/// their swap witnesses.
pub fn identical_part_instance(
    rng: &mut TestRng,
    q: usize,
) -> (Graph, Vec<fopw_core::rewire::IdenticalPart>) {
    use fopw_core::graph::VertexMapping;
    use fopw_core::rewire::IdenticalPart;

    let core_n = 2 + rng.below(4);
    let k = rng.below(3).min(core_n);
    let core = random_graph(rng, core_n, k);
    let gadget_n = 1 + rng.below(3);
    let mut gadget_edges = Vec::new();
    for u in 0..gadget_n {
        for v in u + 1..gadget_n {
            if rng.chance(1, 2) {
                gadget_edges.push((u, v));
            }
        }
    }
    // attachment pattern: which gadget vertices connect to which core vertices
    let anchors: Vec<usize> = (0..rng.below(2) + 1).map(|_| rng.below(core_n)).collect();
    let mut attach = Vec::new();
    for gu in 0..gadget_n {
        for &a in &anchors {
            if rng.chance(1, 2) {
                attach.push((gu, a));
            }
        }
    }

    let copies = q + 1;
    let n = core_n + copies * gadget_n;
    let mut edges = core.edges();
    for c in 0..copies {
        let base = core_n + c * gadget_n;
        for &(u, v) in &gadget_edges {
            edges.push((base + u, base + v));
        }
        for &(gu, a) in &attach {
            edges.push((base + gu, a));
        }
    }
    let g = Graph::new(n, edges, core.terminals().to_vec()).unwrap();

    let part = |c: usize| -> BTreeSet<usize> {
        (core_n + c * gadget_n..core_n + (c + 1) * gadget_n).collect()
    };
    let swap = |c: usize| -> VertexMapping {
        let mut f: Vec<usize> = (0..n).collect();
        for i in 0..gadget_n {
            let a = core_n + i;
            let b = core_n + c * gadget_n + i;
            f[a] = b;
            f[b] = a;
        }
        VertexMapping::new(f)
    };
    let parts: Vec<IdenticalPart> = (0..copies)
        .map(|c| IdenticalPart {
            vertices: part(c),
            witness: if c == 0 { VertexMapping::identity(n) } else { swap(c) },
        })
        .collect();
    (g, parts)
}

/// Random valid decomposition with bag-size cap and length cap.
pub fn random_decomposition(rng: &mut TestRng, max_bag: usize, max_len: usize) -> PathDecomposition {
    let mut active: BTreeSet<usize> = [0].into_iter().collect();
    let mut fresh = 1usize;
    let mut bags = vec![active.clone()];
    while bags.len() < max_len {
        let grow = active.len() < max_bag && (rng.chance(1, 2) || active.len() <= 1);
        if grow {
            active.insert(fresh);
            fresh += 1;
        } else {
            let idx = rng.below(active.len());
            let v = *active.iter().nth(idx).unwrap();
            active.remove(&v);
            if active.is_empty() {
                active.insert(fresh);
                fresh += 1;
            }
        }
        bags.push(active.clone());
    }
    PathDecomposition::new(bags)
}
