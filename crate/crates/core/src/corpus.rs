//! Deterministic instance generator: graphs paired with valid path
//! decompositions, reproducible from (family, size, seed) via ChaCha8.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;
use crate::pathdecomp::PathDecomposition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("{family} instances need size >= {min}, got {size}")]
    SizeTooSmall { family: Family, min: usize, size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path,
    Cycle,
    Ladder,
    Caterpillar,
    Random,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Ladder => "ladder",
            Family::Caterpillar => "caterpillar",
            Family::Random => "random",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Family {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(Family::Path),
            "cycle" => Ok(Family::Cycle),
            "ladder" => Ok(Family::Ladder),
            "caterpillar" => Ok(Family::Caterpillar),
            "random" => Ok(Family::Random),
            other => Err(CorpusError::UnknownFamily(other.to_string())),
        }
    }
}

/// Generates the instance for (family, size, seed). `size` is the vertex
/// count for paths and cycles, the rung count for ladders, and the spine
/// length for caterpillars. The same triple always produces the same
/// instance.
pub fn generate(
    family: Family,
    size: usize,
    seed: u64,
) -> Result<(Graph, PathDecomposition), CorpusError> {
    if size < 1 {
        return Err(CorpusError::SizeTooSmall { family, min: 1, size });
    }
    match family {
        Family::Path => Ok(path(size)),
        Family::Cycle => {
            if size < 3 {
                return Err(CorpusError::SizeTooSmall { family, min: 3, size });
            }
            Ok(cycle(size))
        }
        Family::Ladder => {
            if size < 2 {
                return Err(CorpusError::SizeTooSmall { family, min: 2, size });
            }
            Ok(ladder(size))
        }
        Family::Caterpillar => Ok(caterpillar(size, seed)),
        Family::Random => Ok(random(size, seed)),
    }
}

fn path(n: usize) -> (Graph, PathDecomposition) {
    let g = Graph::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)), vec![]).unwrap();
    let bags: Vec<BTreeSet<usize>> = if n == 1 {
        vec![[0].into_iter().collect()]
    } else {
        (0..n - 1).map(|i| [i, i + 1].into_iter().collect()).collect()
    };
    (g, PathDecomposition::new(bags))
}

/// Cycle with an anchor: vertex 0 sits in every bag, so the first and
/// last bags share it.
fn cycle(n: usize) -> (Graph, PathDecomposition) {
    let g = Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)), vec![]).unwrap();
    let bags: Vec<BTreeSet<usize>> = (1..n - 1)
        .map(|j| [0, j, j + 1].into_iter().collect())
        .collect();
    (g, PathDecomposition::new(bags))
}

fn ladder(rungs: usize) -> (Graph, PathDecomposition) {
    let n = 2 * rungs;
    let mut edges = Vec::new();
    for j in 0..rungs {
        edges.push((2 * j, 2 * j + 1));
        if j + 1 < rungs {
            edges.push((2 * j, 2 * j + 2));
            edges.push((2 * j + 1, 2 * j + 3));
        }
    }
    let g = Graph::new(n, edges, vec![]).unwrap();
    let bags: Vec<BTreeSet<usize>> = (0..rungs - 1)
        .map(|j| [2 * j, 2 * j + 1, 2 * j + 2, 2 * j + 3].into_iter().collect())
        .collect();
    (g, PathDecomposition::new(bags))
}

/// Caterpillar with 0..=2 leaves per spine vertex; the decomposition walks
/// the spine, one bag per leaf plus one per spine edge.
fn caterpillar(spine: usize, seed: u64) -> (Graph, PathDecomposition) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaf_counts: Vec<usize> = (0..spine).map(|_| rng.gen_range(0..=2)).collect();
    let n = spine + leaf_counts.iter().sum::<usize>();
    let mut edges = Vec::new();
    let mut bags: Vec<BTreeSet<usize>> = Vec::new();
    let mut next_leaf = spine;
    for (j, &count) in leaf_counts.iter().enumerate() {
        if j + 1 < spine {
            edges.push((j, j + 1));
        }
        for _ in 0..count {
            edges.push((j, next_leaf));
            bags.push([j, next_leaf].into_iter().collect());
            next_leaf += 1;
        }
        if j + 1 < spine {
            bags.push([j, j + 1].into_iter().collect());
        }
    }
    if bags.is_empty() {
        bags.push([0].into_iter().collect());
    }
    let g = Graph::new(n, edges, vec![]).unwrap();
    (g, PathDecomposition::new(bags))
}

/// Random interval-model instance: a token stream introduces and retires
/// vertices under a seeded bag-size cap, and the edge set is a random
/// subgraph of the resulting interval graph.
fn random(n: usize, seed: u64) -> (Graph, PathDecomposition) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = rng.gen_range(2..=5usize);
    let mut active: BTreeSet<usize> = [0].into_iter().collect();
    let mut fresh = 1usize;
    let mut bags = vec![active.clone()];
    while fresh < n {
        if active.len() < cap && (rng.gen_bool(0.55) || active.len() <= 1) {
            active.insert(fresh);
            fresh += 1;
        } else {
            let idx = rng.gen_range(0..active.len());
            let v = *active.iter().nth(idx).unwrap();
            active.remove(&v);
        }
        bags.push(active.clone());
    }
    let pd = PathDecomposition::new(bags);
    let interval = crate::pathdecomp::build_interval_graph(&pd);
    let edges: Vec<(usize, usize)> = interval
        .edges()
        .into_iter()
        .filter(|_| rng.gen_bool(0.6))
        .collect();
    let g = Graph::new(n, edges, vec![]).unwrap();
    (g, pd)
}
