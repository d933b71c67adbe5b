//! Line-oriented ASCII formats for graphs, decompositions, and formulas.
//!
//! Graph: `p fo <n> <m> <k>`, then `e <u> <v>` lines (0-based) and
//! `t <i> <v>` lines giving the i-th terminal (i is 1-based).
//! Decomposition: `s td <l> <maxbagsize> <n>`, then `b <j> <v...>` lines
//! (j is 1-based) and optional `r <v> <rank>` lines carrying a ranking.
//! Lines starting with `c` are comments. Serialization is canonical, so
//! equal values produce byte-identical files.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::graph::Graph;
use crate::logic::{parse_formula, Formula, ParseError};
use crate::pathdecomp::{PathDecomposition, RankedDecomposition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing `{0}` header line")]
    MissingHeader(&'static str),
    #[error("declared {what} count {declared} does not match actual {actual}")]
    CountMismatch { what: &'static str, declared: usize, actual: usize },
    #[error("graph construction failed: {0}")]
    Graph(String),
    #[error("ranking lines are incomplete or inconsistent: {0}")]
    BadRanking(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Formula(#[from] ParseError),
}

fn is_comment(line: &str) -> bool {
    let t = line.trim_start();
    t == "c" || t.starts_with("c ") || t.starts_with("c\t")
}

fn parse_fields(line: &str, lineno: usize) -> Result<Vec<&str>, FormatError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.is_empty() {
        return Err(FormatError::Malformed { line: lineno, message: "empty line".into() });
    }
    Ok(fields)
}

fn parse_usize(s: &str, lineno: usize, what: &str) -> Result<usize, FormatError> {
    s.parse().map_err(|_| FormatError::Malformed {
        line: lineno,
        message: format!("bad {what} `{s}`"),
    })
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut terminals: BTreeMap<usize, usize> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || is_comment(line) {
            continue;
        }
        let fields = parse_fields(line, lineno)?;
        match fields[0] {
            "p" => {
                if fields.len() != 5 || fields[1] != "fo" {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: "expected `p fo <n> <m> <k>`".into(),
                    });
                }
                header = Some((
                    parse_usize(fields[2], lineno, "vertex count")?,
                    parse_usize(fields[3], lineno, "edge count")?,
                    parse_usize(fields[4], lineno, "terminal count")?,
                ));
            }
            "e" => {
                if fields.len() != 3 {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: "expected `e <u> <v>`".into(),
                    });
                }
                edges.push((
                    parse_usize(fields[1], lineno, "vertex")?,
                    parse_usize(fields[2], lineno, "vertex")?,
                ));
            }
            "t" => {
                if fields.len() != 3 {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: "expected `t <i> <v>`".into(),
                    });
                }
                let i = parse_usize(fields[1], lineno, "terminal index")?;
                let v = parse_usize(fields[2], lineno, "vertex")?;
                if i == 0 || terminals.insert(i, v).is_some() {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: format!("bad or repeated terminal index {i}"),
                    });
                }
            }
            other => {
                return Err(FormatError::Malformed {
                    line: lineno,
                    message: format!("unknown record `{other}`"),
                });
            }
        }
    }
    let (n, m, k) = header.ok_or(FormatError::MissingHeader("p fo"))?;
    if edges.len() != m {
        return Err(FormatError::CountMismatch { what: "edge", declared: m, actual: edges.len() });
    }
    if terminals.len() != k {
        return Err(FormatError::CountMismatch {
            what: "terminal",
            declared: k,
            actual: terminals.len(),
        });
    }
    if let Some((&max, _)) = terminals.iter().next_back() {
        if max != k {
            return Err(FormatError::Invalid(format!("terminal indices must be exactly 1..{k}")));
        }
    }
    let term_seq: Vec<usize> = terminals.into_values().collect();
    Graph::new(n, edges, term_seq).map_err(|e| FormatError::Graph(e.to_string()))
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = format!("p fo {} {} {}\n", g.vertex_count(), g.edge_count(), g.k());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    for (i, &t) in g.terminals().iter().enumerate() {
        out.push_str(&format!("t {} {}\n", i + 1, t));
    }
    out
}

/// Parses a decomposition; the optional ranking is returned when any
/// `r` lines are present.
pub fn parse_decomposition(
    text: &str,
) -> Result<(PathDecomposition, Option<BTreeMap<usize, usize>>), FormatError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut ranking: BTreeMap<usize, usize> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || is_comment(line) {
            continue;
        }
        let fields = parse_fields(line, lineno)?;
        match fields[0] {
            "s" => {
                if fields.len() != 5 || fields[1] != "td" {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: "expected `s td <l> <maxbagsize> <n>`".into(),
                    });
                }
                header = Some((
                    parse_usize(fields[2], lineno, "bag count")?,
                    parse_usize(fields[3], lineno, "max bag size")?,
                    parse_usize(fields[4], lineno, "vertex count")?,
                ));
            }
            "b" => {
                let j = parse_usize(fields.get(1).copied().unwrap_or(""), lineno, "bag index")?;
                let mut bag = BTreeSet::new();
                for f in &fields[2..] {
                    bag.insert(parse_usize(f, lineno, "vertex")?);
                }
                if j == 0 || bags.insert(j, bag).is_some() {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: format!("bad or repeated bag index {j}"),
                    });
                }
            }
            "r" => {
                if fields.len() != 3 {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: "expected `r <v> <rank>`".into(),
                    });
                }
                let v = parse_usize(fields[1], lineno, "vertex")?;
                let rank = parse_usize(fields[2], lineno, "rank")?;
                if rank == 0 || ranking.insert(v, rank).is_some() {
                    return Err(FormatError::Malformed {
                        line: lineno,
                        message: format!("bad or repeated ranking for vertex {v}"),
                    });
                }
            }
            other => {
                return Err(FormatError::Malformed {
                    line: lineno,
                    message: format!("unknown record `{other}`"),
                });
            }
        }
    }
    let (l, maxbag, _n) = header.ok_or(FormatError::MissingHeader("s td"))?;
    if bags.len() != l {
        return Err(FormatError::CountMismatch { what: "bag", declared: l, actual: bags.len() });
    }
    if let Some((&max, _)) = bags.iter().next_back() {
        if max != l {
            return Err(FormatError::Invalid(format!("bag indices must be exactly 1..{l}")));
        }
    }
    let bag_list: Vec<BTreeSet<usize>> = bags.into_values().collect();
    let actual_max = bag_list.iter().map(|b| b.len()).max().unwrap_or(0);
    if actual_max > maxbag {
        return Err(FormatError::CountMismatch {
            what: "max bag size",
            declared: maxbag,
            actual: actual_max,
        });
    }
    let pd = PathDecomposition::new(bag_list);
    Ok((pd, (!ranking.is_empty()).then_some(ranking)))
}

pub fn serialize_decomposition(pd: &PathDecomposition) -> String {
    let mut out = format!(
        "s td {} {} {}\n",
        pd.len(),
        pd.max_bag_size(),
        pd.vertices().len()
    );
    for (j, bag) in pd.bags().iter().enumerate() {
        out.push_str(&format!("b {}", j + 1));
        for v in bag {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out
}

pub fn serialize_ranked(rpd: &RankedDecomposition) -> String {
    let mut out = serialize_decomposition(rpd.decomposition());
    for (&v, &rank) in rpd.ranking() {
        out.push_str(&format!("r {v} {rank}\n"));
    }
    out
}

/// Turns a parsed decomposition plus `r` lines into a ranked one.
pub fn ranked_from_parts(
    pd: PathDecomposition,
    ranking: BTreeMap<usize, usize>,
) -> Result<RankedDecomposition, FormatError> {
    RankedDecomposition::from_parts(pd, ranking)
        .map_err(|e| FormatError::BadRanking(e.to_string()))
}

/// Parses a formula file: comment lines are blanked (preserving offsets)
/// and the remainder must be a single sentence over constants `1..=k`.
pub fn parse_formula_file(text: &str, k: usize) -> Result<Formula, FormatError> {
    let mut cleaned = String::with_capacity(text.len());
    for line in text.split_inclusive('\n') {
        if is_comment(line) {
            for ch in line.chars() {
                cleaned.push(if ch == '\n' { '\n' } else { ' ' });
            }
        } else {
            cleaned.push_str(line);
        }
    }
    Ok(parse_formula(&cleaned, k)?)
}

pub fn serialize_formula(phi: &Formula) -> String {
    format!("{phi}\n")
}
