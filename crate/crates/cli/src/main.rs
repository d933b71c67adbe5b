//! fopw: first-order model checking on graphs of bounded pathwidth.
//!
//! Exit codes: 0 = formula true / graphs equivalent, 1 = formula false /
//! graphs inequivalent, 2 = error. Bag indices on the command line are
//! 1-based, matching the text formats.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fopw_core::blockiso::{block_signature, BlockSignature};
use fopw_core::corpus::{generate, CorpusError, Family};
use fopw_core::graph::Graph;
use fopw_core::io::{
    parse_decomposition, parse_formula_file, parse_graph, ranked_from_parts,
    serialize_decomposition, serialize_graph, serialize_ranked,
};
use fopw_core::logic::{ef_equivalent, model_check};
use fopw_core::pathdecomp::{
    rank, remove_redundant_bags, validate, PathDecomposition, RankedDecomposition,
};
use fopw_core::pipeline::{model_check_pw, LabParams, Thresholds};
use fopw_core::rewire::{collapse_interval, rewire};

#[derive(Parser)]
#[command(name = "fopw", version, about = "FO model checking on bounded-pathwidth graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strict,
    Lab,
}

#[derive(Args)]
struct ThresholdArgs {
    /// strict: tower-function thresholds; lab: the configured table
    #[arg(long, value_enum, default_value = "strict")]
    mode: ModeArg,
    /// lab threshold table, comma separated, one entry per rank
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<u64>>,
    /// lab cut-search radius override
    #[arg(long)]
    lhat: Option<u64>,
    /// lab window radius
    #[arg(long)]
    rhat: Option<u64>,
    /// lab repeat-scan span cap
    #[arg(long)]
    rstar: Option<u64>,
}

impl ThresholdArgs {
    fn build(&self) -> Result<Thresholds, String> {
        match self.mode {
            ModeArg::Strict => {
                if self.delta.is_some()
                    || self.lhat.is_some()
                    || self.rhat.is_some()
                    || self.rstar.is_some()
                {
                    return Err("strict mode forbids threshold overrides".into());
                }
                Ok(Thresholds::strict())
            }
            ModeArg::Lab => {
                let delta = self
                    .delta
                    .clone()
                    .ok_or("lab mode requires --delta with a full threshold table")?;
                let rhat = self.rhat.ok_or("lab mode requires --rhat")?;
                Thresholds::lab(LabParams { delta, lhat: self.lhat, rhat, rstar: self.rstar })
                    .map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline: normalize, simplify while possible, then decide
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        td: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// write the certificate trace to this file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Brute-force model checking only
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        formula: PathBuf,
    },
    /// q-round Ehrenfeucht-Fraisse equivalence of two graphs
    Ef {
        #[arg(long)]
        q: usize,
        g1: PathBuf,
        g2: PathBuf,
    },
    /// Remove redundant bags and attach the greedy ranking
    Normalize {
        #[arg(long)]
        td: PathBuf,
        /// validate the decomposition against this graph first
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print block-signature classes over a window of bag starts
    Blocks {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        td: PathBuf,
        /// first bag of the window (1-based)
        #[arg(long)]
        t1: usize,
        /// last bag of the window (1-based)
        #[arg(long)]
        t2: usize,
        /// block length L (a block spans L + 1 bags)
        #[arg(long)]
        len: usize,
    },
    /// Apply the rewiring surgery at two cut bags (1-based)
    Rewire {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        td: PathBuf,
        #[arg(long)]
        s1: usize,
        #[arg(long)]
        s2: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collapse a bag interval (1-based), identifying the cut bags
    Collapse {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        td: PathBuf,
        #[arg(long)]
        q1: usize,
        #[arg(long)]
        q2: usize,
        #[arg(long)]
        out_graph: Option<PathBuf>,
        #[arg(long)]
        out_td: Option<PathBuf>,
    },
    /// Generate a corpus instance and its decomposition
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long)]
        out_prefix: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes via a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, content: &str) -> Result<(), String> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content).map_err(|e| format!("{}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph, String> {
    parse_graph(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_decomposition(
    path: &Path,
) -> Result<(PathDecomposition, Option<RankedDecomposition>), String> {
    let (pd, ranking) =
        parse_decomposition(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    match ranking {
        Some(r) => {
            let rpd = ranked_from_parts(pd.clone(), r).map_err(|e| e.to_string())?;
            Ok((pd, Some(rpd)))
        }
        None => Ok((pd, None)),
    }
}

/// Decompositions without ranking lines are ranked as given, so bag
/// indices from the command line keep their meaning.
fn ranked_as_given(pd: PathDecomposition, rpd: Option<RankedDecomposition>) -> RankedDecomposition {
    rpd.unwrap_or_else(|| rank(&pd))
}

fn bag_index(arg: usize, len: usize, name: &str) -> Result<usize, String> {
    if arg == 0 || arg > len {
        Err(format!("--{name} {arg} out of range (decomposition has {len} bags)"))
    } else {
        Ok(arg - 1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Check { graph, td, formula, thresholds, trace } => {
            let g = load_graph(&graph)?;
            let (pd, _) = load_decomposition(&td)?;
            let phi = parse_formula_file(&read(&formula)?, g.k()).map_err(|e| e.to_string())?;
            let th = thresholds.build()?;
            let report = model_check_pw(&g, &pd, &phi, &th).map_err(|e| e.to_string())?;
            if let Some(path) = trace {
                let mut text = String::from("c fopw trace\n");
                for line in &report.trace {
                    text.push_str(line);
                    text.push('\n');
                }
                write_atomic(&path, &text)?;
            }
            println!("answer {}", report.answer);
            println!("rounds {}", report.rounds);
            println!("degree-bound {}", report.degree_bound);
            println!("final-n {}", report.final_vertices);
            Ok(if report.answer { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Oracle { graph, formula } => {
            let g = load_graph(&graph)?;
            let phi = parse_formula_file(&read(&formula)?, g.k()).map_err(|e| e.to_string())?;
            let answer = model_check(&g, &phi).map_err(|e| e.to_string())?;
            println!("{answer}");
            Ok(if answer { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Ef { q, g1, g2 } => {
            let a = load_graph(&g1)?;
            let b = load_graph(&g2)?;
            let eq = ef_equivalent(&a, &b, q).map_err(|e| e.to_string())?;
            println!("{}", if eq { "equivalent" } else { "inequivalent" });
            Ok(if eq { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Normalize { td, graph, out } => {
            let (pd, _) = load_decomposition(&td)?;
            if let Some(gpath) = &graph {
                let g = load_graph(gpath)?;
                let report = validate(&g, &pd);
                if !report.is_valid() {
                    return Err(format!("invalid decomposition: {}", report.violations[0]));
                }
            }
            let rpd = rank(&remove_redundant_bags(&pd));
            let text = serialize_ranked(&rpd);
            match out {
                Some(path) => write_atomic(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Blocks { graph, td, t1, t2, len } => {
            let g = load_graph(&graph)?;
            let (pd, rpd) = load_decomposition(&td)?;
            let rpd = ranked_as_given(pd, rpd);
            let lo = bag_index(t1, rpd.len(), "t1")?;
            let hi = bag_index(t2, rpd.len(), "t2")?;
            if lo > hi {
                return Err("--t1 must not exceed --t2".into());
            }
            let mut classes: Vec<(BlockSignature, Vec<usize>)> = Vec::new();
            let mut index: HashMap<BlockSignature, usize> = HashMap::new();
            for s in lo..=hi.saturating_sub(len) {
                let sig = block_signature(&rpd, &g, s, len).map_err(|e| e.to_string())?;
                match index.get(&sig) {
                    Some(&i) => classes[i].1.push(s),
                    None => {
                        index.insert(sig.clone(), classes.len());
                        classes.push((sig, vec![s]));
                    }
                }
            }
            for (i, (_, starts)) in classes.iter().enumerate() {
                let list: Vec<String> = starts.iter().map(|s| (s + 1).to_string()).collect();
                println!("class {}: {}", i + 1, list.join(","));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Rewire { graph, td, s1, s2, out } => {
            let g = load_graph(&graph)?;
            let (pd, rpd) = load_decomposition(&td)?;
            let rpd = ranked_as_given(pd, rpd);
            let a = bag_index(s1, rpd.len(), "s1")?;
            let b = bag_index(s2, rpd.len(), "s2")?;
            if a >= b {
                return Err("--s1 must be smaller than --s2".into());
            }
            let text = serialize_graph(&rewire(&g, &rpd, a, b));
            match out {
                Some(path) => write_atomic(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Collapse { graph, td, q1, q2, out_graph, out_td } => {
            let g = load_graph(&graph)?;
            let (pd, rpd) = load_decomposition(&td)?;
            let rpd = ranked_as_given(pd, rpd);
            let a = bag_index(q1, rpd.len(), "q1")?;
            let b = bag_index(q2, rpd.len(), "q2")?;
            if a >= b {
                return Err("--q1 must be smaller than --q2".into());
            }
            let outcome = collapse_interval(&g, &rpd, a, b).map_err(|e| e.to_string())?;
            let gtext = serialize_graph(&outcome.graph);
            let ttext = serialize_ranked(&outcome.rpd);
            match out_graph {
                Some(path) => write_atomic(&path, &gtext)?,
                None => print!("{gtext}"),
            }
            match out_td {
                Some(path) => write_atomic(&path, &ttext)?,
                None => print!("{ttext}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gen { family, n, seed, out_prefix } => {
            let family: Family = family.parse().map_err(|e: CorpusError| e.to_string())?;
            let (g, pd) = generate(family, n, seed).map_err(|e| e.to_string())?;
            let mut gpath = out_prefix.clone().into_os_string();
            gpath.push(".fo");
            let mut tpath = out_prefix.into_os_string();
            tpath.push(".td");
            write_atomic(Path::new(&gpath), &serialize_graph(&g))?;
            write_atomic(Path::new(&tpath), &serialize_decomposition(&pd))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
