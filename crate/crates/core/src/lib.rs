//! First-order model checking on graphs of bounded pathwidth.
//!
//! The library implements the full simplification pipeline: k-terminal
//! graphs with terminal-respecting isomorphism search, an FO parser and
//! brute-force model checker, a q-round Ehrenfeucht-Fraisse equivalence
//! oracle, ranked path decompositions, block-isomorphism signatures with
//! pigeonhole searches, the rewiring surgery with its safety certificate,
//! identical-part deletion, and the tower-of-exponentials threshold
//! arithmetic that certifies the strict-mode bounds symbolically.

pub mod blockiso;
pub mod corpus;
pub mod graph;
pub mod io;
pub mod logic;
pub mod pathdecomp;
pub mod pipeline;
pub mod rewire;
pub mod tower;
