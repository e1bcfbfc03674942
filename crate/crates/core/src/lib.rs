//! Computational tools around the Hanna Neumann inequality for free groups
//! and graphs of free groups with cyclic edge groups.
//!
//! - [`words`]: reduced and cyclic words, primitive roots.
//! - [`stallings`]: Stallings automata, fiber products, double cosets.
//! - [`hall`]: Marshall Hall completions and independence certificates.
//! - [`gog`]: graphs of free groups with cyclic or trivial edge groups.
//! - [`phi`]: Wise's weighted graph, balanced/solvable classification.
//! - [`ghnc`]: the inequality checker, brute-force oracle and batch harness.
//! - [`cli`]: the `ghnclab` command line.

pub mod cli;
pub mod error;
pub mod ghnc;
pub mod gog;
pub mod hall;
pub mod phi;
pub mod stallings;
pub mod words;

pub use error::{Error, Result};
