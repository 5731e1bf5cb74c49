//! Exact weighted model counting for 2-CNF and 3-CNF formulas.
//!
//! The counters in [`solver`] combine the reductions in [`reduce`] with
//! branching and finish low-degree formulas with the path-decomposition
//! programs in [`pwdp`]. [`oracle`] enumerates assignments and serves as the
//! reference count.

pub mod dimacs;
pub mod error;
pub mod formula;
pub mod generate;
pub mod graphs;
pub mod oracle;
pub mod pathdecomp;
pub mod pwdp;
pub mod reduce;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use formula::{Assignment, Clause, Formula, Instance, Lit, Var, Weights};
pub use solver::{alg2cnf, alg3cnf, SolverConfig};
