//! Feature membership for decision-diagram classifiers.
//!
//! Given a classifier represented as a structured sentential decision
//! diagram ([`sdd::Sdd`]) or as an explanation graph ([`xpg::XpGraph`],
//! derived from an OBDD or a decision tree), an instance `(v, c)` and a
//! target feature `t`, decide whether `t` occurs in some abductive
//! explanation of the prediction. The decision is a reduction to
//! propositional satisfiability ([`encode`], [`sat`]); a positive answer
//! comes with a witness explanation ([`fmp`]).
//!
//! The crate is `no_std` and only needs `alloc`. Parsing of the text file
//! formats, external solvers, timing and the command-line front end live in
//! the `fmp` companion crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classifier;
pub mod cnf;
pub mod encode;
pub mod explain;
pub mod feature;
pub mod fmp;
pub mod gen;
pub mod sat;
pub mod sdd;
pub mod xpg;

pub use classifier::{Class, Classifier, PointError, Value};
pub use feature::{FeatureSet, Instance};
