//! Transversal (rainbow) Hamilton paths and cycles in collections of tournaments.
//!
//! A collection `T = (T_0, .., T_{m-1})` of tournaments on a common vertex set is
//! read as an edge-colored multidigraph where arc `e` carries every color `i`
//! with `e ∈ T_i`. A transversal path or cycle uses each of its arcs in a
//! distinct color.
//!
//! The crate provides the data model ([`Tournament`], [`TournamentCollection`],
//! [`ColoredDigraph`]), instance [`generators`], an exact [`oracle`], the
//! polynomial-time [`constructive`] building blocks, end-to-end [`pipeline`]
//! solvers, and the verification [`harness`].

pub mod collection;
pub mod constructive;
pub mod digraph;
pub mod error;
pub mod generators;
pub mod harness;
pub mod matching;
pub mod oracle;
pub mod pipeline;
pub mod tournament;

pub type VertexId = usize;
pub type ColorId = usize;
/// Exact rational used for density parameters.
pub type Ratio = num_rational::Ratio<u64>;

pub use collection::{ceil_mul, color_set, CollectionFile, MajorityDigraph, Relabel, TournamentCollection};
pub use digraph::{ColoredArc, ColoredDigraph, RainbowCycle, RainbowPath, Violation};
pub use error::{Error, Result};
pub use oracle::{OracleOutcome, SearchBudget, Status, Witness};
pub use tournament::Tournament;
