//! Reconstruction of the hidden induced subgraph behind a respondent-driven
//! sampling (RDS) study.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the whole
//! algorithmic path:
//!
//! - [`graph`]: simple undirected graphs, edge-list parsing, packed adjacency.
//! - [`timing`]: waiting-time families with survival and hazard functions.
//! - [`sim`]: event-driven simulation of coupon-limited chain referral.
//! - [`likelihood`]: the recruitment-time likelihood, the degree prior, the
//!   binary encoding of `(A, u)` and the normalized submodular objective.
//! - [`submodular`]: modular bounds, supergradients and minimum-norm-point
//!   minimization over any submodular oracle.
//! - [`vine`]: bound-and-threshold reconstruction and the A/θ alternation.
//! - [`baseline`]: the recruitment-graph baseline and a simulated annealer.
//! - [`eval`]: confusion counts, ROC curves, AUC and corner distance.
//!
//! File formats, the CLI and replicate pipelines live in the companion
//! `rdsnet` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baseline;
pub mod bitset;
pub mod eval;
pub mod graph;
pub mod likelihood;
pub mod math;
pub mod rng;
pub mod sim;
pub mod submodular;
pub mod timing;
pub mod vine;

pub use bitset::BitSet;
pub use graph::{AdjacencyMatrix, Graph};
pub use timing::TimingModel;
