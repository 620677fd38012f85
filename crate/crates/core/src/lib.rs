//! Simulated annealing for the travelling salesman problem on complete graphs
//! with i.i.d. random edge weights.
//!
//! The crate provides random instances and canonical tours, the 2-opt
//! neighborhood, Metropolis chains under several cooling schedules, the
//! quenched and annealed samplers, closed-form bounds for the annealed
//! model, exact small-`n` oracles and empirical-CDF dominance checks. The
//! [`experiment`] module wires these into the `tsp-anneal` command line.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod chain;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod neighborhood;
pub mod oracle;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use instance::{Instance, Tour, WeightModel};
pub use neighborhood::{StateGraph, TwoOptMove};
