//! Simulation and benchmarking of hard-constrained QAOA for the 0-1 knapsack
//! problem.
//!
//! Two state engines are provided:
//!
//! - the *restricted* engine, which evolves amplitudes over the feasible
//!   subspace only and mixes with the rank-one reflection around the quantum
//!   tree generator (QTG) state `|KP>`;
//! - the *full* engine, which evolves all `2^n` amplitudes and mixes with the
//!   ring-copula mixer on top of a logistic warm-start product state.
//!
//! Around them sit the classical knapsack layer (greedy heuristics, exact DP),
//! angle optimization (grid search plus bounded Powell refinement), a
//! closed-form cycle estimator, and the benchmark harness behind the
//! `qtg-qaoa` binary.

pub mod error;
pub mod experiment;
pub mod knapsack;
pub mod optimize;
pub mod qaoa;
pub mod qtg;
pub mod resources;

pub use error::{Error, Result};
pub use knapsack::{Bitstring, ExactSolution, GreedyResult, KnapsackInstance, Quality};
pub use optimize::{OptimizationTrace, OptimizeConfig};
pub use qaoa::{Engine, QaoaAngles, QaoaProblem, StateVector};
pub use qtg::{BiasConfig, FeasibleSuperposition};
pub use resources::CycleReport;
