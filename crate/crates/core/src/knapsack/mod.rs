//! Classical knapsack layer: instances, file format, greedy baselines and the
//! exact DP oracle.

mod bitstring;
mod exact;
mod generate;
mod greedy;
mod instance;
mod io;

pub use bitstring::{Bitstring, MAX_BITS};
pub use exact::{solve_exact_dp, solve_exact_dp_with_budget, ExactSolution, DEFAULT_DP_BUDGET};
pub use generate::{generate_instance, generate_random_instance, InstanceClass};
pub use greedy::{lazy_greedy, sort_by_quality, very_greedy, GreedyResult};
pub use instance::{KnapsackInstance, Quality};
pub use io::{parse_instance, read_instance, write_instance};
