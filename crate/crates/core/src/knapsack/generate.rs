use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knapsack::instance::KnapsackInstance;

/// Profit/weight relation of generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InstanceClass {
    /// Independent uniform profits and weights.
    #[default]
    Uncorrelated,
    /// `p = w + max(1, max_weight / 10)`: every item has nearly the same
    /// quality, so greedy orderings carry little information.
    StronglyCorrelated,
}

impl InstanceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstanceClass::Uncorrelated => "uncorrelated",
            InstanceClass::StronglyCorrelated => "strongly-correlated",
        }
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uncorrelated" => Ok(InstanceClass::Uncorrelated),
            "strongly-correlated" => Ok(InstanceClass::StronglyCorrelated),
            other => Err(Error::invalid(format!("unknown instance class {other:?}"))),
        }
    }
}

/// Uniform random instance: profits in `[1, max_profit]`, weights in
/// `[1, max_weight]`, capacity `max(1, round(capacity_ratio * Σw))`.
pub fn generate_random_instance(
    n: usize,
    max_profit: u64,
    max_weight: u64,
    capacity_ratio: f64,
    seed: u64,
) -> Result<KnapsackInstance> {
    generate_instance(InstanceClass::Uncorrelated, n, max_profit, max_weight, capacity_ratio, seed)
}

/// Random instance of the given class. `max_profit` is ignored for
/// [`InstanceClass::StronglyCorrelated`]; capacity is
/// `max(1, round(capacity_ratio * Σw))` in both cases.
pub fn generate_instance(
    class: InstanceClass,
    n: usize,
    max_profit: u64,
    max_weight: u64,
    capacity_ratio: f64,
    seed: u64,
) -> Result<KnapsackInstance> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if max_profit == 0 || max_weight == 0 {
        return Err(Error::invalid("profit and weight bounds must be at least 1"));
    }
    if !(capacity_ratio > 0.0 && capacity_ratio <= 1.0) {
        return Err(Error::invalid(format!(
            "capacity ratio must lie in (0, 1], got {capacity_ratio}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (profits, weights): (Vec<u64>, Vec<u64>) = match class {
        InstanceClass::Uncorrelated => {
            let profits = (0..n).map(|_| rng.gen_range(1..=max_profit)).collect();
            let weights = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
            (profits, weights)
        }
        InstanceClass::StronglyCorrelated => {
            let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
            let offset = (max_weight / 10).max(1);
            (weights.iter().map(|w| w + offset).collect(), weights)
        }
    };
    let total: u64 = weights.iter().sum();
    let capacity = ((capacity_ratio * total as f64).round() as u64).max(1);
    KnapsackInstance::new(format!("rand_n{n}_s{seed}"), profits, weights, capacity)
}
