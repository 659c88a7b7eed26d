use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::knapsack::bitstring::{Bitstring, MAX_BITS};

/// A 0-1 knapsack instance with positive integer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    name: String,
    profits: Vec<u64>,
    weights: Vec<u64>,
    capacity: u64,
}

impl KnapsackInstance {
    pub fn new(
        name: impl Into<String>,
        profits: Vec<u64>,
        weights: Vec<u64>,
        capacity: u64,
    ) -> Result<Self> {
        if profits.is_empty() {
            return Err(Error::invalid("instance needs at least one item"));
        }
        if profits.len() != weights.len() {
            return Err(Error::invalid(format!(
                "{} profits but {} weights",
                profits.len(),
                weights.len()
            )));
        }
        if profits.len() > MAX_BITS {
            return Err(Error::invalid(format!("at most {MAX_BITS} items are supported")));
        }
        if let Some(m) = profits.iter().position(|&v| v == 0) {
            return Err(Error::invalid(format!("profit of item {} must be positive", m + 1)));
        }
        if let Some(m) = weights.iter().position(|&w| w == 0) {
            return Err(Error::invalid(format!("weight of item {} must be positive", m + 1)));
        }
        if capacity == 0 {
            return Err(Error::invalid("capacity must be positive"));
        }
        // Totals must fit u64 so that objective and weight sums cannot overflow.
        for (what, xs) in [("profits", &profits), ("weights", &weights)] {
            if xs.iter().try_fold(0u64, |acc, &x| acc.checked_add(x)).is_none() {
                return Err(Error::invalid(format!("sum of {what} overflows u64")));
            }
        }
        Ok(Self {
            name: name.into(),
            profits,
            weights,
            capacity,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.profits.len()
    }

    pub fn profits(&self) -> &[u64] {
        &self.profits
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    #[inline]
    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn total_profit(&self) -> u64 {
        self.profits.iter().sum()
    }

    /// Only the empty packing is feasible.
    pub fn is_trivial(&self) -> bool {
        self.weights.iter().all(|&w| w > self.capacity)
    }

    pub fn quality(&self, item: usize) -> Quality {
        Quality::new(self.profits[item], self.weights[item])
    }

    fn check_len(&self, x: &Bitstring) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::invalid(format!(
                "bitstring has {} bits, instance has {} items",
                x.len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Raw objective `Σ v_m x_m`, without feasibility gating.
    pub fn objective_value(&self, x: &Bitstring) -> Result<u64> {
        self.check_len(x)?;
        Ok(self.profit_of(x.value()))
    }

    pub fn weight_value(&self, x: &Bitstring) -> Result<u64> {
        self.check_len(x)?;
        Ok(self.weight_of(x.value()))
    }

    pub fn is_feasible(&self, x: &Bitstring) -> Result<bool> {
        Ok(self.weight_value(x)? <= self.capacity)
    }

    /// Profit of a packed value (item 0 = most significant bit).
    pub(crate) fn profit_of(&self, value: u64) -> u64 {
        sum_selected(&self.profits, value)
    }

    pub(crate) fn weight_of(&self, value: u64) -> u64 {
        sum_selected(&self.weights, value)
    }
}

fn sum_selected(xs: &[u64], value: u64) -> u64 {
    let n = xs.len();
    xs.iter()
        .enumerate()
        .filter(|&(i, _)| value & Bitstring::item_mask(n, i) != 0)
        .map(|(_, &x)| x)
        .sum()
}

/// Exact item quality `v / w`, compared by cross-multiplication.
#[derive(Debug, Clone, Copy)]
pub struct Quality {
    pub profit: u64,
    pub weight: u64,
}

impl Quality {
    pub fn new(profit: u64, weight: u64) -> Self {
        assert!(weight > 0, "quality with zero weight");
        Self { profit, weight }
    }

    pub fn as_f64(&self) -> f64 {
        self.profit as f64 / self.weight as f64
    }
}

impl PartialEq for Quality {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Quality {}

impl PartialOrd for Quality {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Quality {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.profit as u128 * other.weight as u128;
        let rhs = other.profit as u128 * self.weight as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.profit, self.weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_i1() -> KnapsackInstance {
        KnapsackInstance::new("I1", vec![4, 2, 1], vec![3, 2, 1], 3).unwrap()
    }

    fn bits(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    #[test]
    fn objective_examples() {
        let inst = tiny_i1();
        assert_eq!(inst.objective_value(&bits("000")).unwrap(), 0);
        assert_eq!(inst.objective_value(&bits("100")).unwrap(), 4);
        assert_eq!(inst.objective_value(&bits("011")).unwrap(), 3);
        // raw objective ignores feasibility
        assert_eq!(inst.objective_value(&bits("111")).unwrap(), 7);
    }

    #[test]
    fn feasibility_examples() {
        let inst = tiny_i1();
        assert!(inst.is_feasible(&bits("011")).unwrap());
        assert!(!inst.is_feasible(&bits("101")).unwrap());
        assert!(inst.is_feasible(&bits("000")).unwrap());
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let inst = tiny_i1();
        assert!(matches!(
            inst.objective_value(&bits("10")),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            inst.is_feasible(&bits("1000")),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn rejects_non_positive_data() {
        assert!(KnapsackInstance::new("x", vec![], vec![], 1).is_err());
        assert!(KnapsackInstance::new("x", vec![0], vec![1], 1).is_err());
        assert!(KnapsackInstance::new("x", vec![1], vec![0], 1).is_err());
        assert!(KnapsackInstance::new("x", vec![1], vec![1], 0).is_err());
        assert!(KnapsackInstance::new("x", vec![1, 2], vec![1], 1).is_err());
    }

    #[test]
    fn trivial_flag() {
        let inst = KnapsackInstance::new("t", vec![5, 5], vec![4, 6], 3).unwrap();
        assert!(inst.is_trivial());
        assert!(!tiny_i1().is_trivial());
    }

    #[test]
    fn quality_order_is_exact() {
        // 1/3 vs 333333333333/1000000000000 differ only far past f64 epsilon
        let a = Quality::new(1, 3);
        let b = Quality::new(333_333_333_333_333_333, 1_000_000_000_000_000_000);
        assert!(a > b);
        assert_eq!(Quality::new(2, 4), Quality::new(1, 2));
    }
}
