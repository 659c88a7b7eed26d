use crate::knapsack::bitstring::Bitstring;
use crate::knapsack::instance::{KnapsackInstance, Quality};

/// Outcome of a greedy packing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    pub selection: Bitstring,
    pub total_profit: u64,
    pub total_weight: u64,
    /// Quality of the first item lazy greedy rejects. `None` when every item
    /// fits, in which case the logistic warm start is undefined.
    pub r_stop: Option<Quality>,
}

/// Item indices by descending quality `v/w`; equal qualities keep ascending
/// index order.
pub fn sort_by_quality(inst: &KnapsackInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.n()).collect();
    // stable sort keeps the index tie-break
    order.sort_by_key(|&i| std::cmp::Reverse(inst.quality(i)));
    order
}

/// Packs items in quality order and stops at the first one that does not fit.
pub fn lazy_greedy(inst: &KnapsackInstance) -> GreedyResult {
    let n = inst.n();
    let mut selection = Bitstring::zeros(n);
    let mut weight = 0u64;
    let mut profit = 0u64;
    let mut r_stop = None;
    for item in sort_by_quality(inst) {
        let w = inst.weights()[item];
        if weight + w > inst.capacity() {
            r_stop = Some(inst.quality(item));
            break;
        }
        selection.set(item, true);
        weight += w;
        profit += inst.profits()[item];
    }
    GreedyResult {
        selection,
        total_profit: profit,
        total_weight: weight,
        r_stop,
    }
}

/// Packs items in quality order, skipping those that do not fit.
///
/// The result always contains the lazy-greedy selection; `r_stop` is taken
/// from the lazy pass.
pub fn very_greedy(inst: &KnapsackInstance) -> GreedyResult {
    let n = inst.n();
    let mut selection = Bitstring::zeros(n);
    let mut weight = 0u64;
    let mut profit = 0u64;
    for item in sort_by_quality(inst) {
        let w = inst.weights()[item];
        if weight + w > inst.capacity() {
            continue;
        }
        selection.set(item, true);
        weight += w;
        profit += inst.profits()[item];
    }
    GreedyResult {
        selection,
        total_profit: profit,
        total_weight: weight,
        r_stop: lazy_greedy(inst).r_stop,
    }
}
