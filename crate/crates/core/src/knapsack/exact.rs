use crate::error::{Error, Result};
use crate::knapsack::bitstring::Bitstring;
use crate::knapsack::instance::KnapsackInstance;

/// Default cap on `n * (c + 1)` DP cells.
pub const DEFAULT_DP_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub optimum: u64,
    pub witness: Bitstring,
}

pub fn solve_exact_dp(inst: &KnapsackInstance) -> Result<ExactSolution> {
    solve_exact_dp_with_budget(inst, DEFAULT_DP_BUDGET)
}

/// Capacity-indexed DP in `O(n c)` time with a bit-packed decision table for
/// witness reconstruction.
pub fn solve_exact_dp_with_budget(inst: &KnapsackInstance, budget: u64) -> Result<ExactSolution> {
    let n = inst.n();
    let cap = inst.capacity();
    let cells = (n as u128) * (cap as u128 + 1);
    if cells > budget as u128 {
        return Err(Error::ResourceLimit(format!(
            "DP table of {cells} cells exceeds budget {budget}"
        )));
    }
    let width = cap as usize + 1;
    let words = width.div_ceil(64);
    let mut best = vec![0u64; width];
    let mut take = vec![0u64; n * words];

    for item in 0..n {
        let w = inst.weights()[item] as usize;
        let v = inst.profits()[item];
        if w >= width {
            continue;
        }
        let row = &mut take[item * words..(item + 1) * words];
        for load in (w..width).rev() {
            let with = best[load - w] + v;
            if with > best[load] {
                best[load] = with;
                row[load / 64] |= 1 << (load % 64);
            }
        }
    }

    let mut witness = Bitstring::zeros(n);
    let mut load = cap as usize;
    for item in (0..n).rev() {
        if take[item * words + load / 64] >> (load % 64) & 1 == 1 {
            witness.set(item, true);
            load -= inst.weights()[item] as usize;
        }
    }
    let optimum = best[cap as usize];
    debug_assert_eq!(inst.profit_of(witness.value()), optimum);
    Ok(ExactSolution { optimum, witness })
}
