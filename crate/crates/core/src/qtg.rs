//! Amplitude-level simulation of the quantum tree generator (QTG).
//!
//! The QTG walks the items in order, tracking the accumulated weight `w̃` of
//! the current branch. At item `m` the branch splits into exclude/include with
//! amplitudes `cos(θ/2)` / `sin(θ/2)` if `w̃ <= c - w_m`, and otherwise stays
//! on the exclude branch with amplitude 1. The leaves are exactly the feasible
//! packings, each with a strictly positive real amplitude, so the state can
//! be built by propagating branch amplitudes classically.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

use crate::error::{Error, Result};
use crate::knapsack::{Bitstring, KnapsackInstance};

/// Largest `n` accepted by the brute-force feasibility oracle.
pub const BRUTE_FORCE_MAX_ITEMS: usize = 25;

/// Branching bias of the tree generator.
#[derive(Debug, Clone, PartialEq)]
pub enum BiasConfig {
    /// `θ = π/2` on every item (equal `1/√2` branch factors).
    Uniform,
    FixedAngle(f64),
    PerItem(Vec<f64>),
}

impl Default for BiasConfig {
    fn default() -> Self {
        BiasConfig::Uniform
    }
}

impl BiasConfig {
    pub fn fixed_angle(theta: f64) -> Result<Self> {
        check_angle(theta)?;
        Ok(BiasConfig::FixedAngle(theta))
    }

    pub fn per_item(thetas: Vec<f64>) -> Result<Self> {
        thetas.iter().try_for_each(|&t| check_angle(t))?;
        Ok(BiasConfig::PerItem(thetas))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            BiasConfig::Uniform => Ok(()),
            BiasConfig::FixedAngle(t) => check_angle(*t),
            BiasConfig::PerItem(ts) => {
                if ts.len() != n {
                    return Err(Error::invalid(format!(
                        "{} bias angles for {n} items",
                        ts.len()
                    )));
                }
                ts.iter().try_for_each(|&t| check_angle(t))
            }
        }
    }

    /// `(exclude, include)` branch factors for item `m`.
    fn factors(&self, m: usize) -> (f64, f64) {
        match self {
            BiasConfig::Uniform => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            BiasConfig::FixedAngle(t) => ((t / 2.0).cos(), (t / 2.0).sin()),
            BiasConfig::PerItem(ts) => ((ts[m] / 2.0).cos(), (ts[m] / 2.0).sin()),
        }
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < PI {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "bias angle {theta} outside (0, π); both branches need positive amplitude"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub bits: Bitstring,
    pub amplitude: f64,
    pub profit: u64,
    pub weight: u64,
}

/// The QTG output `|KP>`: feasible packings in ascending bitstring order with
/// their positive amplitudes and cached profit/weight.
#[derive(Debug, Clone)]
pub struct FeasibleSuperposition {
    instance: KnapsackInstance,
    entries: Vec<Entry>,
}

impl FeasibleSuperposition {
    pub fn instance(&self) -> &KnapsackInstance {
        &self.instance
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of `x` in [`entries`](Self::entries), if feasible.
    pub fn position(&self, x: &Bitstring) -> Option<usize> {
        self.entries.binary_search_by(|e| e.bits.cmp(x)).ok()
    }

    /// Stored amplitude of `x`, or 0 for infeasible packings.
    pub fn amplitude_of(&self, x: &Bitstring) -> Result<f64> {
        if x.len() != self.instance.n() {
            return Err(Error::invalid(format!(
                "bitstring has {} bits, instance has {} items",
                x.len(),
                self.instance.n()
            )));
        }
        Ok(self.position(x).map_or(0.0, |i| self.entries[i].amplitude))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.amplitude * e.amplitude).sum()
    }

    pub fn min_amplitude(&self) -> f64 {
        self.entries.iter().map(|e| e.amplitude).fold(f64::INFINITY, f64::min)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.entries.iter().map(|e| e.amplitude).fold(0.0, f64::max)
    }

    /// `<KP| H_f |KP>`.
    pub fn expected_profit(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.amplitude * e.amplitude * e.profit as f64)
            .sum()
    }

    /// Debug dump: `bitstring,amplitude,profit,weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bitstring", "amplitude", "profit", "weight"])?;
        for e in &self.entries {
            w.write_record([
                e.bits.to_string(),
                format!("{:.17e}", e.amplitude),
                e.profit.to_string(),
                e.weight.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds `|KP> = QTG |0>` by depth-first propagation of branch amplitudes.
///
/// Exclude branches are visited before include branches, so leaves are
/// produced in ascending bitstring order.
pub fn build_superposition(inst: &KnapsackInstance, bias: &BiasConfig) -> Result<FeasibleSuperposition> {
    bias.validate(inst.n())?;
    let mut entries = Vec::new();
    descend(inst, bias, 0, 0, 0, 0, 1.0, &mut entries);
    debug_assert!(entries.windows(2).all(|w| w[0].bits < w[1].bits));
    Ok(FeasibleSuperposition {
        instance: inst.clone(),
        entries,
    })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    inst: &KnapsackInstance,
    bias: &BiasConfig,
    item: usize,
    prefix: u64,
    weight: u64,
    profit: u64,
    amplitude: f64,
    out: &mut Vec<Entry>,
) {
    let n = inst.n();
    if item == n {
        out.push(Entry {
            bits: Bitstring::from_value(n, prefix),
            amplitude,
            profit,
            weight,
        });
        return;
    }
    let w = inst.weights()[item];
    let mask = Bitstring::item_mask(n, item);
    // accumulated weight still leaves room for item `item`
    if w <= inst.capacity() && weight <= inst.capacity() - w {
        let (stay, take) = bias.factors(item);
        descend(inst, bias, item + 1, prefix, weight, profit, amplitude * stay, out);
        descend(
            inst,
            bias,
            item + 1,
            prefix | mask,
            weight + w,
            profit + inst.profits()[item],
            amplitude * take,
            out,
        );
    } else {
        descend(inst, bias, item + 1, prefix, weight, profit, amplitude, out);
    }
}

/// Exhaustive feasible set, ascending. Test oracle for small `n`.
pub fn enumerate_feasible_bruteforce(inst: &KnapsackInstance) -> Result<Vec<Bitstring>> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::ResourceLimit(format!(
            "brute force over 2^{n} packings exceeds the 2^{BRUTE_FORCE_MAX_ITEMS} limit"
        )));
    }
    let mut out = Vec::new();
    for v in 0..1u64 << n {
        let x = Bitstring::from_value(n, v);
        if inst.is_feasible(&x)? {
            out.push(x);
        }
    }
    Ok(out)
}
