//! Closed-form cycle and qubit accounting under all-to-all connectivity with
//! full parallelism of disjoint gates.
//!
//! Every report satisfies `c_total = q (c_P + c_M) + c_SP`.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::qaoa::Engine;

/// Cycles of one two-qubit copula mixer: `2 c_R + 1` with `c_R = 3`.
pub const COPULA_PAIR_CYCLES: u64 = 7;

/// Binary length of `a`, i.e. `floor(log2 a) + 1`.
pub fn numbits(a: u64) -> Result<u32> {
    if a == 0 {
        return Err(Error::invalid("numbits is defined for positive integers only"));
    }
    Ok(u64::BITS - a.leading_zeros())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    pub variant: Engine,
    pub n: usize,
    /// Capacity, when the variant's cost depends on it.
    pub capacity: Option<u64>,
    pub capacity_bits: Option<u32>,
    pub q: usize,
    pub c_sp: u64,
    pub c_p: u64,
    pub c_m: u64,
    pub c_total: u64,
    pub qubit_count: usize,
}

impl CycleReport {
    fn assemble(
        variant: Engine,
        n: usize,
        capacity: Option<u64>,
        q: usize,
        (c_sp, c_p, c_m): (u64, u64, u64),
        qubit_count: usize,
    ) -> Result<Self> {
        let c_total = (q as u64)
            .checked_mul(c_p + c_m)
            .and_then(|x| x.checked_add(c_sp))
            .ok_or_else(|| Error::invalid("cycle count overflows u64"))?;
        Ok(Self {
            variant,
            n,
            capacity_bits: capacity.map(numbits).transpose()?,
            capacity,
            q,
            c_sp,
            c_p,
            c_m,
            c_total,
            qubit_count,
        })
    }

    /// Recomputes `q (c_P + c_M) + c_SP` from the components.
    pub fn check_identity(&self) -> bool {
        self.q as u64 * (self.c_p + self.c_m) + self.c_sp == self.c_total
    }
}

/// Copula-QAOA: product-state preparation and phase separator in one cycle
/// each, ring mixer in two (even `n`) or three (odd `n`) rounds of pair mixers.
pub fn copula_cycles(n: usize, q: usize) -> Result<CycleReport> {
    if n < 2 {
        return Err(Error::invalid("ring copula mixer needs n >= 2"));
    }
    if q == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let rounds = if n % 2 == 0 { 2 } else { 3 };
    CycleReport::assemble(Engine::Copula, n, None, q, (1, 1, COPULA_PAIR_CYCLES * rounds), n)
}

/// Multi-controlled phase via a Toffoli cascade over the system and capacity
/// registers: `2 numbits(n + numbits(c) - 2) + 1`.
pub fn mcp_cycles(n: usize, capacity: u64) -> Result<u64> {
    let bits = numbits(capacity)? as u64;
    let arg = (n as u64 + bits)
        .checked_sub(2)
        .filter(|&a| a >= 1)
        .ok_or_else(|| Error::invalid("multi-controlled phase needs at least two controls"))?;
    Ok(2 * numbits(arg)? as u64 + 1)
}

/// Cycle cost `c_QTG` of one tree generator application.
pub trait QtgCostModel {
    fn name(&self) -> &str;
    fn qtg_cycles(&self, inst: &KnapsackInstance) -> u64;
}

/// Default model, `layered-toffoli-adder/v1`: per item, a comparison-controlled
/// rotation through a Toffoli cascade over the capacity register
/// (`2 numbits(numbits(c) - 1) + 1`, or 1 for a single-qubit register) plus a
/// controlled adder on `numbits(c)` qubits (`2 numbits(c) + 1`).
#[derive(Debug, Clone, Copy, Default)]
pub struct LayeredToffoliAdderModel;

impl QtgCostModel for LayeredToffoliAdderModel {
    fn name(&self) -> &str {
        "layered-toffoli-adder/v1"
    }

    fn qtg_cycles(&self, inst: &KnapsackInstance) -> u64 {
        let bits = numbits(inst.capacity()).expect("capacity is positive") as u64;
        let compare = match bits - 1 {
            0 => 1,
            k => 2 * numbits(k).expect("k >= 1") as u64 + 1,
        };
        let add = 2 * bits + 1;
        inst.n() as u64 * (compare + add)
    }
}

/// Wraps a closure as a cost model.
pub struct FnCostModel<F>(pub &'static str, pub F);

impl<F: Fn(&KnapsackInstance) -> u64> QtgCostModel for FnCostModel<F> {
    fn name(&self) -> &str {
        self.0
    }

    fn qtg_cycles(&self, inst: &KnapsackInstance) -> u64 {
        (self.1)(inst)
    }
}

/// QTG-QAOA: `c_SP = c_QTG`, `c_P = 1`, `c_M = 2 c_QTG + c_MC-P`.
pub fn qtg_cycles(inst: &KnapsackInstance, q: usize, model: &dyn QtgCostModel) -> Result<CycleReport> {
    if q == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let c_qtg = model.qtg_cycles(inst);
    let c_m = 2 * c_qtg + mcp_cycles(inst.n(), inst.capacity())?;
    let qubits = inst.n() + numbits(inst.capacity())? as usize;
    CycleReport::assemble(Engine::Qtg, inst.n(), Some(inst.capacity()), q, (c_qtg, 1, c_m), qubits)
}

impl fmt::Display for CycleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} q={}: c_SP={} c_P={} c_M={} total={} qubits={}",
            self.variant, self.n, self.q, self.c_sp, self.c_p, self.c_m, self.c_total, self.qubit_count
        )
    }
}

pub const CYCLES_CSV_HEADER: [&str; 8] = ["variant", "n", "c", "q", "c_SP", "c_P", "c_M", "c_total"];

/// CSV export: `variant,n,c,q,c_SP,c_P,c_M,c_total` (empty `c` for copula).
pub fn write_cycles_csv<W: Write>(reports: &[CycleReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CYCLES_CSV_HEADER)?;
    for r in reports {
        w.write_record(cycle_record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn cycle_record(r: &CycleReport) -> [String; 8] {
    [
        r.variant.to_string(),
        r.n.to_string(),
        r.capacity.map(|c| c.to_string()).unwrap_or_default(),
        r.q.to_string(),
        r.c_sp.to_string(),
        r.c_p.to_string(),
        r.c_m.to_string(),
        r.c_total.to_string(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_i1() -> KnapsackInstance {
        KnapsackInstance::new("I1", vec![4, 2, 1], vec![3, 2, 1], 3).unwrap()
    }

    #[test]
    fn numbits_examples() {
        assert_eq!(numbits(1).unwrap(), 1);
        assert_eq!(numbits(100).unwrap(), 7);
        for k in 0..63 {
            assert_eq!(numbits(1 << k).unwrap(), k + 1);
        }
        assert!(numbits(0).is_err());
    }

    #[test]
    fn copula_examples() {
        let r = copula_cycles(10, 5).unwrap();
        assert_eq!((r.c_m, r.c_total), (14, 76));
        let r = copula_cycles(11, 1).unwrap();
        assert_eq!((r.c_m, r.c_total), (21, 23));
        assert_eq!(copula_cycles(4, 3).unwrap().c_total, copula_cycles(40, 3).unwrap().c_total);
        assert!(copula_cycles(1, 1).is_err());
        assert!(copula_cycles(4, 0).is_err());
    }

    #[test]
    fn mcp_examples() {
        assert_eq!(mcp_cycles(10, 100).unwrap(), 9);
        assert_eq!(mcp_cycles(2, 1).unwrap(), 3);
        assert!(mcp_cycles(1, 1).is_err());
        let mut last = 0;
        for n in 2..60 {
            let c = mcp_cycles(n, 37).unwrap();
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn qtg_with_zero_model() {
        let zero = FnCostModel("zero", |_: &KnapsackInstance| 0);
        let inst = tiny_i1();
        let mcp = mcp_cycles(3, 3).unwrap();
        for q in 1..5 {
            let r = qtg_cycles(&inst, q, &zero).unwrap();
            assert_eq!(r.c_total, q as u64 * (1 + mcp));
            assert_eq!(r.c_sp, 0);
        }
    }

    #[test]
    fn qtg_default_model_i1() {
        let model = LayeredToffoliAdderModel;
        let inst = tiny_i1();
        // c = 3: numbits 2, compare 2·numbits(1)+1 = 3, add 5, three items
        assert_eq!(model.qtg_cycles(&inst), 24);
        let r = qtg_cycles(&inst, 1, &model).unwrap();
        let mcp = mcp_cycles(3, 3).unwrap();
        assert_eq!(r.c_sp, 24);
        assert_eq!(r.c_m, 48 + mcp);
        assert_eq!(r.c_total, 3 * 24 + mcp + 1);
        assert_eq!(r.capacity_bits, Some(2));
        assert_eq!(r.qubit_count, 5);
        assert!(r.check_identity());
        let r2 = qtg_cycles(&inst, 2, &model).unwrap();
        assert!(r2.c_total > r.c_total);
    }

    #[test]
    fn default_model_single_bit_capacity() {
        let inst = KnapsackInstance::new("c1", vec![1, 1], vec![1, 1], 1).unwrap();
        assert_eq!(LayeredToffoliAdderModel.qtg_cycles(&inst), 2 * (1 + 3));
    }

    #[test]
    fn csv_rows() {
        let reports = vec![copula_cycles(10, 5).unwrap(), qtg_cycles(&tiny_i1(), 1, &LayeredToffoliAdderModel).unwrap()];
        let mut buf = Vec::new();
        write_cycles_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "variant,n,c,q,c_SP,c_P,c_M,c_total");
        assert_eq!(lines[1], "copula,10,,5,1,1,14,76");
        assert!(lines[2].starts_with("qtg,3,3,1,24,1,"));
    }
}
