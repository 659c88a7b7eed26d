use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knapsack::{Bitstring, KnapsackInstance};
use crate::qtg::FeasibleSuperposition;

/// Largest item count the full `2^n` engine will allocate for.
pub const FULL_ENGINE_MAX_ITEMS: usize = 30;

/// Which basis the amplitudes live in.
#[derive(Debug, Clone)]
pub enum StateKind {
    /// Indexed by the feasible packings of the superposition, in its order.
    Restricted(Arc<FeasibleSuperposition>),
    /// Indexed by all `2^n` packings; index = packed bitstring value.
    Full { n: usize },
}

/// Per-basis-state objective data shared between clones of a state.
#[derive(Debug)]
struct Caches {
    objective: Vec<u64>,
    /// `g(x)`; `None` means every basis state is feasible.
    feasible: Option<Vec<bool>>,
    max_objective: u64,
}

/// Complex amplitudes plus aligned objective (and, for the full engine,
/// feasibility) caches.
#[derive(Debug, Clone)]
pub struct StateVector {
    kind: StateKind,
    amps: Vec<Complex64>,
    caches: Arc<Caches>,
}

impl StateVector {
    /// `|KP>` itself, in the restricted basis.
    pub fn from_superposition(sup: Arc<FeasibleSuperposition>) -> Self {
        let amps = sup
            .entries()
            .iter()
            .map(|e| Complex64::new(e.amplitude, 0.0))
            .collect();
        let objective: Vec<u64> = sup.entries().iter().map(|e| e.profit).collect();
        let max_objective = objective.iter().copied().max().unwrap_or(0);
        Self {
            kind: StateKind::Restricted(sup),
            amps,
            caches: Arc::new(Caches {
                objective,
                feasible: None,
                max_objective,
            }),
        }
    }

    /// Full-basis state with the given amplitudes (length `2^n`).
    pub fn full(inst: &KnapsackInstance, amps: Vec<Complex64>) -> Result<Self> {
        let n = inst.n();
        if n > FULL_ENGINE_MAX_ITEMS {
            return Err(Error::ResourceLimit(format!(
                "full state vector over 2^{n} amplitudes exceeds the 2^{FULL_ENGINE_MAX_ITEMS} limit"
            )));
        }
        if amps.len() != 1usize << n {
            return Err(Error::invalid(format!(
                "expected {} amplitudes, got {}",
                1usize << n,
                amps.len()
            )));
        }
        Ok(Self {
            kind: StateKind::Full { n },
            amps,
            caches: Arc::new(full_caches(inst)),
        })
    }

    /// Computational basis state `|x>` in the full basis.
    pub fn full_basis(inst: &KnapsackInstance, x: &Bitstring) -> Result<Self> {
        if x.len() != inst.n() || inst.n() > FULL_ENGINE_MAX_ITEMS {
            return Err(Error::invalid("basis state does not match instance"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << inst.n()];
        amps[x.value() as usize] = Complex64::new(1.0, 0.0);
        Self::full(inst, amps)
    }

    /// Restricted-basis state with the given amplitudes, one per entry of `sup`.
    pub fn restricted(sup: Arc<FeasibleSuperposition>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != sup.len() {
            return Err(Error::invalid(format!(
                "expected {} amplitudes, got {}",
                sup.len(),
                amps.len()
            )));
        }
        let mut state = Self::from_superposition(sup);
        state.amps = amps;
        Ok(state)
    }

    /// Computational basis state `|x>` in the restricted basis of `sup`.
    pub fn restricted_basis(sup: Arc<FeasibleSuperposition>, x: &Bitstring) -> Result<Self> {
        let pos = sup
            .position(x)
            .ok_or_else(|| Error::invalid(format!("{x} is not in the feasible subspace")))?;
        let mut state = Self::from_superposition(sup);
        state.amps.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        state.amps[pos] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn is_restricted(&self) -> bool {
        matches!(self.kind, StateKind::Restricted(_))
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            StateKind::Restricted(sup) => sup.instance().n(),
            StateKind::Full { n } => *n,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn objective(&self) -> &[u64] {
        &self.caches.objective
    }

    #[inline]
    pub fn is_feasible_index(&self, index: usize) -> bool {
        self.caches.feasible.as_ref().is_none_or(|g| g[index])
    }

    /// Packing represented by amplitude slot `index`.
    pub fn bits_at(&self, index: usize) -> Bitstring {
        match &self.kind {
            StateKind::Restricted(sup) => sup.entries()[index].bits,
            StateKind::Full { n } => Bitstring::from_value(*n, index as u64),
        }
    }

    /// Amplitude of packing `x` (zero outside the represented basis).
    pub fn amplitude(&self, x: &Bitstring) -> Result<Complex64> {
        if x.len() != self.n() {
            return Err(Error::invalid("bitstring length does not match state"));
        }
        Ok(match &self.kind {
            StateKind::Restricted(sup) => sup
                .position(x)
                .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i]),
            StateKind::Full { .. } => self.amps[x.value() as usize],
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `amp[x] <- amp[x] · e^{-iγ f(x)}` with the raw objective for every
    /// basis state, feasible or not.
    pub fn apply_phase_separator(&mut self, gamma: f64) {
        let caches = &self.caches;
        let table_len = caches.max_objective as usize + 1;
        if caches.max_objective < u32::MAX as u64 && table_len <= 4 * self.amps.len() + 1024 {
            // integer objectives: one cis per distinct value
            let table: Vec<Complex64> = (0..table_len)
                .map(|f| Complex64::cis(-gamma * f as f64))
                .collect();
            for (a, &f) in self.amps.iter_mut().zip(&caches.objective) {
                *a *= table[f as usize];
            }
        } else {
            for (a, &f) in self.amps.iter_mut().zip(&caches.objective) {
                *a *= Complex64::cis(-gamma * f as f64);
            }
        }
    }

    /// Rank-one reflection `|ψ> - (1 - e^{-iβ}) <KP|ψ> |KP>`.
    pub fn apply_qtg_mixer(&mut self, beta: f64) -> Result<()> {
        let StateKind::Restricted(sup) = &self.kind else {
            return Err(Error::InvalidState(
                "the QTG mixer acts on restricted (feasible-subspace) states only".into(),
            ));
        };
        let entries = sup.entries();
        let overlap: Complex64 = entries
            .iter()
            .zip(&self.amps)
            .map(|(e, a)| a * e.amplitude)
            .sum();
        let coeff = (Complex64::new(1.0, 0.0) - Complex64::cis(-beta)) * overlap;
        for (a, e) in self.amps.iter_mut().zip(entries) {
            *a -= coeff * e.amplitude;
        }
        Ok(())
    }

    /// `Σ_x |ψ_x|² f(x) g(x)`.
    pub fn expectation(&self) -> f64 {
        let objective = &self.caches.objective;
        match &self.caches.feasible {
            None => self
                .amps
                .iter()
                .zip(objective)
                .fold(0.0, |acc, (a, &f)| acc + a.norm_sqr() * f as f64),
            Some(g) => self
                .amps
                .iter()
                .zip(objective)
                .zip(g)
                .filter(|(_, &ok)| ok)
                .fold(0.0, |acc, ((a, &f), _)| acc + a.norm_sqr() * f as f64),
        }
    }

    /// Probability of measuring a feasible packing with `f(x) > threshold`.
    pub fn probability_beat_threshold(&self, threshold: i64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.is_feasible_index(i) && self.caches.objective[i] as i128 > threshold as i128)
            // fold from +0.0: an empty f64 sum is -0.0
            .fold(0.0, |acc, (_, a)| acc + a.norm_sqr())
    }

    /// I.i.d. measurement outcomes drawn from `|ψ_x|²`.
    pub fn sample_bitstrings(&self, count: usize, seed: u64) -> Result<Vec<Bitstring>> {
        if count == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        let weights = self.amps.iter().map(|a| a.norm_sqr());
        let dist = WeightedIndex::new(weights)
            .map_err(|e| Error::InvalidState(format!("cannot sample from state: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..count).map(|_| self.bits_at(dist.sample(&mut rng))).collect())
    }

    /// Shot-based estimate of [`expectation`](Self::expectation): mean of
    /// `f·g` over `shots` samples.
    pub fn sampled_expectation(&self, inst: &KnapsackInstance, shots: usize, seed: u64) -> Result<f64> {
        let samples = self.sample_bitstrings(shots, seed)?;
        let mut total = 0.0;
        for x in &samples {
            if inst.is_feasible(x)? {
                total += inst.objective_value(x)? as f64;
            }
        }
        Ok(total / shots as f64)
    }

    /// Debug dump: `index,re,im,f,g`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "re", "im", "f", "g"])?;
        for (i, a) in self.amps.iter().enumerate() {
            w.write_record([
                self.bits_at(i).value().to_string(),
                format!("{:.17e}", a.re),
                format!("{:.17e}", a.im),
                self.caches.objective[i].to_string(),
                u8::from(self.is_feasible_index(i)).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn full_caches(inst: &KnapsackInstance) -> Caches {
    let n = inst.n();
    let size = 1usize << n;
    let mut objective = vec![0u64; size];
    let mut weight = vec![0u64; size];
    // peel the lowest set bit: f(x) = f(x without bit) + v(bit)
    for x in 1..size {
        let low = x.trailing_zeros() as usize;
        let item = n - 1 - low;
        let rest = x & (x - 1);
        objective[x] = objective[rest] + inst.profits()[item];
        weight[x] = weight[rest] + inst.weights()[item];
    }
    let feasible = weight.iter().map(|&w| w <= inst.capacity()).collect();
    Caches {
        max_objective: inst.total_profit(),
        objective,
        feasible: Some(feasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtg::{build_superposition, BiasConfig};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn tiny_i1() -> KnapsackInstance {
        KnapsackInstance::new("I1", vec![4, 2, 1], vec![3, 2, 1], 3).unwrap()
    }

    fn kp() -> StateVector {
        let sup = build_superposition(&tiny_i1(), &BiasConfig::Uniform).unwrap();
        StateVector::from_superposition(Arc::new(sup))
    }

    fn bits(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn full_caches_match_direct_evaluation() {
        let inst = tiny_i1();
        let state = StateVector::full_basis(&inst, &bits("000")).unwrap();
        for i in 0..8 {
            let x = Bitstring::from_value(3, i as u64);
            assert_eq!(state.objective()[i], inst.objective_value(&x).unwrap());
            assert_eq!(state.is_feasible_index(i), inst.is_feasible(&x).unwrap());
        }
    }

    #[test]
    fn phase_separator_examples() {
        let mut s = kp();
        s.apply_phase_separator(0.0);
        assert_eq!(max_diff(&s, &kp()), 0.0);

        s.apply_phase_separator(2.0 * PI);
        assert!(max_diff(&s, &kp()) < 1e-9);

        let mut s = kp();
        s.apply_phase_separator(PI / 2.0);
        let a100 = s.amplitude(&bits("100")).unwrap();
        assert!((a100 - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        let a011 = s.amplitude(&bits("011")).unwrap();
        let base = 1.0 / (2.0 * 2f64.sqrt());
        assert!((a011 - Complex64::new(0.0, base)).norm() < 1e-12);
    }

    #[test]
    fn phase_table_matches_direct_cis() {
        // large profits force the direct branch
        let inst = KnapsackInstance::new("big", vec![1 << 40, 3], vec![1, 1], 2).unwrap();
        let mut s = StateVector::full(&inst, vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        s.apply_phase_separator(0.37);
        let want = Complex64::new(0.5, 0.0) * Complex64::cis(-0.37 * ((1u64 << 40) + 3) as f64);
        assert!((s.amplitudes()[3] - want).norm() < 1e-12);
    }

    #[test]
    fn qtg_mixer_examples() {
        let mut s = kp();
        s.apply_qtg_mixer(0.0).unwrap();
        assert!(max_diff(&s, &kp()) < 1e-15);

        let beta = 1.234;
        let mut s = kp();
        s.apply_qtg_mixer(beta).unwrap();
        let phase = Complex64::cis(-beta);
        for (a, b) in s.amplitudes().iter().zip(kp().amplitudes()) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn qtg_mixer_half_overlap() {
        // |ψ> = (|KP> + |⊥>)/√2 ·... built so that <KP|ψ> = 0.5 exactly
        let kp = kp();
        let sup = match kp.kind() {
            StateKind::Restricted(s) => s.clone(),
            _ => unreachable!(),
        };
        // |⊥> ∝ |100> - <KP|100>|KP>, orthogonal to |KP>
        let a100 = FRAC_1_SQRT_2;
        let e100 = StateVector::restricted_basis(sup.clone(), &bits("100")).unwrap();
        let perp: Vec<Complex64> = e100
            .amplitudes()
            .iter()
            .zip(kp.amplitudes())
            .map(|(e, k)| e - k * a100)
            .collect();
        let perp_norm = perp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let c = (1.0f64 - 0.25).sqrt();
        let mut psi = kp.clone();
        for ((p, k), q) in psi.amps.iter_mut().zip(kp.amplitudes()).zip(&perp) {
            *p = k * 0.5 + q * (c / perp_norm);
        }
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let want: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .zip(kp.amplitudes())
            .map(|(p, k)| p - k)
            .collect();
        psi.apply_qtg_mixer(PI).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qtg_mixer_rejects_full_state() {
        let mut s = StateVector::full_basis(&tiny_i1(), &bits("000")).unwrap();
        assert!(matches!(s.apply_qtg_mixer(0.3), Err(Error::InvalidState(_))));
    }

    #[test]
    fn expectation_examples() {
        assert!((kp().expectation() - 2.75).abs() < 1e-12);

        let sup = Arc::new(build_superposition(&tiny_i1(), &BiasConfig::Uniform).unwrap());
        let opt = StateVector::restricted_basis(sup, &bits("100")).unwrap();
        assert_eq!(opt.expectation(), 4.0);

        let inst = KnapsackInstance::new("t", vec![1, 1], vec![1, 1], 1).unwrap();
        let uniform = StateVector::full(&inst, vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        assert!((uniform.expectation() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn beat_threshold_examples() {
        let s = kp();
        assert_eq!(s.probability_beat_threshold(4), 0.0);
        assert!((s.probability_beat_threshold(-1) - 1.0).abs() < 1e-12);
        assert!((s.probability_beat_threshold(3) - 0.5).abs() < 1e-12);

        let inst = KnapsackInstance::new("t", vec![1, 1], vec![1, 1], 1).unwrap();
        let uniform = StateVector::full(&inst, vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        // |11> has f = 2 but is infeasible
        assert!((uniform.probability_beat_threshold(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sampling() {
        let inst = tiny_i1();
        let basis = StateVector::full_basis(&inst, &bits("010")).unwrap();
        assert!(basis
            .sample_bitstrings(50, 1)
            .unwrap()
            .iter()
            .all(|x| *x == bits("010")));
        let s = kp();
        assert_eq!(s.sample_bitstrings(100, 9).unwrap(), s.sample_bitstrings(100, 9).unwrap());
        assert!(s.sample_bitstrings(0, 1).is_err());

        let draws = s.sample_bitstrings(100_000, 2024).unwrap();
        let freq = draws.iter().filter(|x| **x == bits("100")).count() as f64 / 1e5;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");

        let est = s.sampled_expectation(&inst, 100_000, 5).unwrap();
        assert!((est - 2.75).abs() < 0.03, "estimate {est}");
    }

    #[test]
    fn csv_dump() {
        let s = StateVector::full_basis(&tiny_i1(), &bits("111")).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last = text.lines().last().unwrap();
        assert!(last.starts_with("7,1.00000000000000000e0,"));
        assert!(last.ends_with(",7,0"));
    }
}
