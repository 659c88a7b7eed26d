//! Copula warm start and ring-copula mixer for the full `2^n` engine.
//!
//! Each two-qubit mixer is `R · RZ_m(2β) RZ_m'(2β) · R†` where the rotation
//! `R(p_m, p_m')` prepares an anti-correlated two-item distribution:
//!
//! ```text
//! R = anti-C_m RY_m'(2 asin √p_{m'|¬m}) · C_m RY_m'(2 asin √p_{m'|m}) · RY_m(2 asin √p_m)
//! ```
//!
//! The gate sequence is simulated on a 4-dimensional register to obtain the
//! fused 4×4 unitary, which is then swept over the full state vector.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::knapsack::{Bitstring, GreedyResult, KnapsackInstance};
use crate::qaoa::state::{StateKind, StateVector};

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Logistic warm-start probabilities
/// `p_m = 1 / (1 + W e^{-k (r_m - r_stop)})`, `W = Σ w_m / c - 1`.
pub fn copula_probabilities(inst: &KnapsackInstance, greedy: &GreedyResult, k: f64) -> Result<Vec<f64>> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!("logistic steepness must be positive, got {k}")));
    }
    let r_stop = greedy.r_stop.ok_or_else(|| {
        Error::DegenerateInstance("every item fits, so r_stop and the logistic warm start are undefined".into())
    })?;
    if inst.total_weight() <= inst.capacity() {
        return Err(Error::DegenerateInstance(
            "total weight does not exceed capacity (W <= 0)".into(),
        ));
    }
    let w_ratio = inst.total_weight() as f64 / inst.capacity() as f64 - 1.0;
    let r_stop = r_stop.as_f64();
    Ok((0..inst.n())
        .map(|m| 1.0 / (1.0 + w_ratio * (-k * (inst.quality(m).as_f64() - r_stop)).exp()))
        .collect())
}

/// Anti-correlating conditionals `(p_{m'|m}, p_{m'|¬m})`.
pub fn conditional_probabilities(p_m: f64, p_mp: f64) -> (f64, f64) {
    let given = p_mp * (1.0 - (1.0 - p_m) * (1.0 - p_mp));
    let given_not = p_mp * (1.0 + p_m * (1.0 - p_mp));
    (given, given_not)
}

/// Product state `⊗ (√(1-p_m)|0> + √p_m|1>)` in the full basis.
pub fn prepare_copula_initial_state(inst: &KnapsackInstance, probs: &[f64]) -> Result<StateVector> {
    let n = inst.n();
    if probs.len() != n {
        return Err(Error::invalid(format!("{} probabilities for {n} items", probs.len())));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    if n > super::state::FULL_ENGINE_MAX_ITEMS {
        return Err(Error::ResourceLimit(format!("full state over 2^{n} amplitudes")));
    }
    // grow the product one item at a time; item 0 ends up most significant
    let mut amps = vec![ONE];
    for &p in probs {
        let (off, on) = ((1.0 - p).sqrt(), p.sqrt());
        amps = amps
            .iter()
            .flat_map(|&a| [a * off, a * on])
            .collect();
    }
    StateVector::full(inst, amps)
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub fn rz(theta: f64) -> Mat2 {
    [
        [Complex64::cis(-theta / 2.0), ZERO],
        [ZERO, Complex64::cis(theta / 2.0)],
    ]
}

/// `2 asin √p`, the RY angle that loads probability `p` onto `|1>`.
fn loading_angle(p: f64) -> f64 {
    2.0 * p.clamp(0.0, 1.0).sqrt().asin()
}

/// Applies `gate` to `target`, optionally only where `control` reads `value`.
fn apply_gate(amps: &mut [Complex64], n: usize, target: usize, control: Option<(usize, bool)>, gate: &Mat2) {
    let t = Bitstring::item_mask(n, target) as usize;
    for i0 in 0..amps.len() {
        if i0 & t != 0 {
            continue;
        }
        if let Some((c, value)) = control {
            let c_mask = Bitstring::item_mask(n, c) as usize;
            if (i0 & c_mask != 0) != value {
                continue;
            }
        }
        let i1 = i0 | t;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = gate[0][0] * a0 + gate[0][1] * a1;
        amps[i1] = gate[1][0] * a0 + gate[1][1] * a1;
    }
}

/// One gate of a two-qubit sequence; qubit 0 plays role `m`, qubit 1 role `m'`.
#[derive(Debug, Clone, Copy)]
enum PairGate {
    Single(usize, f64),
    Controlled { on: bool, theta: f64 },
}

fn rotation_sequence(p_m: f64, p_mp: f64) -> [PairGate; 3] {
    let (given, given_not) = conditional_probabilities(p_m, p_mp);
    [
        PairGate::Single(0, loading_angle(p_m)),
        PairGate::Controlled { on: true, theta: loading_angle(given) },
        PairGate::Controlled { on: false, theta: loading_angle(given_not) },
    ]
}

fn run_pair_gate(amps: &mut [Complex64], gate: PairGate, inverse: bool) {
    let sign = if inverse { -1.0 } else { 1.0 };
    match gate {
        PairGate::Single(q, theta) => apply_gate(amps, 2, q, None, &ry(sign * theta)),
        PairGate::Controlled { on, theta } => apply_gate(amps, 2, 1, Some((0, on)), &ry(sign * theta)),
    }
}

/// Fused 4×4 of the gate sequence, local basis index `2·x_m + x_m'`.
fn sequence_matrix(p_m: f64, p_mp: f64, beta: f64) -> Mat4 {
    let gates = rotation_sequence(p_m, p_mp);
    let mut out = [[ZERO; 4]; 4];
    for col in 0..4 {
        let mut v = [ZERO; 4];
        v[col] = ONE;
        // R† = reversed gates with negated angles (RY(θ)† = RY(-θ))
        for &g in gates.iter().rev() {
            run_pair_gate(&mut v, g, true);
        }
        apply_gate(&mut v, 2, 0, None, &rz(2.0 * beta));
        apply_gate(&mut v, 2, 1, None, &rz(2.0 * beta));
        for &g in &gates {
            run_pair_gate(&mut v, g, false);
        }
        for row in 0..4 {
            out[row][col] = v[row];
        }
    }
    out
}

/// Two-qubit copula rotation `R(p_m, p_m')` as a 4×4 matrix.
pub fn copula_rotation(p_m: f64, p_mp: f64) -> Mat4 {
    let gates = rotation_sequence(p_m, p_mp);
    let mut out = [[ZERO; 4]; 4];
    for col in 0..4 {
        let mut v = [ZERO; 4];
        v[col] = ONE;
        for &g in &gates {
            run_pair_gate(&mut v, g, false);
        }
        for row in 0..4 {
            out[row][col] = v[row];
        }
    }
    out
}

/// Sweeps a two-qubit unitary over a full state; `m` is the high local bit.
pub(crate) fn apply_two_qubit(amps: &mut [Complex64], n: usize, m: usize, mp: usize, u: &Mat4) {
    sweep_quads(amps, n, m, mp, |v| {
        let x = *v;
        for (out, row) in v.iter_mut().zip(u) {
            *out = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
        }
    });
}

/// Calls `f` on every local 4-vector `(|00>, |01>, |10>, |11>)` of items
/// `(m, mp)` and writes the result back.
#[inline]
fn sweep_quads(amps: &mut [Complex64], n: usize, m: usize, mp: usize, mut f: impl FnMut(&mut [Complex64; 4])) {
    let hi = Bitstring::item_mask(n, m) as usize;
    let lo = Bitstring::item_mask(n, mp) as usize;
    let (low_pos, high_pos) = {
        let (a, b) = (hi.trailing_zeros(), lo.trailing_zeros());
        (a.min(b), a.max(b))
    };
    let quads = amps.len() >> 2;
    for k in 0..quads {
        // insert zero bits at both qubit positions
        let below = k & ((1 << low_pos) - 1);
        let rest = k >> low_pos;
        let mid = rest & ((1 << (high_pos - low_pos - 1)) - 1);
        let top = rest >> (high_pos - low_pos - 1);
        let base = below | (mid << (low_pos + 1)) | (top << (high_pos + 1));
        let idx = [base, base | lo, base | hi, base | hi | lo];
        let mut v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        f(&mut v);
        for (&i, x) in idx.iter().zip(v) {
            amps[i] = x;
        }
    }
}

fn full_dims(state: &StateVector) -> Result<usize> {
    match state.kind() {
        StateKind::Full { n } => Ok(*n),
        StateKind::Restricted(_) => Err(Error::InvalidState(
            "copula mixers act on full-basis states only".into(),
        )),
    }
}

/// `U^Cop_{m,m'}(β) = R RZ_m(2β) RZ_m'(2β) R†` on items `(m, m')`.
pub fn apply_two_qubit_copula_mixer(
    state: &mut StateVector,
    m: usize,
    mp: usize,
    p_m: f64,
    p_mp: f64,
    beta: f64,
) -> Result<()> {
    let n = full_dims(state)?;
    if m == mp {
        return Err(Error::invalid("copula mixer needs two distinct items"));
    }
    if m >= n || mp >= n {
        return Err(Error::invalid(format!("item index out of range for {n} items")));
    }
    let u = sequence_matrix(p_m, p_mp, beta);
    apply_two_qubit(state.amplitudes_mut(), n, m, mp, &u);
    Ok(())
}

/// Ring of two-qubit copula mixers over pairs `(m, m+1 mod n)`, ascending `m`.
pub fn apply_ring_copula_mixer(state: &mut StateVector, probs: &[f64], beta: f64) -> Result<()> {
    CopulaMixer::new(probs)?.apply(state, beta)
}

/// Ring-copula mixer with the β-independent rotations precomputed.
#[derive(Debug, Clone)]
pub struct CopulaMixer {
    probs: Vec<f64>,
    /// `(m, m', r0, r3)`: columns 0 and 3 of the real rotation `R`.
    pairs: Vec<(usize, usize, [f64; 4], [f64; 4])>,
}

impl CopulaMixer {
    pub fn new(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        if n < 2 {
            return Err(Error::invalid("ring copula mixer needs at least two items"));
        }
        let pairs = (0..n)
            .map(|m| {
                let mp = (m + 1) % n;
                let r = copula_rotation(probs[m], probs[mp]);
                let col = |c: usize| [r[0][c].re, r[1][c].re, r[2][c].re, r[3][c].re];
                (m, mp, col(0), col(3))
            })
            .collect();
        Ok(Self {
            probs: probs.to_vec(),
            pairs,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn apply(&self, state: &mut StateVector, beta: f64) -> Result<()> {
        let n = full_dims(state)?;
        if n != self.probs.len() {
            return Err(Error::invalid(format!(
                "mixer built for {} items, state has {n}",
                self.probs.len()
            )));
        }
        // RZ_m(2β) RZ_m'(2β) = diag(e², 1, 1, ē²) in the local basis, and R is
        // real orthogonal, so R D Rᵀ = I + (e² - 1) r0 r0ᵀ + (ē² - 1) r3 r3ᵀ
        let e2 = Complex64::cis(-2.0 * beta);
        let (c0, c3) = (e2 - ONE, e2.conj() - ONE);
        for (m, mp, r0, r3) in &self.pairs {
            sweep_quads(state.amplitudes_mut(), n, *m, *mp, |v| {
                let dot = |r: &[f64; 4]| v[0] * r[0] + v[1] * r[1] + v[2] * r[2] + v[3] * r[3];
                let (s0, s3) = (dot(r0) * c0, dot(r3) * c3);
                for k in 0..4 {
                    v[k] += s0 * r0[k] + s3 * r3[k];
                }
            });
        }
        Ok(())
    }
}
