use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::knapsack::{lazy_greedy, KnapsackInstance};
use crate::qaoa::copula::{copula_probabilities, prepare_copula_initial_state, CopulaMixer};
use crate::qaoa::state::StateVector;
use crate::qtg::{build_superposition, BiasConfig, FeasibleSuperposition};

/// Default logistic steepness of the copula warm start.
pub const DEFAULT_COPULA_K: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    /// `|KP>` start, QTG rank-one mixer, restricted to the feasible subspace.
    Qtg,
    /// Logistic product start, ring-copula mixer, full `2^n` space.
    Copula,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Qtg => "qtg",
            Engine::Copula => "copula",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qtg" => Ok(Engine::Qtg),
            "copula" => Ok(Engine::Copula),
            other => Err(Error::invalid(format!("unknown engine {other:?}"))),
        }
    }
}

/// Depth-`q` angle schedule; angles are stored reduced to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaAngles {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

pub(crate) fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl QaoaAngles {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::invalid(format!(
                "{} gammas but {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        if gammas.iter().chain(&betas).any(|x| !x.is_finite()) {
            return Err(Error::invalid("angles must be finite"));
        }
        Ok(Self {
            gammas: gammas.into_iter().map(wrap_angle).collect(),
            betas: betas.into_iter().map(wrap_angle).collect(),
        })
    }

    pub fn zeros(q: usize) -> Self {
        Self {
            gammas: vec![0.0; q],
            betas: vec![0.0; q],
        }
    }

    /// From an interleaved `[γ_1, β_1, γ_2, β_2, ...]` vector.
    pub fn from_interleaved(params: &[f64]) -> Result<Self> {
        if params.len() % 2 != 0 {
            return Err(Error::invalid("interleaved angle vector has odd length"));
        }
        let gammas = params.iter().step_by(2).copied().collect();
        let betas = params.iter().skip(1).step_by(2).copied().collect();
        Self::new(gammas, betas)
    }

    pub fn interleaved(&self) -> Vec<f64> {
        self.layers().flat_map(|(g, b)| [g, b]).collect()
    }

    pub fn q(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// `(γ_j, β_j)` for `j = 1..q`.
    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.gammas.iter().copied().zip(self.betas.iter().copied())
    }
}

#[derive(Debug, Clone)]
pub struct CircuitConfig {
    pub bias: BiasConfig,
    pub copula_k: f64,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        Self {
            bias: BiasConfig::Uniform,
            copula_k: DEFAULT_COPULA_K,
        }
    }
}

/// An engine bound to an instance: initial state plus mixer data, ready to
/// evaluate angle schedules.
#[derive(Debug, Clone)]
pub struct QaoaProblem {
    engine: Engine,
    instance: KnapsackInstance,
    initial: StateVector,
    copula: Option<CopulaMixer>,
}

impl QaoaProblem {
    pub fn new(engine: Engine, inst: &KnapsackInstance, cfg: &CircuitConfig) -> Result<Self> {
        let (initial, copula) = match engine {
            Engine::Qtg => {
                let sup = build_superposition(inst, &cfg.bias)?;
                check_mixer_criteria(&sup)?;
                (StateVector::from_superposition(Arc::new(sup)), None)
            }
            Engine::Copula => {
                let probs = copula_probabilities(inst, &lazy_greedy(inst), cfg.copula_k)?;
                let mixer = CopulaMixer::new(&probs)?;
                (prepare_copula_initial_state(inst, &probs)?, Some(mixer))
            }
        };
        Ok(Self {
            engine,
            instance: inst.clone(),
            initial,
            copula,
        })
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn instance(&self) -> &KnapsackInstance {
        &self.instance
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial
    }

    pub fn apply_mixer(&self, state: &mut StateVector, beta: f64) -> Result<()> {
        match &self.copula {
            None => state.apply_qtg_mixer(beta),
            Some(mixer) => mixer.apply(state, beta),
        }
    }

    /// Phase separator followed by mixer.
    pub fn apply_layer(&self, state: &mut StateVector, gamma: f64, beta: f64) -> Result<()> {
        state.apply_phase_separator(gamma);
        self.apply_mixer(state, beta)
    }

    pub fn evolve(&self, angles: &QaoaAngles) -> Result<StateVector> {
        let mut state = self.initial.clone();
        for (g, b) in angles.layers() {
            self.apply_layer(&mut state, g, b)?;
        }
        Ok(state)
    }

    /// Exact `F(β, γ)`.
    pub fn expectation(&self, angles: &QaoaAngles) -> Result<f64> {
        Ok(self.evolve(angles)?.expectation())
    }
}

/// Premises for the projector mixer: `|KP>` is supported exactly on the
/// feasible set (structural here) with strictly positive amplitudes.
fn check_mixer_criteria(sup: &FeasibleSuperposition) -> Result<()> {
    if sup.is_empty() || sup.min_amplitude() <= 0.0 {
        return Err(Error::InvalidState(
            "tree generator state has a non-positive amplitude on a feasible packing".into(),
        ));
    }
    Ok(())
}

/// Builds the engine for `inst` and evolves the initial state through
/// `angles`.
pub fn run_circuit(
    engine: Engine,
    inst: &KnapsackInstance,
    angles: &QaoaAngles,
    cfg: &CircuitConfig,
) -> Result<StateVector> {
    QaoaProblem::new(engine, inst, cfg)?.evolve(angles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_i1() -> KnapsackInstance {
        KnapsackInstance::new("I1", vec![4, 2, 1], vec![3, 2, 1], 3).unwrap()
    }

    #[test]
    fn angles_are_wrapped_and_checked() {
        let a = QaoaAngles::new(vec![-0.5, TAU + 1.0], vec![TAU, 3.0]).unwrap();
        assert!((a.gammas()[0] - (TAU - 0.5)).abs() < 1e-12);
        assert!((a.gammas()[1] - 1.0).abs() < 1e-12);
        assert_eq!(a.betas()[0], 0.0);
        assert_eq!(a.q(), 2);
        assert!(QaoaAngles::new(vec![0.0], vec![]).is_err());
        assert!(QaoaAngles::new(vec![f64::NAN], vec![0.0]).is_err());
        assert_eq!(wrap_angle(-1e-300), 0.0);
        let i = QaoaAngles::from_interleaved(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(i.gammas(), &[0.1, 0.3]);
        assert_eq!(i.interleaved(), vec![0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn engine_names() {
        assert_eq!("QTG".parse::<Engine>().unwrap(), Engine::Qtg);
        assert_eq!(Engine::Copula.to_string(), "copula");
        assert!("grover".parse::<Engine>().is_err());
    }

    #[test]
    fn depth_zero_is_kp() {
        let s = run_circuit(Engine::Qtg, &tiny_i1(), &QaoaAngles::zeros(0), &CircuitConfig::default()).unwrap();
        assert!((s.expectation() - 2.75).abs() < 1e-12);
        let s1 = run_circuit(Engine::Qtg, &tiny_i1(), &QaoaAngles::zeros(1), &CircuitConfig::default()).unwrap();
        assert_eq!(s.amplitudes(), s1.amplitudes());
    }

    #[test]
    fn copula_zero_angles_keep_initial_state() {
        let cfg = CircuitConfig::default();
        let p = QaoaProblem::new(Engine::Copula, &tiny_i1(), &cfg).unwrap();
        let s = p.evolve(&QaoaAngles::zeros(1)).unwrap();
        for (a, b) in s.amplitudes().iter().zip(p.initial_state().amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn deterministic_expectation() {
        let angles = QaoaAngles::new(vec![0.3], vec![1.1]).unwrap();
        let cfg = CircuitConfig::default();
        let a = run_circuit(Engine::Qtg, &tiny_i1(), &angles, &cfg).unwrap().expectation();
        let b = run_circuit(Engine::Qtg, &tiny_i1(), &angles, &cfg).unwrap().expectation();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn copula_rejects_degenerate_instance() {
        let all_fit = KnapsackInstance::new("f", vec![1, 2], vec![1, 1], 5).unwrap();
        assert!(matches!(
            QaoaProblem::new(Engine::Copula, &all_fit, &CircuitConfig::default()),
            Err(Error::DegenerateInstance(_))
        ));
        // the QTG engine has no such restriction
        assert!(QaoaProblem::new(Engine::Qtg, &all_fit, &CircuitConfig::default()).is_ok());
    }
}
