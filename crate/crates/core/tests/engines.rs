//! Restricted feasible-subspace engine against a full `2^n` reference.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use qtg_qaoa::knapsack::{generate_random_instance, very_greedy, Bitstring, KnapsackInstance};
use qtg_qaoa::qaoa::{CircuitConfig, Engine, QaoaAngles, QaoaProblem, StateVector};
use qtg_qaoa::qtg::{build_superposition, BiasConfig, FeasibleSuperposition};

/// Embeds a restricted state into the full basis.
fn embed(sup: &FeasibleSuperposition, state: &StateVector) -> Vec<Complex64> {
    let n = sup.instance().n();
    let mut full = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (e, a) in sup.entries().iter().zip(state.amplitudes()) {
        full[e.bits.value() as usize] = *a;
    }
    full
}

/// Full-basis reference layer: diagonal phase, then the rank-one mixer.
fn reference_layer(inst: &KnapsackInstance, kp: &[Complex64], psi: &mut [Complex64], gamma: f64, beta: f64) {
    let n = inst.n();
    for (v, a) in psi.iter_mut().enumerate() {
        let f = inst.objective_value(&Bitstring::from_value(n, v as u64)).unwrap();
        *a *= Complex64::cis(-gamma * f as f64);
    }
    let overlap: Complex64 = kp.iter().zip(psi.iter()).map(|(k, a)| k.conj() * a).sum();
    let coeff = (Complex64::new(1.0, 0.0) - Complex64::cis(-beta)) * overlap;
    for (a, k) in psi.iter_mut().zip(kp) {
        *a -= coeff * k;
    }
}

fn reference_expectation(inst: &KnapsackInstance, psi: &[Complex64]) -> f64 {
    let n = inst.n();
    psi.iter()
        .enumerate()
        .map(|(v, a)| {
            let x = Bitstring::from_value(n, v as u64);
            if inst.is_feasible(&x).unwrap() {
                a.norm_sqr() * inst.objective_value(&x).unwrap() as f64
            } else {
                0.0
            }
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restricted_matches_full_reference(
        n in 1usize..=10,
        ratio in 0.2f64..0.9,
        seed in any::<u64>(),
        angles in prop::collection::vec((0.0f64..TAU, 0.0f64..TAU), 1..4),
    ) {
        let inst = generate_random_instance(n, 25, 25, ratio, seed).unwrap();
        let sup = Arc::new(build_superposition(&inst, &BiasConfig::Uniform).unwrap());
        let problem = QaoaProblem::new(Engine::Qtg, &inst, &CircuitConfig::default()).unwrap();
        let (gammas, betas): (Vec<f64>, Vec<f64>) = angles.iter().copied().unzip();
        let state = problem.evolve(&QaoaAngles::new(gammas, betas).unwrap()).unwrap();

        let kp = embed(&sup, &StateVector::from_superposition(sup.clone()));
        let mut psi = kp.clone();
        for &(g, b) in &angles {
            reference_layer(&inst, &kp, &mut psi, g, b);
        }
        let got = embed(&sup, &state);
        let diff = got.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-10, "amplitudes differ by {}", diff);
        // no leakage out of the feasible subspace in the reference either
        for (v, a) in psi.iter().enumerate() {
            if !inst.is_feasible(&Bitstring::from_value(n, v as u64)).unwrap() {
                prop_assert!(a.norm() < 1e-12);
            }
        }
        let f = reference_expectation(&inst, &psi);
        prop_assert!((state.expectation() - f).abs() < 1e-9 * (1.0 + f));
    }

    #[test]
    fn copula_phase_separator_is_diagonal(n in 2usize..=8, seed in any::<u64>(), gamma in 0.0f64..TAU) {
        let inst = generate_random_instance(n, 20, 20, 0.5, seed).unwrap();
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
        let mut s = StateVector::full(&inst, amps.clone()).unwrap();
        s.apply_phase_separator(gamma);
        for (v, (got, a)) in s.amplitudes().iter().zip(&amps).enumerate() {
            let f = inst.objective_value(&Bitstring::from_value(n, v as u64)).unwrap();
            prop_assert!((got - a * Complex64::cis(-gamma * f as f64)).norm() < 1e-12);
        }
    }
}

#[test]
fn full_engine_expectation_zeroes_infeasible() {
    let inst = KnapsackInstance::new("I1", vec![4, 2, 1], vec![3, 2, 1], 3).unwrap();
    // uniform over all 8 packings: feasible profits 0,1,2,3,4 (000,001,010,011,100)
    let amps = vec![Complex64::new(1.0 / 8f64.sqrt(), 0.0); 8];
    let s = StateVector::full(&inst, amps).unwrap();
    assert!((s.expectation() - 10.0 / 8.0).abs() < 1e-12);
    // VG = 4 is optimal, nothing beats it
    assert_eq!(s.probability_beat_threshold(very_greedy(&inst).total_profit as i64), 0.0);
    assert!((s.probability_beat_threshold(2) - 2.0 / 8.0).abs() < 1e-12);
}

#[test]
fn sampled_expectation_tracks_exact() {
    let inst = generate_random_instance(8, 30, 30, 0.5, 5).unwrap();
    for engine in [Engine::Qtg, Engine::Copula] {
        let problem = QaoaProblem::new(engine, &inst, &CircuitConfig::default()).unwrap();
        let state = problem.evolve(&QaoaAngles::new(vec![0.02], vec![1.1]).unwrap()).unwrap();
        let exact = state.expectation();
        let sampled = state.sampled_expectation(&inst, 20_000, 3).unwrap();
        assert!((sampled - exact).abs() < 0.05 * exact.max(1.0), "{engine}: {sampled} vs {exact}");
        assert_eq!(sampled, state.sampled_expectation(&inst, 20_000, 3).unwrap());
    }
}

#[test]
fn engines_agree_on_shared_quantities() {
    let inst = generate_random_instance(9, 40, 40, 0.4, 17).unwrap();
    let qtg = QaoaProblem::new(Engine::Qtg, &inst, &CircuitConfig::default()).unwrap();
    let cop = QaoaProblem::new(Engine::Copula, &inst, &CircuitConfig::default()).unwrap();
    assert!(qtg.initial_state().is_restricted());
    assert!(!cop.initial_state().is_restricted());
    assert_eq!(cop.initial_state().len(), 1 << 9);
    let x = very_greedy(&inst).selection;
    let kp = qtg.initial_state();
    let f = inst.objective_value(&x).unwrap() as f64;
    // a basis state's expectation is its profit in both bases
    let sup = match kp.kind() {
        qtg_qaoa::qaoa::StateKind::Restricted(s) => s.clone(),
        _ => unreachable!(),
    };
    let r = StateVector::restricted_basis(sup, &x).unwrap();
    let full = StateVector::full_basis(&inst, &x).unwrap();
    assert_eq!(r.expectation(), f);
    assert_eq!(full.expectation(), f);
}
