//! QAOA state engines.
//!
//! [`StateVector`] carries amplitudes over either the feasible subspace
//! (restricted engine) or all `2^n` packings (full engine). The phase
//! separator is the element-wise product with `e^{-iγ f(x)}`; the QTG mixer
//! is the rank-one update `|ψ> - (1 - e^{-iβ}) <KP|ψ> |KP>`; the copula mixer
//! sweeps fused two-qubit unitaries over the full vector.

mod circuit;
pub mod copula;
mod state;

pub use circuit::{run_circuit, CircuitConfig, Engine, QaoaAngles, QaoaProblem, DEFAULT_COPULA_K};
pub(crate) use circuit::wrap_angle;
pub use copula::{
    apply_ring_copula_mixer, apply_two_qubit_copula_mixer, conditional_probabilities, copula_probabilities,
    copula_rotation, prepare_copula_initial_state, CopulaMixer,
};
pub use state::{StateKind, StateVector, FULL_ENGINE_MAX_ITEMS};
