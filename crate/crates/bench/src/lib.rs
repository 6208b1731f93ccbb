//! Shared fixtures for the benchmarks.

use dwlab_core::fock::{ground_state, GroundState, ModelParams};

/// Parameters at the double-peak region of the symmetric well.
pub fn near_transition(n: usize) -> ModelParams {
    ModelParams::new(n, 2.1, 1e-10).expect("valid parameters")
}

pub fn ground(n: usize) -> GroundState {
    ground_state(&near_transition(n)).expect("ground state")
}
