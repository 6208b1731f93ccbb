//! Ground-state observables: fidelity and its susceptibility, reduced density
//! matrices, entropies and two-particle correlations.

mod density;
mod discord;
mod fidelity;

pub use density::{
    rho1, rho1_from_amplitudes, rho2, rho2_from_amplitudes, von_neumann_entropy, CLAMP_WINDOW,
};
pub use discord::{
    classical_and_discord, conditional_entropy, correlations, measurement_projectors,
    CorrelationSet, DiscordOptions, MeasurementBasis, MIN_BRANCH_PROBABILITY,
};
pub use fidelity::{
    chi_finite_difference, chi_perturbative, default_delta_lambda, fidelity, ChiDenominator,
    ChiResult, CHI_RELATIVE_AGREEMENT, MAX_STEP_HALVINGS,
};
