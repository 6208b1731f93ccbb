//! Ground-state physics of bosons in a tilted double well by exact
//! diagonalization of the two-mode Bose-Hubbard Hamiltonian.
//!
//! The crate is layered bottom-up: [`numerics`] holds the linear-algebra and
//! fitting kernels, [`fock`] the Hamiltonian and ground states,
//! [`semiclassical`] the mean-field limit, [`observables`] fidelity
//! susceptibility and correlations, and [`scaling`] the λ sweeps and
//! finite-size fits built on all of them.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod numerics;
pub mod observables;
pub mod scaling;
pub mod semiclassical;

pub use error::{Error, Result};
pub use fock::{
    build_hamiltonian, classify_phase, full_spectrum, ground_state, spectrum_weights, GroundState,
    ModelParams, Phase, PhaseLabel,
};
pub use numerics::{EigenPair, HermitianMatrix, LinearFit, TridiagonalMatrix};
pub use observables::{ChiResult, CorrelationSet, DiscordOptions, MeasurementBasis};
pub use scaling::{
    find_peaks, fit_position_exponent, fit_value_scaling, scan, PeakInfo, ScalingFit, ScanConfig,
    ScanResult, ScanRow,
};
pub use semiclassical::SemiclassicalPoint;
