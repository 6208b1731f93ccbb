//! Two-mode Bose-Hubbard Hamiltonian in the Fock basis `|k, N−k⟩`.
//!
//! ```text
//! H = −J (a_L† a_R + a_R† a_L) − (U/2) [n_L(n_L−1) + n_R(n_R−1)] − V0 (n_L − n_R)
//! ```
//!
//! with `J = 1`, `λ = N U / J` and `U > 0` attractive. Basis index `k` is the
//! left-well occupation, so the matrix is tridiagonal with
//!
//! ```text
//! H[k][k]   = −(λ / 2N) [k(k−1) + (N−k)(N−k−1)] − V0 (2k − N)
//! H[k][k+1] = −√((k+1)(N−k))
//! ```
//!
//! The `U/2` normalisation is the one whose mean-field limit is
//! `H/N = −√(1−z²) cos φ − (λ/4N)(N z² + N − 2) − V0 z`, critical at `λ = 2`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{eigh_tridiagonal, local_maxima, EigenPair, TridiagonalMatrix, Which};

pub const HOPPING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_particles: usize,
    /// `λ = N U / J`.
    pub lambda: f64,
    /// Well bias `V0`, in units of `J`.
    pub tilt: f64,
}

impl ModelParams {
    pub fn new(n_particles: usize, lambda: f64, tilt: f64) -> Result<Self> {
        let p = Self {
            n_particles,
            lambda,
            tilt,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 1 {
            return invalid("particle number must be at least 1");
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return invalid(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            ));
        }
        if !(self.tilt >= 0.0) || !self.tilt.is_finite() {
            return invalid(format!("tilt must be finite and >= 0, got {}", self.tilt));
        }
        Ok(())
    }

    /// On-site interaction `U = λ J / N`.
    pub fn interaction(&self) -> f64 {
        self.lambda * HOPPING / self.n_particles as f64
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }

    pub fn dim(&self) -> usize {
        self.n_particles + 1
    }
}

/// `k(k−1) + (N−k)(N−k−1)`, the pair count of basis state `k`.
pub(crate) fn pair_count(n: usize, k: usize) -> f64 {
    let kf = k as f64;
    let rf = (n - k) as f64;
    kf * (kf - 1.0) + rf * (rf - 1.0)
}

/// Diagonal of `∂H/∂λ`: `−[k(k−1) + (N−k)(N−k−1)] / (2N)`.
pub fn interaction_derivative_diag(n_particles: usize) -> Vec<f64> {
    let scale = -0.5 / n_particles as f64;
    (0..=n_particles)
        .map(|k| scale * pair_count(n_particles, k))
        .collect()
}

pub fn build_hamiltonian(params: &ModelParams) -> Result<TridiagonalMatrix> {
    params.validate()?;
    let n = params.n_particles;
    let half_u = 0.5 * params.interaction();
    let diag = (0..=n)
        .map(|k| -half_u * pair_count(n, k) - params.tilt * (2.0 * k as f64 - n as f64))
        .collect();
    let offdiag = (0..n)
        .map(|k| -HOPPING * (((k + 1) * (n - k)) as f64).sqrt())
        .collect();
    TridiagonalMatrix::new(diag, offdiag)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub params: ModelParams,
    /// `c_k`, normalised, largest-magnitude entry positive.
    pub amplitudes: Vec<f64>,
    pub energy: f64,
    /// `E1 − E0`.
    pub gap: f64,
    pub quasi_degenerate: bool,
}

impl GroundState {
    pub fn n_particles(&self) -> usize {
        self.params.n_particles
    }

    /// `⟨2k/N − 1⟩`.
    pub fn mean_imbalance(&self) -> f64 {
        let n = self.n_particles() as f64;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, c)| c * c * (2.0 * k as f64 / n - 1.0))
            .sum()
    }
}

/// Flips the sign so the largest-magnitude component is positive (first one on
/// ties).
pub(crate) fn fix_gauge(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

pub fn ground_state(params: &ModelParams) -> Result<GroundState> {
    let h = build_hamiltonian(params)?;
    let eig = eigh_tridiagonal(&h, Which::Lowest(2))?;
    let mut pairs = eig.pairs.into_iter();
    let EigenPair {
        value: energy,
        vector: mut amplitudes,
    } = pairs.next().expect("at least one pair");
    let e1 = pairs.next().expect("dimension >= 2").value;
    fix_gauge(&mut amplitudes);
    Ok(GroundState {
        params: *params,
        amplitudes,
        energy,
        gap: (e1 - energy).max(0.0),
        quasi_degenerate: eig.quasi_degenerate,
    })
}

/// All `N+1` eigenpairs, ascending, each gauge fixed. Dense cost `O(N³)`;
/// meant for `N` up to a few thousand.
pub fn full_spectrum(params: &ModelParams) -> Result<Vec<EigenPair>> {
    let h = build_hamiltonian(params)?;
    let mut pairs = eigh_tridiagonal(&h, Which::All)?.pairs;
    for p in &mut pairs {
        fix_gauge(&mut p.vector);
    }
    Ok(pairs)
}

/// `|c_k|²`.
pub fn spectrum_weights(gs: &GroundState) -> Vec<f64> {
    gs.amplitudes.iter().map(|c| c * c).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Binomial,
    CatLike,
    SelfTrapped,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Binomial => "binomial",
            Phase::CatLike => "cat-like",
            Phase::SelfTrapped => "self-trapped",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLabel {
    pub phase: Phase,
    /// Basis indices `k` of the detected peaks, ascending.
    pub peak_positions: Vec<usize>,
    /// Half the L1 distance between the weights and their mirror image
    /// `k ↔ N−k`; 0 for a left-right symmetric profile, 1 for disjoint support.
    pub asymmetry: f64,
}

pub const DEFAULT_PEAK_PROMINENCE: f64 = 1e-3;
pub const DEFAULT_ASYMMETRY_THRESHOLD: f64 = 0.1;

/// Labels a `|c_k|²` profile by its peak structure. A peak counts when its
/// prominence is at least `peak_prominence` times the largest weight.
pub fn classify_phase(
    weights: &[f64],
    peak_prominence: f64,
    asymmetry_threshold: f64,
) -> Result<PhaseLabel> {
    if weights.len() < 2 {
        return invalid("weight profile needs at least two entries");
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-8 || weights.iter().any(|w| !(*w >= 0.0)) {
        return invalid(format!(
            "weights are not a normalised distribution (sum {total})"
        ));
    }
    let n = weights.len() - 1;
    let wmax = weights.iter().cloned().fold(0.0, f64::max);
    let peaks: Vec<usize> = local_maxima(weights, true)
        .into_iter()
        .filter(|m| m.prominence >= peak_prominence * wmax)
        .map(|m| m.index)
        .collect();
    let asymmetry = 0.5
        * (0..=n)
            .map(|k| (weights[k] - weights[n - k]).abs())
            .sum::<f64>();

    let phase = match peaks.as_slice() {
        [] => return Err(Error::Classification("no peak detected".into())),
        [k] => {
            let offset = (2.0 * *k as f64 / n as f64 - 1.0).abs();
            if offset < asymmetry_threshold {
                Phase::Binomial
            } else {
                Phase::SelfTrapped
            }
        }
        [_, _] => Phase::CatLike,
        many => {
            return Err(Error::Classification(format!(
                "{} peaks detected at {:?}",
                many.len(),
                many
            )))
        }
    };
    Ok(PhaseLabel {
        phase,
        peak_positions: peaks,
        asymmetry,
    })
}
