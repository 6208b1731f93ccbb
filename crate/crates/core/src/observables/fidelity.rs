use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::{
    full_spectrum, ground_state, interaction_derivative_diag, GroundState, ModelParams,
};
use crate::numerics::QUASI_DEGENERATE_FACTOR;

/// `|⟨a|b⟩|`; amplitudes are real.
pub fn fidelity(a: &GroundState, b: &GroundState) -> Result<f64> {
    if a.n_particles() != b.n_particles() {
        return invalid(format!(
            "fidelity between N={} and N={} states",
            a.n_particles(),
            b.n_particles()
        ));
    }
    let dot: f64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x * y)
        .sum();
    Ok(dot.abs().min(1.0))
}

/// `1 − |⟨a|b⟩|` evaluated as `min(‖a−b‖², ‖a+b‖²)/2`, which keeps full
/// relative precision when the overlap is within rounding of 1.
fn infidelity(a: &[f64], b: &[f64]) -> f64 {
    let minus: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let plus: f64 = a.iter().zip(b).map(|(x, y)| (x + y).powi(2)).sum();
    0.5 * minus.min(plus)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiResult {
    pub chi: f64,
    pub delta_lambda_used: f64,
    /// Two successive step sizes agreed to `CHI_RELATIVE_AGREEMENT` and neither
    /// ground state was quasi-degenerate.
    pub converged: bool,
}

pub const CHI_RELATIVE_AGREEMENT: f64 = 1e-3;
pub const MAX_STEP_HALVINGS: usize = 6;

/// `δλ = 1e−4 / √N`.
pub fn default_delta_lambda(n_particles: usize) -> f64 {
    1e-4 / (n_particles as f64).sqrt()
}

/// Fidelity susceptibility from the overlap of ground states at `λ` and
/// `λ + δλ`: `χ = −2 ln F / δλ²`. The step is halved until two successive
/// estimates agree; the finer estimate is returned.
pub fn chi_finite_difference(params: &ModelParams, delta_lambda: f64) -> Result<ChiResult> {
    if !(delta_lambda > 0.0) || !delta_lambda.is_finite() {
        return invalid(format!("delta_lambda must be > 0, got {delta_lambda}"));
    }
    let base = ground_state(params)?;
    let mut quasi = base.quasi_degenerate;

    let estimate = |step: f64, quasi: &mut bool| -> Result<f64> {
        let shifted = ground_state(&params.with_lambda(params.lambda + step))?;
        *quasi |= shifted.quasi_degenerate;
        let one_minus_f = infidelity(&base.amplitudes, &shifted.amplitudes);
        if one_minus_f >= 1.0 {
            return Err(Error::DegenerateCrossing {
                lambda_a: params.lambda,
                lambda_b: params.lambda + step,
            });
        }
        Ok(-2.0 * (-one_minus_f).ln_1p() / (step * step))
    };

    let mut step = delta_lambda;
    let mut previous = estimate(step, &mut quasi)?;
    let mut converged = false;
    let mut current = previous;
    for _ in 0..MAX_STEP_HALVINGS {
        step *= 0.5;
        current = estimate(step, &mut quasi)?;
        if (current - previous).abs() <= CHI_RELATIVE_AGREEMENT * current.abs() + 1e-12 {
            converged = true;
            break;
        }
        previous = current;
    }
    Ok(ChiResult {
        chi: current,
        delta_lambda_used: step,
        converged: converged && !quasi,
    })
}

/// Power of the energy denominator in the perturbative sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ChiDenominator {
    /// `(E_n − E_0)²`, the second-order expansion of `−2 ln F / δλ²`.
    #[default]
    Squared,
    /// `(E_n − E_0)`, as sometimes printed; kept for comparison only.
    FirstPower,
}

/// `Σ_{n≠0} |⟨n|∂H/∂λ|0⟩|² / (E_n − E_0)^p` over the full spectrum.
pub fn chi_perturbative(params: &ModelParams, denominator: ChiDenominator) -> Result<f64> {
    let spectrum = full_spectrum(params)?;
    let e0 = spectrum[0].value;
    let width = spectrum.last().map(|p| p.value).unwrap_or(e0) - e0;
    let gap = spectrum.get(1).map_or(f64::INFINITY, |p| p.value - e0);
    if gap <= QUASI_DEGENERATE_FACTOR * f64::EPSILON * width.max(f64::MIN_POSITIVE)
        || gap <= 1e-12 * width
    {
        return Err(Error::Degenerate { gap });
    }
    let dh = interaction_derivative_diag(params.n_particles);
    let psi0: Vec<f64> = spectrum[0]
        .vector
        .iter()
        .zip(&dh)
        .map(|(c, v)| c * v)
        .collect();
    Ok(spectrum[1..]
        .iter()
        .map(|pair| {
            let element: f64 = pair.vector.iter().zip(&psi0).map(|(a, b)| a * b).sum();
            let de = pair.value - e0;
            let denom = match denominator {
                ChiDenominator::Squared => de * de,
                ChiDenominator::FirstPower => de,
            };
            element * element / denom
        })
        .sum())
}
