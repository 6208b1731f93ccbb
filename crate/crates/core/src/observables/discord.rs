//! Classical correlation and quantum discord of the two-particle state under
//! rank-1 projective measurements on the second particle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::{entropy_2x2, rho1, rho2, von_neumann_entropy};
use crate::error::{invalid, Result};
use crate::fock::GroundState;
use crate::numerics::{refine_peak, HermitianMatrix};

/// Measurement direction on the Bloch sphere of particle B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    /// Polar angle in `[0, π]`.
    pub theta: f64,
    /// Azimuth in `[0, 2π]`.
    pub azimuth: f64,
}

impl MeasurementBasis {
    pub fn new(theta: f64, azimuth: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..=2.0 * PI).contains(&azimuth) {
            return invalid(format!(
                "measurement angles out of range: theta={theta}, azimuth={azimuth}"
            ));
        }
        Ok(Self { theta, azimuth })
    }

    /// `|Φ1⟩ = (cos θ/2, sin θ/2 e^{iφ})`, `|Φ2⟩ = (sin θ/2, −cos θ/2 e^{iφ})`.
    pub fn states(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let phase = Complex64::from_polar(1.0, self.azimuth);
        [
            [Complex64::new(c, 0.0), phase * s],
            [Complex64::new(s, 0.0), -phase * c],
        ]
    }
}

/// `(M1, M2)` with `M_i = |Φ_i⟩⟨Φ_i|`.
pub fn measurement_projectors(basis: &MeasurementBasis) -> (HermitianMatrix, HermitianMatrix) {
    let [phi1, phi2] = basis.states();
    (
        HermitianMatrix::projector(&phi1),
        HermitianMatrix::projector(&phi2),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSet {
    pub s1: f64,
    pub s2: f64,
    /// `I_AB = 2 S1 − S2`.
    pub mutual_info: f64,
    pub classical: f64,
    /// `D_AB = I_AB − C_AB`.
    pub discord: f64,
    pub argmin_basis: MeasurementBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscordOptions {
    /// Both `[0, π]` and `[0, 2π]` are split into this many equal intervals;
    /// endpoints are included.
    pub grid_intervals: usize,
    /// One parabolic step in each angle around the best grid node.
    pub refine: bool,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            grid_intervals: 100,
            refine: true,
        }
    }
}

/// Branch probabilities below this contribute nothing.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-14;

/// `(p, ρ_A)` for outcome `|Φ⟩` on B, with `ρ_A` unnormalised:
/// `ρ_A = Tr_B[(I⊗M) ρ (I⊗M)] = (I⊗⟨Φ|) ρ (I⊗|Φ⟩)`.
fn conditional_state(rho: &HermitianMatrix, phi: &[Complex64; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, pj) in phi.iter().enumerate() {
                for (l, pl) in phi.iter().enumerate() {
                    acc += pj.conj() * rho[(2 * i + j, 2 * k + l)] * pl;
                }
            }
            *entry = acc;
        }
    }
    out
}

/// `Σ_k p_k S(ρ_A^k)` for the measurement `basis` on B.
pub fn conditional_entropy(rho2: &HermitianMatrix, basis: &MeasurementBasis) -> f64 {
    basis
        .states()
        .iter()
        .map(|phi| {
            let sigma = conditional_state(rho2, phi);
            let p = sigma[0][0].re + sigma[1][1].re;
            if p < MIN_BRANCH_PROBABILITY {
                0.0
            } else {
                p * entropy_2x2(
                    sigma[0][0].re / p,
                    sigma[1][1].re / p,
                    sigma[0][1].norm_sqr() / (p * p),
                )
            }
        })
        .sum()
}

/// Grid search (plus optional parabolic polish) for the measurement that
/// minimises the post-measurement conditional entropy of A.
pub fn classical_and_discord(
    rho2: &HermitianMatrix,
    rho1: &HermitianMatrix,
    options: DiscordOptions,
) -> Result<CorrelationSet> {
    if rho2.dim() != 4 || rho1.dim() != 2 {
        return invalid("expected a 4x4 two-particle and 2x2 one-particle density matrix");
    }
    if options.grid_intervals < 2 {
        return invalid("discord grid needs at least 2 intervals");
    }
    let s1 = von_neumann_entropy(rho1)?;
    let s2 = von_neumann_entropy(rho2)?;
    let n = options.grid_intervals;
    let d_theta = PI / n as f64;
    let d_phi = 2.0 * PI / n as f64;
    let theta_at = |i: usize| if i == n { PI } else { d_theta * i as f64 };
    let phi_at = |j: usize| if j == n { 2.0 * PI } else { d_phi * j as f64 };
    let objective =
        |theta: f64, azimuth: f64| conditional_entropy(rho2, &MeasurementBasis { theta, azimuth });

    // Row-major scan, strict improvement only: ties keep the smallest theta,
    // then the smallest azimuth.
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for i in 0..=n {
        for j in 0..=n {
            let v = objective(theta_at(i), phi_at(j));
            if v < best.0 {
                best = (v, i, j);
            }
        }
    }
    let (mut best_value, bi, bj) = best;
    let mut theta = theta_at(bi);
    let mut azimuth = phi_at(bj);

    if options.refine {
        if bi > 0 && bi < n {
            let xs = [theta - d_theta, theta, theta + d_theta];
            let ys = xs.map(|t| -objective(t, azimuth));
            if let Ok(p) = refine_peak(&xs, &ys, 1) {
                let t = p.x.clamp(0.0, PI);
                let v = objective(t, azimuth);
                if !p.degenerate && v < best_value {
                    best_value = v;
                    theta = t;
                }
            }
        }
        if theta > 0.0 && theta < PI {
            let xs = [azimuth - d_phi, azimuth, azimuth + d_phi];
            let ys = xs.map(|a| -objective(theta, a));
            if let Ok(p) = refine_peak(&xs, &ys, 1) {
                let a = p.x.rem_euclid(2.0 * PI);
                let v = objective(theta, a);
                if !p.degenerate && v < best_value {
                    best_value = v;
                    azimuth = a;
                }
            }
        }
    }

    let mutual_info = 2.0 * s1 - s2;
    let classical = s1 - best_value;
    Ok(CorrelationSet {
        s1,
        s2,
        mutual_info,
        classical,
        discord: mutual_info - classical,
        argmin_basis: MeasurementBasis { theta, azimuth },
    })
}

/// S1, S2, mutual information, classical correlation and discord of a ground
/// state (`N >= 2`). Particles are identical, so the result does not depend on
/// which pair is considered.
pub fn correlations(gs: &GroundState, options: DiscordOptions) -> Result<CorrelationSet> {
    let r2 = rho2(gs)?;
    let r1 = rho1(gs);
    classical_and_discord(&r2, &r1, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn projector_special_cases() {
        let (m1, m2) = measurement_projectors(&MeasurementBasis::new(0.0, 0.0).unwrap());
        assert!(close(
            &m1,
            &HermitianMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap(),
            1e-15
        ));
        assert!(close(
            &m2,
            &HermitianMatrix::from_real(2, &[0.0, 0.0, 0.0, 1.0]).unwrap(),
            1e-15
        ));

        let (m1, _) = measurement_projectors(&MeasurementBasis::new(PI / 2.0, 0.0).unwrap());
        assert!(close(
            &m1,
            &HermitianMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn projectors_complete_and_idempotent() {
        for i in 0..=12 {
            for j in 0..=12 {
                let b = MeasurementBasis::new(PI * i as f64 / 12.0, 2.0 * PI * j as f64 / 12.0)
                    .unwrap();
                let (m1, m2) = measurement_projectors(&b);
                assert!(close(&(&m1 + &m2), &HermitianMatrix::identity(2), 1e-14));
                assert!(close(&(&m1 * &m1), &m1, 1e-14));
                assert!(close(&(&m2 * &m2), &m2, 1e-14));
                assert!(close(&(&m1 * &m2), &HermitianMatrix::zeros(2), 1e-14));
            }
        }
    }

    #[test]
    fn basis_bounds() {
        assert!(MeasurementBasis::new(-0.1, 0.0).is_err());
        assert!(MeasurementBasis::new(0.0, 7.0).is_err());
        assert!(MeasurementBasis::new(PI, 2.0 * PI).is_ok());
    }

    #[test]
    fn classically_correlated_state() {
        let mut rho = HermitianMatrix::zeros(4);
        rho[(0, 0)] = Complex64::new(0.5, 0.0);
        rho[(3, 3)] = Complex64::new(0.5, 0.0);
        let r1 = rho.partial_trace_second(2).unwrap();
        let c = classical_and_discord(&rho, &r1, DiscordOptions::default()).unwrap();
        let ln2 = 2f64.ln();
        assert!((c.mutual_info - ln2).abs() < 1e-12);
        assert!((c.classical - ln2).abs() < 1e-6);
        assert!(c.discord.abs() < 1e-6);
        assert_eq!(c.argmin_basis.theta, 0.0);
    }

    #[test]
    fn product_state_has_no_correlation() {
        let r1 = HermitianMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let r2 = r1.kron(&r1);
        let c = classical_and_discord(&r2, &r1, DiscordOptions::default()).unwrap();
        assert!(c.mutual_info.abs() < 1e-12);
        assert!(c.discord.abs() < 1e-6);
        assert!(c.classical.abs() < 1e-6);
    }

    #[test]
    fn rejects_tiny_grid() {
        let r1 = HermitianMatrix::identity(2).scale(0.5);
        let r2 = HermitianMatrix::identity(4).scale(0.25);
        let opts = DiscordOptions {
            grid_intervals: 1,
            refine: false,
        };
        assert!(classical_and_discord(&r2, &r1, opts).is_err());
    }
}
