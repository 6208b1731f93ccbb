//! One- and two-particle reduced density matrices of a two-mode state and
//! their von Neumann entropies.
//!
//! Mode order is (L, R); pair order is (LL, LR, RL, RR).

use crate::error::{invalid, Error, Result};
use crate::fock::GroundState;
use crate::numerics::{eigh_hermitian_small, HermitianMatrix};

/// Eigenvalues in `[−CLAMP_WINDOW, 0)` are treated as zero.
pub const CLAMP_WINDOW: f64 = 1e-9;

/// `(ρ1)_ij = ⟨a_j† a_i⟩ / N`.
pub fn rho1(gs: &GroundState) -> HermitianMatrix {
    rho1_from_amplitudes(&gs.amplitudes)
}

/// `(ρ2)_{ij,kl} = ⟨a_k† a_l† a_j a_i⟩ / (N(N−1))`.
pub fn rho2(gs: &GroundState) -> Result<HermitianMatrix> {
    rho2_from_amplitudes(&gs.amplitudes)
}

/// As [`rho1`], for any real normalised amplitude vector of length `N+1`.
pub fn rho1_from_amplitudes(c: &[f64]) -> HermitianMatrix {
    let n = c.len() - 1;
    let nf = n as f64;
    let mut left = 0.0;
    let mut right = 0.0;
    let mut hop = 0.0;
    for (k, ck) in c.iter().enumerate() {
        let w = ck * ck;
        left += k as f64 * w;
        right += (n - k) as f64 * w;
        if k < n {
            hop += c[k + 1] * ck * (((k + 1) * (n - k)) as f64).sqrt();
        }
    }
    HermitianMatrix::from_real(2, &[left / nf, hop / nf, hop / nf, right / nf])
        .expect("real symmetric by construction")
}

pub fn rho2_from_amplitudes(c: &[f64]) -> Result<HermitianMatrix> {
    if c.len() < 3 {
        return invalid(format!(
            "two-particle density matrix needs N >= 2, got N = {}",
            c.len().saturating_sub(1)
        ));
    }
    let n = c.len() - 1;
    let mut both_left = 0.0;
    let mut both_right = 0.0;
    let mut split = 0.0;
    let mut pair_hop = 0.0;
    let mut hop_left_spectator = 0.0;
    let mut hop_right_spectator = 0.0;
    for (k, ck) in c.iter().enumerate() {
        let kf = k as f64;
        let rf = (n - k) as f64;
        let w = ck * ck;
        both_left += kf * (kf - 1.0) * w;
        both_right += rf * (rf - 1.0) * w;
        split += kf * rf * w;
        if k < n {
            let amp = c[k + 1] * ck * ((kf + 1.0) * rf).sqrt();
            hop_left_spectator += kf * amp;
            hop_right_spectator += (rf - 1.0) * amp;
        }
        if k + 1 < n {
            pair_hop += c[k + 2] * ck * ((kf + 1.0) * (kf + 2.0) * rf * (rf - 1.0)).sqrt();
        }
    }
    let norm = (n * (n - 1)) as f64;
    let (a, b, s, t2, tl, tr) = (
        both_left / norm,
        both_right / norm,
        split / norm,
        pair_hop / norm,
        hop_left_spectator / norm,
        hop_right_spectator / norm,
    );
    #[rustfmt::skip]
    let m = [
        a,  tl, tl, t2,
        tl, s,  s,  tr,
        tl, s,  s,  tr,
        t2, tr, tr, b,
    ];
    HermitianMatrix::from_real(4, &m)
}

fn check_density(rho: &HermitianMatrix) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > CLAMP_WINDOW || tr.im.abs() > CLAMP_WINDOW {
        return Err(Error::InvalidDensityMatrix(format!(
            "trace {tr} differs from 1"
        )));
    }
    Ok(())
}

fn entropy_of(probabilities: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut s = 0.0;
    for p in probabilities {
        if p < -CLAMP_WINDOW || !p.is_finite() {
            return Err(Error::InvalidDensityMatrix(format!(
                "eigenvalue {p:e} is negative"
            )));
        }
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    Ok(s.max(0.0))
}

/// `−Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &HermitianMatrix) -> Result<f64> {
    check_density(rho)?;
    let eig = eigh_hermitian_small(rho)?;
    entropy_of(eig.values)
}

/// Entropy of a 2×2 Hermitian matrix with unit trace via its closed-form
/// eigenvalues. No validation; used in the discord inner loop.
pub(crate) fn entropy_2x2(a: f64, d: f64, off_norm_sqr: f64) -> f64 {
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + off_norm_sqr).sqrt();
    let mut s = 0.0;
    for p in [mean - radius, mean + radius] {
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn binomial(n: usize) -> Vec<f64> {
        // c_k = sqrt(C(n,k) / 2^n)
        let mut ln_fact = vec![0.0f64; n + 1];
        for i in 1..=n {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        (0..=n)
            .map(|k| {
                (0.5 * (ln_fact[n] - ln_fact[k] - ln_fact[n - k] - n as f64 * 2f64.ln())).exp()
            })
            .collect()
    }

    fn noon(n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n + 1];
        c[0] = std::f64::consts::FRAC_1_SQRT_2;
        c[n] = std::f64::consts::FRAC_1_SQRT_2;
        c
    }

    fn assert_close(m: &HermitianMatrix, want: &[f64], tol: f64) {
        let d = m.dim();
        for i in 0..d {
            for j in 0..d {
                let z = m[(i, j)];
                assert!(
                    (z - Complex64::new(want[i * d + j], 0.0)).norm() < tol,
                    "entry ({i},{j}) = {z} want {}",
                    want[i * d + j]
                );
            }
        }
    }

    #[test]
    fn binomial_two_particles_is_pure_product() {
        let c = binomial(2);
        assert_close(&rho1_from_amplitudes(&c), &[0.5, 0.5, 0.5, 0.5], 1e-15);
        let r2 = rho2_from_amplitudes(&c).unwrap();
        assert_close(&r2, &[0.25; 16], 1e-15);
        assert!(von_neumann_entropy(&r2).unwrap() < 1e-12);
    }

    #[test]
    fn binomial_large_n_is_product() {
        let c = binomial(60);
        let r1 = rho1_from_amplitudes(&c);
        let r2 = rho2_from_amplitudes(&c).unwrap();
        let prod = r1.kron(&r1);
        assert!((&r2 - &prod).norm() < 1e-12);
        assert!(von_neumann_entropy(&r1).unwrap() < 1e-10);
    }

    #[test]
    fn noon_state() {
        let r1 = rho1_from_amplitudes(&noon(5));
        assert_close(&r1, &[0.5, 0.0, 0.0, 0.5], 1e-15);
        let r2 = rho2_from_amplitudes(&noon(5)).unwrap();
        let mut want = [0.0; 16];
        want[0] = 0.5;
        want[15] = 0.5;
        assert_close(&r2, &want, 1e-15);
        let s = von_neumann_entropy(&r2).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn entropies() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        assert!((von_neumann_entropy(&half).unwrap() - 2f64.ln()).abs() < 1e-15);
        let pure = HermitianMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);

        let mut d = HermitianMatrix::zeros(4);
        let ps = [0.1, 0.2, 0.3, 0.4];
        for (i, p) in ps.iter().enumerate() {
            d[(i, i)] = Complex64::new(*p, 0.0);
        }
        // -Σ p ln p = 1.2798542258336676
        let s = von_neumann_entropy(&d).unwrap();
        assert!((s - 1.279_854_225_833_667_6).abs() < 1e-14);
    }

    #[test]
    fn invalid_density_matrices() {
        let bad_trace = HermitianMatrix::identity(2);
        assert!(matches!(
            von_neumann_entropy(&bad_trace),
            Err(Error::InvalidDensityMatrix(_))
        ));
        let negative = HermitianMatrix::from_real(2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(matches!(
            von_neumann_entropy(&negative),
            Err(Error::InvalidDensityMatrix(_))
        ));
        assert!(rho2_from_amplitudes(&[0.6, 0.8]).is_err());
    }

    #[test]
    fn closed_form_2x2_entropy_matches_jacobi() {
        let m = HermitianMatrix::new(
            2,
            vec![
                Complex64::new(0.3, 0.0),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.7, 0.0),
            ],
        )
        .unwrap();
        let s = von_neumann_entropy(&m).unwrap();
        let fast = entropy_2x2(0.3, 0.7, 0.05);
        assert!((s - fast).abs() < 1e-15);
    }
}
