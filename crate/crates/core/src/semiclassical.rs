//! Mean-field limit of the double well.
//!
//! Replacing the mode operators by c-numbers gives the energy per particle
//!
//! ```text
//! E(z, φ)/N = −√(1−z²) cos φ − (λ/4N)(N z² + N − 2) − V0 z
//! ```
//!
//! with population imbalance `z = (n_L − n_R)/N` and relative phase `φ`. At
//! `φ = 0` the stationary points solve `z/√(1−z²) − (λ/2) z − V0 = 0`; the
//! `(N−2)/N` constant drops out of that condition.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::find_roots;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalPoint {
    /// Imbalance, strictly inside (−1, 1).
    pub z: f64,
    pub phase_diff: f64,
    pub energy_per_particle: f64,
}

/// Distance from `±1` kept out of the stationary-point search.
pub const BOUNDARY_MARGIN: f64 = 1e-9;
pub const STATIONARY_GRID_POINTS: usize = 20_001;
pub const DEFAULT_JUMP_THRESHOLD: f64 = 0.1;
pub const DEFAULT_RESOLUTION: f64 = 0.05;
pub const CRITICAL_SEARCH_RANGE: (f64, f64) = (0.5, 4.0);

pub fn energy_per_particle(
    z: f64,
    phase_diff: f64,
    lambda: f64,
    tilt: f64,
    n_particles: usize,
) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return invalid(format!("imbalance z = {z} outside (-1, 1)"));
    }
    if n_particles == 0 {
        return invalid("particle number must be at least 1");
    }
    let n = n_particles as f64;
    Ok(-(1.0 - z * z).sqrt() * phase_diff.cos()
        - lambda / (4.0 * n) * (n * z * z + n - 2.0)
        - tilt * z)
}

/// `∂(E/N)/∂z` at `φ = 0`.
pub fn stationarity(z: f64, lambda: f64, tilt: f64) -> f64 {
    z / (1.0 - z * z).sqrt() - 0.5 * lambda * z - tilt
}

pub fn stationary_z(lambda: f64, tilt: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return invalid(format!("lambda must be >= 0, got {lambda}"));
    }
    let edge = 1.0 - BOUNDARY_MARGIN;
    find_roots(
        |z| stationarity(z, lambda, tilt),
        -edge,
        edge,
        STATIONARY_GRID_POINTS,
    )
}

/// Lowest-energy stationary point at `φ = 0`; exact energy ties go to the
/// larger `z`.
pub fn z_min(lambda: f64, tilt: f64, n_particles: usize) -> Result<SemiclassicalPoint> {
    let roots = stationary_z(lambda, tilt)?;
    assert!(
        !roots.is_empty(),
        "stationarity has a root for every lambda >= 0 and tilt >= 0"
    );
    let mut best: Option<SemiclassicalPoint> = None;
    for z in roots {
        let e = energy_per_particle(z, 0.0, lambda, tilt, n_particles)?;
        let better = match best {
            None => true,
            Some(b) => e < b.energy_per_particle || (e == b.energy_per_particle && z > b.z),
        };
        if better {
            best = Some(SemiclassicalPoint {
                z,
                phase_diff: 0.0,
                energy_per_particle: e,
            });
        }
    }
    Ok(best.expect("non-empty root set"))
}

/// Smallest `λ` in `[0.5, 4]` where `z_min` rises by more than
/// `jump_threshold` across one `resolution`-wide step, located by a scan with
/// step `resolution` and then bisection inside the first flagged cell.
/// `None` means `z_min` varies smoothly over the whole range.
///
/// The √(λ−2) onset is continuous, so the rise across a step shrinks with the
/// step; `resolution` is a probe width as much as a precision.
pub fn critical_lambda(
    tilt: f64,
    n_particles: usize,
    resolution: f64,
    jump_threshold: f64,
) -> Result<Option<f64>> {
    if !(resolution > 0.0) {
        return invalid(format!("resolution must be > 0, got {resolution}"));
    }
    let (lo, hi) = CRITICAL_SEARCH_RANGE;
    let z_at = |l: f64| z_min(l, tilt, n_particles).map(|p| p.z);
    let jumps = |l: f64| -> Result<bool> { Ok(z_at(l)? - z_at(l - resolution)? > jump_threshold) };

    let steps = ((hi - lo) / resolution).ceil() as usize;
    let mut prev = lo;
    for i in 1..=steps {
        let l = (lo + resolution * i as f64).min(hi);
        if jumps(l)? {
            let (mut a, mut b) = (prev, l);
            while b - a > 1e-3 * resolution {
                let mid = 0.5 * (a + b);
                if jumps(mid)? {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Ok(Some(b));
        }
        prev = l;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_closed_forms() {
        assert_eq!(energy_per_particle(0.0, 0.0, 0.0, 0.0, 10).unwrap(), -1.0);
        let e = energy_per_particle(0.0, std::f64::consts::PI, 0.0, 0.0, 10).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        assert!(energy_per_particle(1.0, 0.0, 1.0, 0.0, 10).is_err());
        assert!(energy_per_particle(-1.2, 0.0, 1.0, 0.0, 10).is_err());
    }

    #[test]
    fn energy_reference_value() {
        // −√0.75 − (2/400)(25 + 98) − 5e-4, evaluated at 50 digits:
        // -1.4815254037844386467637231707529361834714026269051903
        let e = energy_per_particle(0.5, 0.0, 2.0, 1e-3, 100).unwrap();
        assert!((e - -1.481_525_403_784_438_6).abs() < 1e-15);
    }

    #[test]
    fn stationary_points_closed_form() {
        let r = stationary_z(0.0, 0.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].abs() < 1e-12);

        let r = stationary_z(4.0, 0.0).unwrap();
        let s = 3f64.sqrt() / 2.0;
        assert_eq!(r.len(), 3);
        for (g, w) in r.iter().zip([-s, 0.0, s]) {
            assert!((g - w).abs() < 1e-11);
        }
    }

    #[test]
    fn z_min_regimes() {
        assert!(z_min(1.0, 0.0, 100).unwrap().z.abs() < 1e-12);
        let p = z_min(4.0, 1e-6, 100).unwrap();
        assert!((p.z - 3f64.sqrt() / 2.0).abs() < 1e-5);
        // Symmetric double minimum resolves to the positive branch.
        let p = z_min(4.0, 0.0, 100).unwrap();
        assert!(p.z > 0.8);
    }

    #[test]
    fn critical_lambda_bad_resolution() {
        assert!(critical_lambda(1e-3, 100, 0.0, 0.1).is_err());
    }
}
