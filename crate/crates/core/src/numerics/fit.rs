use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Ordinary least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to [0, 1].
    pub r_squared: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return invalid(format!("{} xs but {} ys", xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return invalid(format!(
            "linear fit needs at least 3 points, got {}",
            xs.len()
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return invalid("linear fit input contains non-finite values");
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= f64::EPSILON * xs.iter().map(|x| x * x).sum::<f64>() || sxx == 0.0 {
        return invalid("degenerate abscissae: all xs equal");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - slope * x - intercept).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.5];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0, 3.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn noisy_r_squared_below_one() {
        let fit = linear_fit(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.2, 1.8, 3.1]).unwrap();
        assert!(fit.r_squared < 1.0 && fit.r_squared > 0.9);
    }

    proptest! {
        #[test]
        fn linear_data_has_unit_r_squared(
            slope in -10.0f64..10.0,
            intercept in -10.0f64..10.0,
            xs in proptest::collection::vec(-100.0f64..100.0, 3..20),
        ) {
            let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - xs.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assume!(spread > 1e-3 && slope.abs() > 1e-3);
            let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
            let fit = linear_fit(&xs, &ys).unwrap();
            prop_assert!((fit.r_squared - 1.0).abs() < 1e-12);
            prop_assert!((fit.slope - slope).abs() < 1e-9 * (1.0 + slope.abs()));
        }
    }
}
