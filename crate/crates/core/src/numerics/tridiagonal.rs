//! Real symmetric tridiagonal eigensolver.
//!
//! Two paths share one entry point:
//!
//! * lowest few pairs: Sturm-sequence bisection for the eigenvalues followed by
//!   inverse iteration (partial-pivoting LU of `T - λI`) for the vectors, with
//!   Gram-Schmidt against earlier vectors of the same cluster;
//! * full spectrum: implicit-shift QL with eigenvector accumulation.
//!
//! Both paths work on a copy of the matrix whose diagonal has been centred on
//! zero; the shift is added back to every eigenvalue.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return invalid("tridiagonal matrix must have dimension >= 1");
        }
        if offdiag.len() + 1 != diag.len() {
            return invalid(format!(
                "offdiag length {} does not match diag length {} - 1",
                offdiag.len(),
                diag.len()
            ));
        }
        if diag.iter().chain(offdiag.iter()).any(|x| !x.is_finite()) {
            return invalid("tridiagonal matrix has non-finite entries");
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// `T x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "matvec dimension mismatch");
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 {
                self.offdiag[i - 1].abs()
            } else {
                0.0
            };
            let right = if i + 1 < n {
                self.offdiag[i].abs()
            } else {
                0.0
            };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.offdiag[i - 1].abs()
                } else {
                    0.0
                };
                let right = if i + 1 < n {
                    self.offdiag[i].abs()
                } else {
                    0.0
                };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// `‖T v − λ v‖₂`.
    pub fn residual(&self, value: f64, vector: &[f64]) -> f64 {
        self.matvec(vector)
            .iter()
            .zip(vector)
            .map(|(tv, v)| (tv - value * v).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn shifted(&self, shift: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d - shift).collect(),
            offdiag: self.offdiag.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// Unit Euclidean norm.
    pub vector: Vec<f64>,
}

/// How many eigenpairs to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    All,
    Lowest(usize),
}

#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    /// Ascending in eigenvalue.
    pub pairs: Vec<EigenPair>,
    /// Set when the two lowest computed eigenvalues are closer than
    /// `QUASI_DEGENERATE_FACTOR * ε * spectral width`.
    pub quasi_degenerate: bool,
    /// Largest `‖T v − λ v‖₂` over the returned pairs, measured on the
    /// unshifted matrix.
    pub max_residual: f64,
}

pub const QUASI_DEGENERATE_FACTOR: f64 = 1.0e3;

const MAX_BISECTION_STEPS: usize = 256;
const MAX_INVERSE_ITERATIONS: usize = 12;
const EXTRA_INVERSE_ITERATIONS: usize = 2;
const MAX_QL_SWEEPS: usize = 60;

pub fn eigh_tridiagonal(m: &TridiagonalMatrix, which: Which) -> Result<TridiagonalEigen> {
    let n = m.dim();
    let count = match which {
        Which::All => n,
        Which::Lowest(k) if k >= 1 && k <= n => k,
        Which::Lowest(k) => {
            return invalid(format!("requested {k} eigenpairs from a {n}x{n} matrix"));
        }
    };

    let (dmin, dmax) = m
        .diag
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
    let shift = 0.5 * (dmin + dmax);
    let work = m.shifted(shift);

    let mut pairs = if count == n && matches!(which, Which::All) {
        implicit_ql(&work)?
    } else {
        lowest_by_bisection(&work, count)?
    };
    for p in &mut pairs {
        p.value += shift;
    }

    let (glo, ghi) = m.gershgorin();
    let width = (ghi - glo).max(f64::MIN_POSITIVE);
    let quasi_degenerate = pairs.len() >= 2
        && pairs[1].value - pairs[0].value < QUASI_DEGENERATE_FACTOR * f64::EPSILON * width;
    let max_residual = pairs
        .iter()
        .map(|p| m.residual(p.value, &p.vector))
        .fold(0.0, f64::max);

    Ok(TridiagonalEigen {
        pairs,
        quasi_degenerate,
        max_residual,
    })
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], offdiag_sq: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - offdiag_sq[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn lowest_by_bisection(t: &TridiagonalMatrix, count: usize) -> Result<Vec<EigenPair>> {
    let offdiag_sq: Vec<f64> = t.offdiag.iter().map(|e| e * e).collect();
    let max_e2 = offdiag_sq.iter().cloned().fold(1.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_e2;
    let (glo, ghi) = t.gershgorin();
    let norm = t.norm_inf().max(f64::MIN_POSITIVE);
    // Widen slightly so the Sturm count is strict at both ends.
    let pad = 2.0 * f64::EPSILON * norm + 2.0 * pivmin;
    let (glo, ghi) = (glo - pad, ghi + pad);

    let mut values = Vec::with_capacity(count);
    for j in 0..count {
        // Eigenvalue j (0-based) lies in [lo, hi) with count(lo) <= j < count(hi).
        let mut lo = values
            .last()
            .copied()
            .map_or(glo, |v: f64| v - pad)
            .max(glo);
        let mut hi = ghi;
        while sturm_count(&t.diag, &offdiag_sq, lo, pivmin) > j {
            lo -= pad.max(lo.abs() * f64::EPSILON);
        }
        let mut steps = 0;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::EPSILON * norm + pivmin;
            if hi - lo <= tol {
                break;
            }
            if sturm_count(&t.diag, &offdiag_sq, mid, pivmin) > j {
                hi = mid;
            } else {
                lo = mid;
            }
            steps += 1;
            if steps > MAX_BISECTION_STEPS {
                return Err(Error::Convergence {
                    routine: "sturm bisection",
                    iterations: steps,
                });
            }
        }
        values.push(0.5 * (lo + hi));
    }

    let cluster_tol = 1.0e-3 * norm;
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(count);
    let mut cluster_start = 0;
    for (j, &value) in values.iter().enumerate() {
        if j > 0 && value - values[j - 1] > cluster_tol {
            cluster_start = j;
        }
        let vector = inverse_iteration(t, value, &pairs[cluster_start..j], j, norm)?;
        pairs.push(EigenPair { value, vector });
    }
    Ok(pairs)
}

/// LU factorisation with partial pivoting of `T − λ I`, in the layout of
/// LAPACK's `dgttrf`: `u0` diagonal, `u1` and `u2` the first and second
/// superdiagonals of U, `l` the multipliers and `swapped[i]` whether rows i and
/// i+1 were exchanged.
struct ShiftedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &TridiagonalMatrix, lambda: f64, tiny: f64) -> Self {
        let n = t.dim();
        let mut u0: Vec<f64> = t.diag.iter().map(|d| d - lambda).collect();
        let mut u1: Vec<f64> = t.offdiag.clone();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut l: Vec<f64> = t.offdiag.clone();
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n.saturating_sub(1) {
            if u0[i].abs() >= l[i].abs() {
                if u0[i] == 0.0 {
                    u0[i] = tiny;
                }
                let fact = l[i] / u0[i];
                l[i] = fact;
                u0[i + 1] -= fact * u1[i];
            } else {
                let fact = u0[i] / l[i];
                u0[i] = l[i];
                l[i] = fact;
                let temp = u1[i];
                u1[i] = u0[i + 1];
                u0[i + 1] = temp - fact * u0[i + 1];
                if i + 2 < n {
                    u2[i] = u1[i + 1];
                    u1[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for u in u0.iter_mut() {
            if u.abs() < tiny {
                *u = if *u < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            u0,
            u1,
            u2,
            l,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
                b[i + 1] -= self.l[i] * b[i];
            } else {
                b[i + 1] -= self.l[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut x = b[i];
            if i + 1 < n {
                x -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                x -= self.u2[i] * b[i + 2];
            }
            b[i] = x / self.u0[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let norm = scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    norm
}

/// Deterministic start vector; varies with the eigenvalue index so vectors in a
/// cluster do not start identical.
fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15 ^ (seed as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

fn inverse_iteration(
    t: &TridiagonalMatrix,
    lambda: f64,
    previous: &[EigenPair],
    seed: usize,
    norm: f64,
) -> Result<Vec<f64>> {
    let n = t.dim();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let tiny = f64::EPSILON * norm;
    let lu = ShiftedLu::factor(t, lambda, tiny);
    let target = 8.0 * (n as f64).sqrt() * f64::EPSILON * norm;

    let mut v = start_vector(n, seed);
    normalize(&mut v);
    let mut converged_at = None;
    for iter in 0..MAX_INVERSE_ITERATIONS + EXTRA_INVERSE_ITERATIONS {
        lu.solve(&mut v);
        for p in previous {
            let dot: f64 = p.vector.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            for (x, a) in v.iter_mut().zip(&p.vector) {
                *x -= dot * a;
            }
        }
        if normalize(&mut v) == 0.0 {
            v = start_vector(n, seed + iter + 1);
            normalize(&mut v);
            continue;
        }
        match converged_at {
            Some(at) if iter >= at + EXTRA_INVERSE_ITERATIONS => break,
            Some(_) => {}
            None => {
                if t.residual(lambda, &v) <= target {
                    converged_at = Some(iter);
                } else if iter + 1 >= MAX_INVERSE_ITERATIONS {
                    return Err(Error::Convergence {
                        routine: "inverse iteration",
                        iterations: iter + 1,
                    });
                }
            }
        }
    }
    Ok(v)
}

/// Implicit QL with Wilkinson-type shifts (after the Handbook `tql2`
/// procedure); returns all pairs sorted ascending.
fn implicit_ql(t: &TridiagonalMatrix) -> Result<Vec<EigenPair>> {
    let n = t.dim();
    let mut d = t.diag.clone();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&t.offdiag);
    // z[col][row]
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let mut col = vec![0.0; n];
            col[c] = 1.0;
            col
        })
        .collect();

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(Error::Convergence {
                        routine: "implicit QL",
                        iterations: iter,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (left, right) = z.split_at_mut(i + 1);
                    let zi = &mut left[i];
                    let zi1 = &mut right[0];
                    for k in 0..n {
                        let hk = zi1[k];
                        zi1[k] = s * zi[k] + c * hk;
                        zi[k] = c * zi[k] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut pairs: Vec<EigenPair> = d
        .into_iter()
        .zip(z)
        .map(|(value, vector)| EigenPair { value, vector })
        .collect();
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(d: &[f64], e: &[f64]) -> TridiagonalMatrix {
        TridiagonalMatrix::new(d.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = tri(&[0.0, 0.0], &[-1.0]);
        for which in [Which::All, Which::Lowest(2)] {
            let eig = eigh_tridiagonal(&m, which).unwrap();
            assert!((eig.pairs[0].value + 1.0).abs() < 1e-14);
            assert!((eig.pairs[1].value - 1.0).abs() < 1e-14);
            let v = &eig.pairs[0].vector;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            assert!((v[0].abs() - s).abs() < 1e-12 && (v[1].abs() - s).abs() < 1e-12);
            assert!(v[0] * v[1] > 0.0);
        }
    }

    #[test]
    fn free_hopping_three_sites() {
        let r2 = 2f64.sqrt();
        let m = tri(&[0.0, 0.0, 0.0], &[-r2, -r2]);
        let eig = eigh_tridiagonal(&m, Which::All).unwrap();
        let vals: Vec<f64> = eig.pairs.iter().map(|p| p.value).collect();
        for (got, want) in vals.iter().zip([-2.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-13, "{vals:?}");
        }
        let low = eigh_tridiagonal(&m, Which::Lowest(1)).unwrap();
        assert_eq!(low.pairs.len(), 1);
        assert!((low.pairs[0].value + 2.0).abs() < 1e-13);
    }

    #[test]
    fn one_by_one() {
        let m = tri(&[3.5], &[]);
        let eig = eigh_tridiagonal(&m, Which::Lowest(1)).unwrap();
        assert_eq!(eig.pairs[0].value, 3.5);
        assert_eq!(eig.pairs[0].vector, vec![1.0]);
        let all = eigh_tridiagonal(&m, Which::All).unwrap();
        assert_eq!(all.pairs[0].value, 3.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TridiagonalMatrix::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(TridiagonalMatrix::new(vec![0.0, f64::NAN], vec![1.0]).is_err());
        assert!(TridiagonalMatrix::new(vec![], vec![]).is_err());
        let m = tri(&[0.0, 0.0], &[1.0]);
        assert!(eigh_tridiagonal(&m, Which::Lowest(0)).is_err());
        assert!(eigh_tridiagonal(&m, Which::Lowest(3)).is_err());
    }

    #[test]
    fn exact_degeneracy_gives_orthogonal_vectors() {
        // Two decoupled identical blocks.
        let m = tri(&[1.0, 1.0, 1.0, 1.0], &[-1.0, 0.0, -1.0]);
        let eig = eigh_tridiagonal(&m, Which::Lowest(2)).unwrap();
        assert!(eig.quasi_degenerate);
        let dot: f64 = eig.pairs[0]
            .vector
            .iter()
            .zip(&eig.pairs[1].vector)
            .map(|(a, b)| a * b)
            .sum();
        assert!(dot.abs() < 1e-12);
        assert!(eig.max_residual < 1e-13);
    }

    #[test]
    fn wilkinson_w21_close_pair() {
        // W21+: the top pair agrees to ~1e-14, the low end is well separated.
        let d: Vec<f64> = (0..21).map(|i| (10.0 - i as f64).abs()).collect();
        let e = vec![1.0; 20];
        let m = TridiagonalMatrix::new(d.iter().map(|x| -x).collect(), e).unwrap();
        let all = eigh_tridiagonal(&m, Which::All).unwrap();
        let low = eigh_tridiagonal(&m, Which::Lowest(2)).unwrap();
        assert!((all.pairs[0].value - low.pairs[0].value).abs() < 1e-12);
        assert!((all.pairs[1].value - low.pairs[1].value).abs() < 1e-12);
        let dot: f64 = low.pairs[0]
            .vector
            .iter()
            .zip(&low.pairs[1].vector)
            .map(|(a, b)| a * b)
            .sum();
        assert!(dot.abs() < 1e-10);
        assert!(low.max_residual < 1e-12);
    }
}
