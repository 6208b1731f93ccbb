//! Tridiagonal and small Hermitian eigensolvers against independent oracles:
//! nalgebra's dense solver and characteristic-polynomial roots.

use dwlab_core::numerics::{
    eigh_hermitian_small, eigh_tridiagonal, HermitianMatrix, TridiagonalMatrix, Which,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense(t: &TridiagonalMatrix) -> DMatrix<f64> {
    let n = t.dim();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = t.diag()[i];
        if i + 1 < n {
            m[(i, i + 1)] = t.offdiag()[i];
            m[(i + 1, i)] = t.offdiag()[i];
        }
    }
    m
}

fn sorted_dense_eigenvalues(t: &TridiagonalMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = dense(t)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn random_tridiagonal(rng: &mut impl Rng, n: usize) -> TridiagonalMatrix {
    let d = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let e = (0..n - 1).map(|_| rng.gen_range(-3.0..3.0)).collect();
    TridiagonalMatrix::new(d, e).unwrap()
}

#[test]
fn random_50_full_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let t = random_tridiagonal(&mut rng, 50);
    let got = eigh_tridiagonal(&t, Which::All).unwrap();
    let want = sorted_dense_eigenvalues(&t);
    for (p, w) in got.pairs.iter().zip(&want) {
        assert!((p.value - w).abs() < 1e-10, "{} vs {w}", p.value);
    }
    // Orthonormal eigenvectors.
    for (i, a) in got.pairs.iter().enumerate() {
        for b in &got.pairs[i..] {
            let dot: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
            let want = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
            assert!((dot - want).abs() < 1e-10);
        }
    }
    assert!(got.max_residual < 1e-12 * t.norm_inf());
}

#[test]
fn lowest_pairs_match_full_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [2, 7, 40, 333] {
        let t = random_tridiagonal(&mut rng, n);
        let low = eigh_tridiagonal(&t, Which::Lowest(2)).unwrap();
        let want = sorted_dense_eigenvalues(&t);
        assert_eq!(low.pairs.len(), 2);
        for (p, w) in low.pairs.iter().zip(&want) {
            assert!((p.value - w).abs() < 1e-10 * t.norm_inf());
        }
    }
}

#[test]
fn glued_wilkinson_clusters() {
    // Two copies of W21+ coupled weakly: pairs of nearly equal eigenvalues.
    let mut d: Vec<f64> = (0..21).map(|i| (10.0 - i as f64).abs()).collect();
    d.extend(d.clone());
    let mut e = vec![1.0; 41];
    e[20] = 1e-8;
    let t = TridiagonalMatrix::new(d, e).unwrap();
    let got = eigh_tridiagonal(&t, Which::All).unwrap();
    let want = sorted_dense_eigenvalues(&t);
    for (p, w) in got.pairs.iter().zip(&want) {
        assert!((p.value - w).abs() < 1e-10);
    }
    let top = eigh_tridiagonal(&t, Which::Lowest(6)).unwrap();
    for i in 0..6 {
        for j in 0..i {
            let dot: f64 = top.pairs[i]
                .vector
                .iter()
                .zip(&top.pairs[j].vector)
                .map(|(x, y)| x * y)
                .sum();
            assert!(dot.abs() < 1e-8);
        }
    }
    assert!(top.max_residual < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ground_energy_matches_dense(seed in any::<u64>(), n in 1usize..=200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = if n == 1 {
            TridiagonalMatrix::new(vec![rng.gen_range(-5.0..5.0)], vec![]).unwrap()
        } else {
            random_tridiagonal(&mut rng, n)
        };
        let want = sorted_dense_eigenvalues(&t)[0];
        let got = eigh_tridiagonal(&t, Which::Lowest(1)).unwrap().pairs[0].value;
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(t.norm_inf()));
    }
}

/// Coefficients of det(xI − A) = x^n + c[n−1] x^(n−1) + … + c[0] by
/// Faddeev–LeVerrier.
fn characteristic_polynomial(a: &HermitianMatrix) -> Vec<Complex64> {
    let n = a.dim();
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    let mut m = HermitianMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k−1} + c_{n−k+1} I; c_{n−k} = −tr(A M_k)/k
        m = &(a * &m) + &HermitianMatrix::identity(n).scale(c[n - k + 1].re);
        let am = a * &m;
        c[n - k] = -am.trace() / k as f64;
    }
    c
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
fn durand_kerner(c: &[Complex64]) -> Vec<f64> {
    let n = c.len() - 1;
    let eval = |x: Complex64| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, k| acc * x + k)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * 3.0).collect();
    for _ in 0..2000 {
        let prev = roots.clone();
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
        }
        let moved = roots
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if moved < 1e-15 {
            break;
        }
    }
    let mut r: Vec<f64> = roots.iter().map(|z| z.re).collect();
    r.sort_by(f64::total_cmp);
    r
}

fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let mut m = HermitianMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

#[test]
fn hermitian_4x4_against_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let a = random_hermitian(&mut rng, 4);
        let want = durand_kerner(&characteristic_polynomial(&a));
        let got = eigh_hermitian_small(&a).unwrap();
        for (g, w) in got.values.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
        assert!((&got.reconstruct() - &a).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_reconstruction(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&mut rng, n);
        let e = eigh_hermitian_small(&a).unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((&e.reconstruct() - &a).norm() < 1e-12);
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - a.trace().re).abs() < 1e-12);
    }
}
