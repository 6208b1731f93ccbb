use crate::error::{invalid, Result};

/// Bracket width at which bisection stops.
pub const ROOT_TOL: f64 = 1e-12;

/// All roots of `f` on `[lo, hi]` visible as sign changes on a uniform grid of
/// `grid_points` nodes, each refined by bisection. Exact zeros at grid nodes
/// are reported once. Returns ascending roots; no sign change means an empty
/// list.
pub fn find_roots<F>(f: F, lo: f64, hi: f64, grid_points: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return invalid(format!("root interval [{lo}, {hi}] is empty or non-finite"));
    }
    if grid_points < 2 {
        return invalid("find_roots needs at least 2 grid points");
    }
    let step = (hi - lo) / (grid_points - 1) as f64;
    let node = |i: usize| {
        if i + 1 == grid_points {
            hi
        } else {
            lo + step * i as f64
        }
    };

    let mut roots = Vec::new();
    let mut x_prev = node(0);
    let mut f_prev = f(x_prev);
    if !f_prev.is_finite() {
        return invalid(format!("f({x_prev}) is not finite"));
    }
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    for i in 1..grid_points {
        let x = node(i);
        let fx = f(x);
        if !fx.is_finite() {
            return invalid(format!("f({x}) is not finite"));
        }
        if fx == 0.0 {
            roots.push(x);
        } else if f_prev != 0.0 && (f_prev < 0.0) != (fx < 0.0) {
            roots.push(bisect(&f, x_prev, f_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    Ok(roots)
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, fa: f64, mut b: f64) -> f64 {
    let neg_at_a = fa < 0.0;
    while b - a > ROOT_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == neg_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
