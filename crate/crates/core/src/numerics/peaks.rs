use crate::error::{invalid, Result};

/// Vertex of a three-point parabola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedPeak {
    pub x: f64,
    pub y: f64,
    /// The three points were collinear; `(x, y)` is the grid point itself.
    pub degenerate: bool,
}

/// Fits a parabola through `(xs[i-1..=i+1], ys[..])` around the local maximum
/// at `index` and returns its vertex.
pub fn refine_peak(xs: &[f64], ys: &[f64], index: usize) -> Result<RefinedPeak> {
    if xs.len() != ys.len() {
        return invalid("xs and ys differ in length");
    }
    if index == 0 || index + 1 >= xs.len() {
        return invalid(format!(
            "peak index {index} is not interior to a series of length {}",
            xs.len()
        ));
    }
    let (x0, x1, x2) = (xs[index - 1], xs[index], xs[index + 1]);
    let (y0, y1, y2) = (ys[index - 1], ys[index], ys[index + 1]);
    if !(x0 < x1 && x1 < x2) {
        return invalid("abscissae around the peak are not strictly increasing");
    }
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    let scale = d01.abs().max(d12.abs()).max(f64::MIN_POSITIVE);
    if curvature.abs() <= 64.0 * f64::EPSILON * scale / (x2 - x0) || curvature == 0.0 {
        return Ok(RefinedPeak {
            x: x1,
            y: y1,
            degenerate: true,
        });
    }
    if y1 < y0 || y1 < y2 {
        return invalid(format!("point {index} is not a local maximum"));
    }
    // Newton form: p(x) = y0 + d01 (x - x0) + curvature (x - x0)(x - x1).
    let x = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    let y = y0 + d01 * (x - x0) + curvature * (x - x0) * (x - x1);
    Ok(RefinedPeak {
        x,
        y,
        degenerate: false,
    })
}

/// A local maximum of a sampled series together with its topographic
/// prominence: height above the higher of the two minima separating it from
/// taller points (or the series ends).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMax {
    pub index: usize,
    pub value: f64,
    pub prominence: f64,
}

/// Local maxima of `ys` (plateaus report their first index). Non-finite
/// samples never count as maxima and break the prominence walk. With
/// `include_edges`, endpoints higher than their only neighbour count too.
pub fn local_maxima(ys: &[f64], include_edges: bool) -> Vec<LocalMax> {
    let n = ys.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for i in 0..n {
        let y = ys[i];
        if !y.is_finite() {
            continue;
        }
        let left_ok = if i == 0 {
            include_edges
        } else {
            ys[i - 1].is_finite() && y > ys[i - 1]
        };
        // Plateau: walk right past equal values.
        let mut j = i;
        while j + 1 < n && ys[j + 1] == y {
            j += 1;
        }
        let right_ok = if j + 1 == n {
            include_edges && (i > 0 || n == 1)
        } else {
            ys[j + 1].is_finite() && y > ys[j + 1]
        };
        if !(left_ok && right_ok) {
            continue;
        }
        if i == 0 && j + 1 == n {
            out.push(LocalMax {
                index: i,
                value: y,
                prominence: 0.0,
            });
            continue;
        }

        let mut left_min = y;
        for &v in ys[..i].iter().rev() {
            if !v.is_finite() || v > y {
                break;
            }
            left_min = left_min.min(v);
        }
        let mut right_min = y;
        for &v in &ys[j + 1..] {
            if !v.is_finite() || v > y {
                break;
            }
            right_min = right_min.min(v);
        }
        // Edges only have one side to descend.
        let base = match (i == 0, j + 1 == n) {
            (true, _) => right_min,
            (_, true) => left_min,
            _ => left_min.max(right_min),
        };
        out.push(LocalMax {
            index: i,
            value: y,
            prominence: y - base,
        });
    }
    out
}
