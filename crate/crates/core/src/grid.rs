//! Uniform search grids.

/// `k`-th point of a grid with spacing `step`.
///
/// When `1 / step` is an integer `n` the point is computed as `k / n`, which
/// is correctly rounded (`0.01 * 3` is not, `3 / 100` is).
pub fn grid_value(k: i64, step: f64) -> f64 {
    let inv = 1.0 / step;
    let n = inv.round();
    if n >= 1.0 && (inv - n).abs() <= 1e-9 * n {
        k as f64 / n
    } else {
        k as f64 * step
    }
}

/// Points `0, step, 2 step, ...` up to and including `max`.
pub fn ascending(max: f64, step: f64) -> Vec<f64> {
    let count = (max / step + 1e-9).floor() as i64;
    (0..=count).map(|k| grid_value(k, step)).collect()
}

/// Every multiple of `step` inside `[lo, hi]`, plus both ends, ascending.
pub fn aligned(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    let mut points = Vec::with_capacity((last - first + 3).max(2) as usize);
    points.push(lo);
    for k in first..=last {
        let v = grid_value(k, step);
        if v > lo && v < hi {
            points.push(v);
        }
    }
    if hi > lo {
        points.push(hi);
    }
    points
}
