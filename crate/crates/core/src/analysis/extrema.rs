//! Peak and valley detection with a symmetric distance window and a
//! window-minimum prominence threshold.
//!
//! Index `t` is a peak when `x(t) > x(t ± k)` for every `k = 1..=d` that
//! stays in bounds, at least one in-bounds neighbour exists on each side,
//! and `x(t) − min(x[t−d ..= t+d]) ≥ p`. Peaks closer than `d` keep the
//! higher one (lower index on ties). Valleys are peaks of `−x`.

use serde::Serialize;

pub const DEFAULT_DISTANCE: usize = 7;
/// Default prominence threshold as a multiple of the series' standard deviation.
pub const DEFAULT_PROMINENCE_SD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub index: usize,
    /// Value in the input series.
    pub value: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremaReport {
    pub peaks: Vec<Extremum>,
    pub valleys: Vec<Extremum>,
    pub distance: usize,
    pub prominence: f64,
}

fn is_strict_window_max(x: &[f64], t: usize, d: usize) -> bool {
    let n = x.len();
    if t == 0 || t + 1 >= n {
        return false;
    }
    (1..=d).all(|k| {
        let left = t.checked_sub(k).map_or(true, |i| x[t] > x[i]);
        let right = (t + k >= n) || x[t] > x[t + k];
        left && right
    })
}

fn window_prominence(x: &[f64], t: usize, d: usize) -> f64 {
    let lo = t.saturating_sub(d);
    let hi = (t + d).min(x.len() - 1);
    let min = x[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
    x[t] - min
}

/// Peaks of `x` with distance `d ≥ 1` and prominence threshold `p ≥ 0`.
pub fn find_peaks(x: &[f64], d: usize, p: f64) -> Vec<Extremum> {
    let d = d.max(1);
    let mut candidates: Vec<Extremum> = (0..x.len())
        .filter(|&t| is_strict_window_max(x, t, d))
        .map(|t| Extremum {
            index: t,
            value: x[t],
            prominence: window_prominence(x, t, d),
        })
        .filter(|e| e.prominence >= p)
        .collect();

    // Strict window maxima are already more than `d` apart, so this pass
    // only matters if the candidate rule is ever relaxed.
    candidates.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.index.cmp(&b.index)));
    let mut kept: Vec<Extremum> = Vec::with_capacity(candidates.len());
    for c in candidates {
        if kept.iter().all(|k| k.index.abs_diff(c.index) >= d) {
            kept.push(c);
        }
    }
    kept.sort_by_key(|e| e.index);
    kept
}

/// Peaks of the negated series, reported with the original values.
pub fn find_valleys(x: &[f64], d: usize, p: f64) -> Vec<Extremum> {
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    find_peaks(&neg, d, p)
        .into_iter()
        .map(|e| Extremum {
            value: x[e.index],
            ..e
        })
        .collect()
}

/// Sample standard deviation; 0 for fewer than two values.
pub fn sample_sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (x.len() - 1) as f64).sqrt()
}

/// Runs both detectors; `prominence = None` uses half the sample standard
/// deviation of `x`.
pub fn detect_extrema(x: &[f64], distance: usize, prominence: Option<f64>) -> ExtremaReport {
    let p = prominence.unwrap_or_else(|| DEFAULT_PROMINENCE_SD * sample_sd(x));
    ExtremaReport {
        peaks: find_peaks(x, distance, p),
        valleys: find_valleys(x, distance, p),
        distance,
        prominence: p,
    }
}
