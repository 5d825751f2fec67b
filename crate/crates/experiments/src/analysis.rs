//! Oscillation fits on recorded series.

use serde::{Deserialize, Serialize};

/// `y(t) ≈ amplitude·cos(omega·t + phase) + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationFit {
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    pub offset: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
}

/// Frequency from linearly interpolated zero crossings of `y − mean(y)`.
/// Needs at least two crossings.
pub fn zero_crossing_frequency(times: &[f64], values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    crossing_frequency(times, values, mean)
}

/// Frequency from the crossings of `y` through `level`.
pub fn crossing_frequency(times: &[f64], values: &[f64], level: f64) -> Option<f64> {
    if times.len() != values.len() || times.len() < 3 {
        return None;
    }
    let mut crossings = Vec::new();
    for i in 1..values.len() {
        let (a, b) = (values[i - 1] - level, values[i] - level);
        if a == 0.0 {
            continue;
        }
        if a * b < 0.0 || b == 0.0 {
            crossings.push(times[i - 1] + (times[i] - times[i - 1]) * a / (a - b));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    (span > 0.0).then(|| std::f64::consts::PI * (crossings.len() - 1) as f64 / span)
}

/// Linear least squares of `a·cos ωt + b·sin ωt + c` at fixed `ω`.
pub fn fit_at_frequency(times: &[f64], values: &[f64], omega: f64) -> Option<OscillationFit> {
    if times.len() != values.len() || times.len() < 3 {
        return None;
    }
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (&t, &y) in times.iter().zip(values) {
        let row = [(omega * t).cos(), (omega * t).sin(), 1.0];
        for i in 0..3 {
            aty[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let [a, b, c] = solve3(ata, aty)?;
    let ss: f64 = times
        .iter()
        .zip(values)
        .map(|(&t, &y)| {
            let r = y - (a * (omega * t).cos() + b * (omega * t).sin() + c);
            r * r
        })
        .sum();
    Some(OscillationFit {
        amplitude: a.hypot(b),
        omega,
        phase: (-b).atan2(a),
        offset: c,
        rms_residual: (ss / times.len() as f64).sqrt(),
    })
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        v.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (k, p) in pivot_row.iter().enumerate().skip(col) {
                m[row][k] -= f * p;
            }
            v[row] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (v[row] - s) / m[row][row];
    }
    x.iter().all(|c| c.is_finite()).then_some(x)
}

const REFINEMENTS: usize = 5;

/// Least-squares sinusoid with zero-crossing frequency refinement: fit at
/// the current frequency, re-estimate it from the crossings through the
/// fitted offset, repeat. Starts from `omega_guess`, or from the crossings
/// of the mean-removed series without one.
pub fn fit_oscillation(times: &[f64], values: &[f64], omega_guess: Option<f64>) -> Option<OscillationFit> {
    let mut omega = omega_guess.or_else(|| zero_crossing_frequency(times, values))?;
    let mut fit = fit_at_frequency(times, values, omega)?;
    for _ in 0..REFINEMENTS {
        let Some(next) = crossing_frequency(times, values, fit.offset) else { break };
        if next == omega {
            break;
        }
        omega = next;
        fit = fit_at_frequency(times, values, omega)?;
    }
    Some(fit)
}

/// Amplitudes of consecutive windows of `window` samples at a common
/// frequency. A trailing partial window is dropped.
pub fn windowed_amplitudes(times: &[f64], values: &[f64], omega: f64, window: usize) -> Vec<f64> {
    times
        .chunks_exact(window)
        .zip(values.chunks_exact(window))
        .filter_map(|(t, v)| fit_at_frequency(t, v, omega).map(|f| f.amplitude))
        .collect()
}

/// Means of `groups` equal consecutive slices; a remainder is dropped.
pub fn group_means(values: &[f64], groups: usize) -> Vec<f64> {
    let size = values.len() / groups.max(1);
    if size == 0 {
        return vec![];
    }
    values.chunks_exact(size).take(groups).map(|c| c.iter().sum::<f64>() / size as f64).collect()
}

/// Damping profile of a uniformly sampled oscillation: per-period amplitudes
/// at a fixed frequency, averaged over `groups` consecutive stretches.
pub fn burst_averaged_amplitudes(times: &[f64], values: &[f64], omega: f64, groups: usize) -> Vec<f64> {
    if times.len() < 2 || omega <= 0.0 {
        return vec![];
    }
    let spacing = times[1] - times[0];
    let per_period = ((2.0 * std::f64::consts::PI / omega) / spacing).ceil().max(3.0) as usize;
    group_means(&windowed_amplitudes(times, values, omega, per_period), groups)
}
