//! Integer-order Bessel functions of the first kind by Miller's downward
//! recurrence.

use crate::error::{Error, Result};

const RESCALE_ABOVE: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

/// `J_0(τ), …, J_{k_max}(τ)`.
///
/// The recurrence `J_{k−1} = (2k/τ) J_k − J_{k+1}` is run downward from an
/// order above both `k_max` and `τ`, seeded with an arbitrary tiny value, and
/// the result is normalized with `J_0 + 2 Σ_{j≥1} J_{2j} = 1`.
pub fn bessel_sequence(tau: f64, k_max: usize) -> Result<Vec<f64>> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidArgument(format!("Bessel argument must be finite and >= 0, got {tau}")));
    }
    let mut out = vec![0.0; k_max + 1];
    if tau == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }

    let base = k_max.max(tau.ceil() as usize);
    let mut start = base + 20usize.max((40.0 * base as f64).sqrt().ceil() as usize);
    // even start so the normalization sum pairs up cleanly
    start += start & 1;

    let mut above = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k at k = start
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k <= k_max {
            out[k] = current;
        }
        if k % 2 == 0 {
            norm += 2.0 * current;
        }
        let below = (2.0 * k as f64 / tau) * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut() {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = current;
    norm += current;
    for v in out.iter_mut() {
        *v /= norm;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Power series Σ (−1)^m (x/2)^{2m+k} / (m!(m+k)!), summed until the terms
    // stop changing the result. Fine for small arguments.
    fn series(k: usize, x: f64) -> f64 {
        let half = x / 2.0;
        let mut term = (0..k).fold(1.0, |acc, i| acc * half / (i + 1) as f64);
        let mut sum = term;
        for m in 1..200 {
            term *= -half * half / (m as f64 * (m + k) as f64);
            sum += term;
            if term.abs() < 1e-300 {
                break;
            }
        }
        sum
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_sequence(0.0, 4).unwrap(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn negative_argument_rejected() {
        assert!(bessel_sequence(-1.0, 3).is_err());
        assert!(bessel_sequence(f64::NAN, 3).is_err());
    }

    #[test]
    fn unit_argument() {
        let j = bessel_sequence(1.0, 10).unwrap();
        assert!((j[0] - 0.765_197_686_6).abs() < 1e-10);
        assert!((j[1] - 0.440_050_585_7).abs() < 1e-10);
        for (k, v) in j.iter().enumerate() {
            assert!((v - series(k, 1.0)).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn small_arguments_match_series() {
        for &x in &[1e-8, 1e-3, 0.3, 2.5, 7.0] {
            let j = bessel_sequence(x, 30).unwrap();
            for (k, v) in j.iter().enumerate() {
                assert!((v - series(k, x)).abs() < 1e-14, "x={x} k={k}: {v} vs {}", series(k, x));
            }
        }
    }

    #[test]
    fn short_sequence_above_order() {
        // k_max below τ still needs a start above τ
        let long = bessel_sequence(40.0, 80).unwrap();
        let short = bessel_sequence(40.0, 3).unwrap();
        for k in 0..=3 {
            assert!((long[k] - short[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_decreases_beyond_twice_tau() {
        for &tau in &[0.5, 3.0, 20.0, 150.0] {
            let kmax = (4.0 * tau) as usize + 20;
            let j = bessel_sequence(tau, kmax).unwrap();
            let first = (2.0 * tau).ceil() as usize;
            for k in first..kmax {
                assert!(j[k + 1].abs() < j[k].abs() || j[k] == 0.0, "tau={tau} k={k}");
            }
        }
    }
}
