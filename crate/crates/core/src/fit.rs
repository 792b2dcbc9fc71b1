//! Least-squares fits used for decay rates and extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// RMS of the log-space fit error.
    pub residual: f64,
}

/// Ordinary least squares `y ≈ c0 + c1 x`; returns `(c0, c1, rms)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    (icpt, slope, rms)
}

/// Slope of `log value` against `log t`.
pub fn fit_decay_exponent(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 4 {
        return Err(Error::Precondition(format!("need at least 4 samples, got {}", samples.len())));
    }
    if samples.iter().any(|&(t, v)| !(t > 0.0 && v > 0.0 && t.is_finite() && v.is_finite())) {
        return Err(Error::Precondition("times and values must be positive and finite".into()));
    }
    let tmin = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let tmax = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if tmax / tmin < 10.0 * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("times span {tmin}..{tmax}, less than one decade")));
    }
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (c0, c1, rms) = linear_fit(&lx, &ly);
    Ok(DecayFit { exponent: c1, prefactor: c0.exp(), residual: rms })
}

/// Least squares for `y ≈ Σ_j c_j φ_j(x)` with a handful of basis functions
/// (normal equations, Gaussian elimination with partial pivoting).
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let m = rows[0].len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (r, &yv) in rows.iter().zip(y) {
        for i in 0..m {
            for j in 0..m {
                a[i][j] += r[i] * r[j];
            }
            a[i][m] += r[i] * yv;
        }
    }
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        let d = a[c][c];
        if d == 0.0 {
            continue;
        }
        for r in 0..m {
            if r != c {
                let f = a[r][c] / d;
                for k in c..=m {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    (0..m).map(|i| if a[i][i] != 0.0 { a[i][m] / a[i][i] } else { 0.0 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..=64).map(|i| 10f64.powf(1.0 + 2.0 * i as f64 / 64.0)).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let f = fit_decay_exponent(&sample(|t| t.powf(-0.5))).unwrap();
        assert!((f.exponent + 0.5).abs() < 1e-12 && f.residual < 1e-12);
        let f = fit_decay_exponent(&sample(|t| 3.0 / t)).unwrap();
        assert!((f.exponent + 1.0).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-10);
    }

    #[test]
    fn perturbed_power_law() {
        let f = fit_decay_exponent(&sample(|t| t.powf(-0.5) * (1.0 + 0.01 * t.ln().sin()))).unwrap();
        assert!((f.exponent + 0.5).abs() <= 0.02);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, 1.0), (3.0, 0.0), (20.0, 1.0)]).is_err());
        assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (5.0, 1.0)]).is_err());
    }

    #[test]
    fn quadratic_least_squares() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x, x * x]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| 2.0 - x + 0.5 * x * x).collect();
        let c = least_squares(&rows, &y);
        assert!((c[0] - 2.0).abs() < 1e-10 && (c[1] + 1.0).abs() < 1e-10 && (c[2] - 0.5).abs() < 1e-10);
    }
}
