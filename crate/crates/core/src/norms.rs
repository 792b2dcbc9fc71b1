//! Norm toolkit: L², L^∞, H^k, Ḣ^{-2} and the mixed L⁴L^∞ space-time norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Trajectory};
use crate::spectral::fft;

/// Tolerance of the zero-mode rule for Ḣ^{-2}, relative to the L² norm.
pub const ZERO_MODE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub sup: f64,
    /// `‖f‖_{H^k}` for `k = 0..=s`, weight `(1+ξ²)^{k/2}`.
    pub sobolev: Vec<f64>,
    /// `‖∂^k f‖_{L²}` for `k = 0..=s`.
    pub derivative_l2: Vec<f64>,
    /// `None` when the zero Fourier mode is not negligible.
    pub hdot_minus2: Option<f64>,
    pub mixed_l4_linf: Option<f64>,
}

/// Weighted discrete Plancherel sum `(dx/N Σ w(ξ_k)|F_k|²)^{1/2}` over modes where `w` is defined.
pub fn spectral_norm(f: &ComplexField, weight: impl Fn(f64) -> Option<f64>) -> f64 {
    let grid = f.grid();
    let coeffs = fft(f.values());
    let s: f64 = coeffs
        .iter()
        .enumerate()
        .filter_map(|(k, c)| weight(grid.freq(k)).map(|w| w * c.norm_sqr()))
        .sum();
    (s * grid.dx() / grid.len() as f64).sqrt()
}

pub fn sobolev(f: &ComplexField, k: u32) -> f64 {
    spectral_norm(f, |xi| Some((1.0 + xi * xi).powi(k as i32)))
}

/// `‖|ξ|^k û‖`. For `k < 0` the zero bin is filled by sixth-order even
/// extrapolation of the weighted density from its neighbours.
pub fn homogeneous(f: &ComplexField, k: i32) -> f64 {
    let base = spectral_norm(f, |xi| if xi == 0.0 { None } else { Some((xi * xi).powi(k)) });
    if k >= 0 {
        return base;
    }
    let grid = f.grid();
    let n = grid.len();
    let coeffs = fft(f.values());
    let g = |j: usize| {
        let xi = grid.freq(j);
        0.5 * (coeffs[j].norm_sqr() + coeffs[n - j].norm_sqr()) * (xi * xi).powi(k)
    };
    let g0 = (1.5 * g(1) - 0.6 * g(2) + 0.1 * g(3)).max(0.0);
    (base * base + g0 * grid.dx() / n as f64).sqrt()
}

/// `|û(0)|`, the zero mode of the continuous transform.
pub fn zero_mode(f: &ComplexField) -> f64 {
    let s: num_complex::Complex64 = f.values().iter().sum();
    s.norm() * f.grid().dx()
}

pub fn passes_zero_mode_rule(f: &ComplexField) -> bool {
    zero_mode(f) <= ZERO_MODE_TOL * f.l2()
}

/// `‖û/ξ²‖`, or `None` under the zero-mode rule.
pub fn hdot_minus2(f: &ComplexField) -> Option<f64> {
    if passes_zero_mode_rule(f) {
        Some(homogeneous(f, -2))
    } else {
        None
    }
}

pub fn norms(f: &ComplexField, s: u32) -> NormReport {
    NormReport {
        l2: f.l2(),
        sup: f.sup(),
        sobolev: (0..=s).map(|k| sobolev(f, k)).collect(),
        derivative_l2: (0..=s).map(|k| homogeneous(f, k as i32)).collect(),
        hdot_minus2: hdot_minus2(f),
        mixed_l4_linf: None,
    }
}

/// `(∫ ‖f(t)‖_∞⁴ dt)^{1/4}` over `[t0, t1]` by the trapezoidal rule on stored slices,
/// with linear interpolation of the integrand at interval ends falling between slices.
pub fn mixed_norm_l4_linf(traj: &Trajectory, t0: f64, t1: f64) -> Result<f64> {
    let times = traj.times();
    if times.len() < 2 {
        return Err(Error::Precondition("mixed norm needs at least two slices".into()));
    }
    let (lo, hi) = (t0.min(t1), t0.max(t1));
    let mut pts: Vec<(f64, f64)> = times
        .iter()
        .zip(traj.fields())
        .map(|(&t, f)| (t, f.sup().powi(4)))
        .collect();
    if pts[0].0 > pts[pts.len() - 1].0 {
        pts.reverse();
    }
    let (tmin, tmax) = (pts[0].0, pts[pts.len() - 1].0);
    let eps = 1e-12 * tmax.abs().max(1.0);
    if lo < tmin - eps || hi > tmax + eps {
        return Err(Error::OutOfRange(format!(
            "interval [{lo}, {hi}] outside trajectory range [{tmin}, {tmax}]"
        )));
    }
    let value_at = |t: f64| -> f64 {
        let i = pts.partition_point(|p| p.0 <= t).clamp(1, pts.len() - 1);
        let (a, b) = (pts[i - 1], pts[i]);
        a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
    };
    let mut nodes = vec![(lo, value_at(lo))];
    nodes.extend(pts.iter().copied().filter(|p| p.0 > lo && p.0 < hi));
    nodes.push((hi, value_at(hi)));
    let integral: f64 = nodes.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    Ok(integral.max(0.0).powf(0.25))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{log_times, SpatialGrid};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_has_zero_norms() {
        let g = SpatialGrid::new(8.0, 64).unwrap();
        let r = norms(&ComplexField::zeros(g), 3);
        assert_eq!(r.l2, 0.0);
        assert_eq!(r.sup, 0.0);
        assert!(r.sobolev.iter().all(|&v| v == 0.0));
        assert_eq!(r.hdot_minus2, Some(0.0));
    }

    #[test]
    fn gaussian_l2() {
        let g = SpatialGrid::new(40.0, 4096).unwrap();
        let f = ComplexField::from_real_fn(g, |x| (-x * x).exp());
        let r = norms(&f, 2);
        assert!((r.l2 - (PI / 2.0).powf(0.25)).abs() < 1e-12);
        assert!((r.l2 - 1.1195).abs() < 1e-4);
        assert!(r.hdot_minus2.is_none());
        // ‖∂f‖² = ∫4x²e^{-2x²} = (π/2)^{1/2}
        assert!((r.derivative_l2[1] - (PI / 2.0).powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn hdot_minus2_of_second_derivative() {
        // f = ∂²e^{-x²}: û/ξ² = -√π e^{-ξ²/4}, ‖·‖² = (1/2π)·π·√(2π)
        let g = SpatialGrid::new(40.0, 4096).unwrap();
        let f = ComplexField::from_real_fn(g, |x| (4.0 * x * x - 2.0) * (-x * x).exp());
        let h = hdot_minus2(&f).unwrap();
        assert!((h - (0.5 * (2.0 * PI).sqrt()).sqrt()).abs() < 1e-8, "{h}");
    }

    #[test]
    fn mixed_norm_closed_form() {
        let g = SpatialGrid::new(4.0, 16).unwrap();
        let times = log_times(1.0, 4.0, 4000);
        let fields = times.iter().map(|&t| ComplexField::constant(g, Complex64::new(t.powf(-0.5), 0.0))).collect();
        let traj = Trajectory::new(times, fields).unwrap();
        let m = mixed_norm_l4_linf(&traj, 1.0, 4.0).unwrap();
        assert!((m - 0.75f64.powf(0.25)).abs() < 1e-6);
        assert!((m - 0.9306).abs() < 1e-4);
        assert!(mixed_norm_l4_linf(&traj, 0.5, 2.0).is_err());
    }

    #[test]
    fn mixed_norm_constant_field() {
        let g = SpatialGrid::new(4.0, 16).unwrap();
        let f = ComplexField::from_real_fn(g, |x| 1.5 * (-x * x).exp());
        let traj = Trajectory::new(vec![0.0, 0.5, 1.0], vec![f.clone(), f.clone(), f.clone()]).unwrap();
        assert!((mixed_norm_l4_linf(&traj, 0.0, 1.0).unwrap() - 1.5).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn plancherel(seed in proptest::collection::vec(-1.0f64..1.0, 8)) {
            let g = SpatialGrid::new(12.0, 256).unwrap();
            let f = ComplexField::from_fn(g, |x| {
                let e = (-x * x / 2.0).exp();
                Complex64::new(
                    e * (seed[0] + seed[1] * x + seed[2] * (seed[3] * x).sin()),
                    e * (seed[4] + seed[5] * (seed[6] * x).cos() + seed[7] * x * x),
                )
            });
            let s = spectral_norm(&f, |_| Some(1.0));
            prop_assert!((s - f.l2()).abs() <= 1e-10 * f.l2().max(1e-300));
        }
    }
}
