//! Oscillatory integrals `∫ e^{iΩτ} S(τ) dτ`: Filon panels with exact phase,
//! the power-law tail `∫_T^∞ e^{iωτ} τ^{−β} dτ` by asymptotic series and by a rotated contour.

use num_complex::Complex64;

use crate::quadrature::gauss_legendre;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Moments `m_k = ∫₀¹ u^k e^{iθu} du` for `k = 0, 1, 2`.
pub fn moments(theta: f64) -> [Complex64; 3] {
    if theta.abs() < 1.0 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let mut term = Complex64::new(1.0, 0.0);
        for j in 0..24 {
            for (k, o) in out.iter_mut().enumerate() {
                *o += term / (j + k + 1) as f64;
            }
            term *= I * theta / (j + 1) as f64;
        }
        out
    } else {
        let e = Complex64::from_polar(1.0, theta);
        let it = I * theta;
        let m0 = (e - 1.0) / it;
        let m1 = (e - m0) / it;
        let m2 = (e - 2.0 * m1) / it;
        [m0, m1, m2]
    }
}

/// `∫_{τ0}^{τ1} e^{iΩτ} S` with `S` linear between the end values.
pub fn filon_linear(omega: f64, t0: f64, t1: f64, s0: Complex64, s1: Complex64) -> Complex64 {
    let h = t1 - t0;
    let [m0, m1, _] = moments(omega * h);
    Complex64::from_polar(h, omega * t0) * (s0 * (m0 - m1) + s1 * m1)
}

/// `∫_{τ0}^{τ1} e^{iΩτ} S` with `S` quadratic through the end and midpoint values.
pub fn filon_quadratic(omega: f64, t0: f64, t1: f64, s0: Complex64, sm: Complex64, s1: Complex64) -> Complex64 {
    let h = t1 - t0;
    let [m0, m1, m2] = moments(omega * h);
    let w0 = 2.0 * m2 - 3.0 * m1 + m0;
    let wm = 4.0 * (m1 - m2);
    let w1 = 2.0 * m2 - m1;
    Complex64::from_polar(h, omega * t0) * (s0 * w0 + sm * wm + s1 * w1)
}

/// `∫_T^∞ e^{iωτ} τ^{−β} dτ` from the integration-by-parts series
/// `(i/ω) e^{iωT} T^{−β} Σ_k (β)_k (iωT)^{−k}`, truncated at its smallest term.
/// Accurate to about `e^{−ωT}`; intended for `ωT ≥ 40`.
pub fn power_tail_series(omega: f64, t: f64, beta: Complex64) -> Complex64 {
    let z = I * omega * t;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0;
    for k in 0..200 {
        let next = term * (beta + k as f64) / z;
        let n = next.norm();
        if n >= last || n < 1e-18 * sum.norm() {
            break;
        }
        sum += next;
        term = next;
        last = n;
    }
    I / omega * Complex64::from_polar(1.0, omega * t) * Complex64::new(t, 0.0).powc(-beta) * sum
}

/// `∫_T^∞ e^{iωτ} τ^{−β} dτ` along `τ = T + is/ω`:
/// `(i/ω) e^{iωT} ∫₀^∞ e^{−s} (T + is/ω)^{−β} ds`, geometric panels with Gauss-Legendre.
pub fn power_tail_contour(omega: f64, t: f64, beta: Complex64) -> Complex64 {
    assert!(omega > 0.0 && t > 0.0);
    let (gx, gw) = gauss_legendre(20);
    let scale = (omega * t).min(1.0);
    let mut edges = vec![0.0, 0.25 * scale];
    while *edges.last().unwrap() < 64.0 {
        let e = (2.0 * edges.last().unwrap()).min(64.0);
        edges.push(e);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in gx.iter().zip(&gw) {
            let s = c + h * x;
            acc += h * wt * (-s).exp() * Complex64::new(t, s / omega).powc(-beta);
        }
    }
    I / omega * Complex64::from_polar(1.0, omega * t) * acc
}

/// `∫_T^∞ e^{iωτ} (τ/T)^{−p} dτ` for `ω ≥ 0`, the tail of a power-law amplitude
/// normalized at `T`. Series when `ωT ≥ 40`, contour otherwise; `ω = 0` needs `Re p > 1`.
pub fn normalized_power_tail(omega: f64, t: f64, p: Complex64) -> Complex64 {
    assert!(omega >= 0.0);
    if omega == 0.0 {
        return t / (p - 1.0);
    }
    let v = if omega * t >= 40.0 { power_tail_series(omega, t, p) } else { power_tail_contour(omega, t, p) };
    v * Complex64::new(t, 0.0).powc(p)
}
