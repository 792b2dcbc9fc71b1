//! FFT-based operators: free Schrödinger propagator, spectral derivatives,
//! continuous Fourier samples and trigonometric interpolation.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;

use crate::grid::{ComplexField, SpatialGrid};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward DFT in place.
pub fn fft_in_place(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// Inverse DFT in place, normalized by `1/N`.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
    let s = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|z| *z *= s);
}

pub fn fft(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    fft_in_place(&mut buf);
    buf
}

pub fn ifft(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    ifft_in_place(&mut buf);
    buf
}

/// Multiply each Fourier coefficient by `symbol(ξ_k)`.
pub fn apply_symbol(f: &ComplexField, symbol: impl Fn(f64) -> Complex64) -> ComplexField {
    let grid = *f.grid();
    let mut buf = fft(f.values());
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= symbol(grid.freq(k));
    }
    ifft_in_place(&mut buf);
    ComplexField::from_raw(grid, buf)
}

/// Free Schrödinger evolution `e^{it∂²} f`: coefficient at ξ multiplied by `e^{-itξ²}`.
pub fn free_propagate(f: &ComplexField, t: f64) -> ComplexField {
    if t == 0.0 {
        return f.clone();
    }
    apply_symbol(f, |xi| Complex64::from_polar(1.0, -t * xi * xi))
}

/// Spectral derivative of order `k`; the Nyquist mode is dropped for odd `k`.
pub fn derivative(f: &ComplexField, k: u32) -> ComplexField {
    if k == 0 {
        return f.clone();
    }
    let grid = *f.grid();
    let nyq = grid.len() / 2;
    let mut buf = fft(f.values());
    for (j, z) in buf.iter_mut().enumerate() {
        if k % 2 == 1 && j == nyq {
            *z = Complex64::new(0.0, 0.0);
        } else {
            *z *= Complex64::new(0.0, grid.freq(j)).powu(k);
        }
    }
    ifft_in_place(&mut buf);
    ComplexField::from_raw(grid, buf)
}

/// Spectral derivative of a real sample vector.
pub fn derivative_real(grid: &SpatialGrid, v: &[f64], k: u32) -> Vec<f64> {
    let f = ComplexField::from_raw(*grid, v.iter().map(|&r| Complex64::new(r, 0.0)).collect());
    derivative(&f, k).values().iter().map(|z| z.re).collect()
}

/// Samples of the continuous transform `û(ξ_k) = ∫e^{-ixξ}u dx` at the FFT frequencies.
pub fn continuous_spectrum(f: &ComplexField) -> Vec<Complex64> {
    let grid = *f.grid();
    let dx = grid.dx();
    let x0 = -grid.half_width();
    let mut buf = fft(f.values());
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= Complex64::from_polar(dx, -grid.freq(k) * x0);
    }
    buf
}

/// Continuous transform at an arbitrary frequency by direct trapezoidal quadrature.
pub fn transform_at(f: &ComplexField, xi: f64) -> Complex64 {
    let grid = f.grid();
    let dx = grid.dx();
    f.values()
        .iter()
        .enumerate()
        .map(|(j, &v)| v * Complex64::from_polar(1.0, -xi * grid.x(j)))
        .sum::<Complex64>()
        * dx
}

/// Trigonometric interpolant evaluated at arbitrary points (Nyquist mode split symmetrically).
pub fn interpolate(f: &ComplexField, points: &[f64]) -> Vec<Complex64> {
    let grid = *f.grid();
    let n = grid.len();
    let coeffs = fft(f.values());
    let x0 = -grid.half_width();
    let scale = 1.0 / n as f64;
    let nyq = n / 2;
    points
        .iter()
        .map(|&x| {
            let s = x - x0;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &c) in coeffs.iter().enumerate() {
                if k == nyq {
                    acc += c * (grid.max_freq() * s).cos();
                } else {
                    acc += c * Complex64::from_polar(1.0, grid.freq(k) * s);
                }
            }
            acc * scale
        })
        .collect()
}

/// Refine by zero padding to `factor · N` points on the same domain.
pub fn refine(f: &ComplexField, factor: usize) -> ComplexField {
    assert!(factor.is_power_of_two() && factor >= 1);
    let grid = *f.grid();
    if factor == 1 {
        return f.clone();
    }
    let n = grid.len();
    let m = n * factor;
    let fine = SpatialGrid::new(grid.half_width(), m).expect("refined grid");
    let coeffs = fft(f.values());
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    let nyq = n / 2;
    for k in 0..nyq {
        padded[k] = coeffs[k];
    }
    for k in nyq + 1..n {
        padded[m - n + k] = coeffs[k];
    }
    padded[nyq] = coeffs[nyq] * 0.5;
    padded[m - nyq] = coeffs[nyq] * 0.5;
    ifft_in_place(&mut padded);
    let s = factor as f64;
    padded.iter_mut().for_each(|z| *z *= s);
    ComplexField::from_raw(fine, padded)
}

/// Largest `t` for which the free evolution of `e^{-x²/σ²}` keeps its envelope
/// below `1e-12` outside `[-L/2, L/2]`.
pub fn recurrence_time(grid: &SpatialGrid, sigma: f64) -> f64 {
    let reach = 0.5 * grid.half_width() / (12.0 * std::f64::consts::LN_10).sqrt();
    if reach <= sigma {
        return 0.0;
    }
    0.25 * sigma * (reach * reach - sigma * sigma).sqrt()
}

/// Explicit free kernel `(4πit)^{-1/2} ∫ e^{i(x−y)²/4t} f(y) dy` by direct quadrature.
pub fn kernel_propagate_at(f: &ComplexField, t: f64, x: f64) -> Complex64 {
    let grid = f.grid();
    let pref = (Complex64::new(0.0, 4.0 * PI * t)).sqrt().inv();
    let sum: Complex64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let d = x - grid.x(j);
            v * Complex64::from_polar(1.0, d * d / (4.0 * t))
        })
        .sum();
    pref * sum * grid.dx()
}

/// Stationary-phase profile `(4πit)^{-1/2} e^{ix²/4t} û(x/2t)` on the grid of `f`, with `û`
/// taken as zero beyond the grid's Nyquist frequency.
pub fn stationary_profile(f: &ComplexField, t: f64) -> ComplexField {
    let grid = *f.grid();
    let pref = Complex64::new(0.0, 4.0 * PI * t).sqrt().inv();
    ComplexField::from_raw(
        grid,
        (0..grid.len())
            .map(|j| {
                let x = grid.x(j);
                if (x / (2.0 * t)).abs() >= grid.max_freq() {
                    return Complex64::new(0.0, 0.0);
                }
                pref * Complex64::from_polar(1.0, x * x / (4.0 * t)) * transform_at(f, x / (2.0 * t))
            })
            .collect(),
    )
}

/// Both sides of `‖e^{it∂²}f − (4πit)^{-1/2}e^{ix²/4t}f̂(x/2t)‖ = ‖(e^{iy²/4t} − 1)f‖`.
pub fn asymptotic_identity(f: &ComplexField, t: f64) -> (f64, f64) {
    let lhs = free_propagate(f, t).sub(&stationary_profile(f, t)).l2();
    let grid = *f.grid();
    let g = ComplexField::from_raw(
        grid,
        f.values()
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let y = grid.x(j);
                v * (Complex64::from_polar(1.0, y * y / (4.0 * t)) - 1.0)
            })
            .collect(),
    );
    (lhs, g.l2())
}

/// Value and first `m` derivatives at the origin node from one transform.
pub fn origin_derivatives(f: &ComplexField, m: usize) -> Vec<Complex64> {
    let grid = *f.grid();
    let n = grid.len();
    let coeffs = fft(f.values());
    let nyq = n / 2;
    (0..=m)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &c) in coeffs.iter().enumerate() {
                if j == nyq && k % 2 == 1 {
                    continue;
                }
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += c * (Complex64::new(0.0, grid.freq(j))).powi(k as i32) * sign;
            }
            acc / n as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gauss(grid: SpatialGrid) -> ComplexField {
        ComplexField::from_real_fn(grid, |x| (-x * x).exp())
    }

    fn gauss_evolved(t: f64, x: f64) -> Complex64 {
        let d = Complex64::new(1.0, 4.0 * t);
        d.sqrt().inv() * (-(x * x) / d).exp()
    }

    #[test]
    fn zero_time_is_identity() {
        let g = SpatialGrid::new(10.0, 128).unwrap();
        let f = gauss(g);
        assert_eq!(free_propagate(&f, 0.0), f);
    }

    #[test]
    fn gaussian_matches_closed_form() {
        let g = SpatialGrid::new(40.0, 4096).unwrap();
        let f = gauss(g);
        for &t in &[0.1, 1.0, 3.0] {
            let u = free_propagate(&f, t);
            let err = (0..g.len())
                .filter(|&j| g.x(j).abs() < 20.0)
                .map(|j| (u.values()[j] - gauss_evolved(t, g.x(j))).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-11, "t={t} err={err}");
        }
    }

    #[test]
    fn kernel_quadrature_agrees_with_spectral() {
        let g = SpatialGrid::new(40.0, 4096).unwrap();
        let f = gauss(g);
        let u = free_propagate(&f, 0.5);
        for &x in &[-3.0, 0.0, 1.25, 4.0] {
            let j = ((x + 40.0) / g.dx()).round() as usize;
            let q = kernel_propagate_at(&f, 0.5, g.x(j));
            assert!((q - u.values()[j]).norm() < 1e-10);
        }
    }

    #[test]
    fn dispersion_bound_on_bump() {
        let g = SpatialGrid::new(400.0, 32768).unwrap();
        let bump = ComplexField::from_real_fn(g, |x| {
            let y = x / 4.0;
            if y.abs() < 1.0 {
                (-1.0 / (1.0 - y * y)).exp()
            } else {
                0.0
            }
        });
        let l1 = bump.l1();
        for &t in &[1.0, 10.0] {
            let sup = free_propagate(&bump, t).sup();
            assert!(sup <= (4.0 * PI * t).sqrt().recip() * l1 * (1.0 + 1e-10));
        }
    }

    #[test]
    fn recurrence_time_of_gaussian_envelope() {
        let g = SpatialGrid::new(40.0, 4096).unwrap();
        let t = recurrence_time(&g, 1.0);
        let width = (1.0 + 16.0 * t * t).sqrt();
        assert!(((-(20.0f64).powi(2) / (width * width)).exp() - 1e-12).abs() < 1e-15);
        assert_eq!(recurrence_time(&g, 10.0), 0.0);
    }

    #[test]
    fn continuous_spectrum_of_gaussian() {
        let g = SpatialGrid::new(20.0, 512).unwrap();
        let s = continuous_spectrum(&gauss(g));
        for k in [0usize, 3, 17, 500] {
            let xi = g.freq(k);
            let exact = PI.sqrt() * (-xi * xi / 4.0).exp();
            assert!((s[k] - exact).norm() < 1e-12);
            assert!((transform_at(&gauss(g), xi) - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = SpatialGrid::new(20.0, 512).unwrap();
        let d = derivative(&gauss(g), 2);
        let err = (0..g.len())
            .map(|j| {
                let x = g.x(j);
                (d.values()[j].re - (4.0 * x * x - 2.0) * (-x * x).exp()).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-11);
    }

    #[test]
    fn refine_and_interpolate_reproduce_samples() {
        let g = SpatialGrid::new(10.0, 256).unwrap();
        let f = ComplexField::from_fn(g, |x| Complex64::new((-x * x).exp(), (x * 0.5).sin() * (-x * x / 4.0).exp()));
        let r = refine(&f, 4);
        for j in 0..g.len() {
            assert!((r.values()[4 * j] - f.values()[j]).norm() < 1e-13);
        }
        let p = interpolate(&f, &[0.123, -1.7]);
        let exact = |x: f64| Complex64::new((-x * x).exp(), (x * 0.5).sin() * (-x * x / 4.0).exp());
        assert!((p[0] - exact(0.123)).norm() < 1e-12);
        assert!((p[1] - exact(-1.7)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn propagator_is_unitary(t in -50.0f64..50.0, c in 0.3f64..3.0, s in -2.0f64..2.0) {
            let g = SpatialGrid::new(16.0, 256).unwrap();
            let f = ComplexField::from_fn(g, |x| Complex64::new((-(x - s) * (x - s) * c).exp(), x.sin() * (-x * x).exp()));
            let u = free_propagate(&f, t);
            prop_assert!((u.l2() - f.l2()).abs() <= 1e-12 * f.l2());
        }

        #[test]
        fn propagator_group_law(s in -5.0f64..5.0, t in -5.0f64..5.0) {
            let g = SpatialGrid::new(16.0, 256).unwrap();
            let f = gauss(g);
            let a = free_propagate(&free_propagate(&f, s), t);
            let b = free_propagate(&f, s + t);
            prop_assert!(a.sub(&b).l2() <= 1e-12 * f.l2());
        }
    }

    #[test]
    fn asymptotic_identity_holds() {
        let grid = SpatialGrid::new(256.0, 4096).unwrap();
        let f = ComplexField::from_real_fn(grid, |x| (-x * x).exp() * (1.0 + 0.3 * x));
        for t in [0.5, 2.0, 8.0] {
            let (l, r) = asymptotic_identity(&f, t);
            assert!((l - r).abs() <= 1e-9 * r, "t={t} {l} {r}");
        }
    }

    #[test]
    fn origin_derivatives_match_closed_form() {
        let grid = SpatialGrid::new(20.0, 512).unwrap();
        let f = ComplexField::from_real_fn(grid, |x| (-(x - 0.3) * (x - 0.3)).exp());
        let d = origin_derivatives(&f, 3);
        let e = (-0.09f64).exp();
        let exact = [e, 0.6 * e, (0.36 - 2.0) * e, (0.6f64.powi(3) - 6.0 * 0.6) * e];
        for k in 0..4 {
            assert!((d[k].re - exact[k]).abs() < 1e-10, "{k}");
        }
    }
}
