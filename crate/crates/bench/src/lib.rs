//! Fixtures shared by the criterion benches.

use binormal_core::{ComplexField, SpatialGrid};
use num_complex::Complex64;

/// A modulated Gaussian on `[−L, L)` with `n` points.
pub fn wave_packet(half_width: f64, n: usize) -> ComplexField {
    let grid = SpatialGrid::new(half_width, n).expect("bench grid");
    ComplexField::from_fn(grid, |x| Complex64::from_polar((-x * x / 64.0).exp(), 0.3 * x))
}

/// `a + u` with a small packet, the shape of the smooth-side field.
pub fn shifted_packet(a: f64, half_width: f64, n: usize) -> ComplexField {
    let u = wave_packet(half_width, n);
    let grid = *u.grid();
    let vals = u.values().iter().map(|z| a + 0.01 * z).collect();
    ComplexField::new(grid, vals).expect("finite values")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_finite() {
        let v = shifted_packet(0.1, 256.0, 1024);
        assert!(v.values().iter().all(|z| z.is_finite()));
        assert!((v.values()[0] - 0.1).norm() < 1e-12);
    }
}
