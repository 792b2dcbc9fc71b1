//! Uniform periodic grids and the sampled fields that live on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic grid on `[-L, L)` with `N` nodes, `N` a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    half_width: f64,
    points: usize,
}

impl SpatialGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Grid(format!("half width must be positive, got {half_width}")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::Grid(format!("point count must be a power of two, got {points}")));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.x(j)).collect()
    }

    /// Angular frequency of FFT bin `k` (standard ordering, Nyquist negative).
    pub fn freq(&self, k: usize) -> f64 {
        let n = self.points as i64;
        let k = k as i64;
        let m = if k < n / 2 { k } else { k - n };
        PI * m as f64 / self.half_width
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.freq(k)).collect()
    }

    pub fn max_freq(&self) -> f64 {
        PI / self.dx()
    }

    /// Index of the node at `x = 0`.
    pub fn origin(&self) -> usize {
        self.points / 2
    }
}

/// Complex samples on a [`SpatialGrid`], all finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexField {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("field samples"));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: SpatialGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn constant(grid: SpatialGrid, value: Complex64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&z| f(z)).collect() }
    }

    pub fn map_indexed(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().enumerate().map(|(j, &z)| f(j, z)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid, values }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete L² norm, `(dx Σ|f_j|²)^{1/2}`.
    pub fn l2(&self) -> f64 {
        (self.grid.dx() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn l1(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|z| z.norm()).sum::<f64>()
    }

    pub fn at_origin(&self) -> Complex64 {
        self.values[self.grid.origin()]
    }
}

/// Time-indexed fields on a shared grid with strictly monotone times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<ComplexField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<ComplexField>) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(Error::Grid(format!("{} times for {} fields", times.len(), fields.len())));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("trajectory times"));
        }
        let increasing = times.windows(2).all(|w| w[1] > w[0]);
        let decreasing = times.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::Precondition("trajectory times must be strictly monotone".into()));
        }
        if let Some(first) = fields.first() {
            if fields.iter().any(|f| f.grid() != first.grid()) {
                return Err(Error::Grid("trajectory slices on different grids".into()));
            }
        }
        Ok(Self { times, fields })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[ComplexField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> Option<&SpatialGrid> {
        self.fields.first().map(|f| f.grid())
    }

    pub fn slice(&self, i: usize) -> (f64, &ComplexField) {
        (self.times[i], &self.fields[i])
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<ComplexField>) {
        (self.times, self.fields)
    }

    /// Same trajectory with time order reversed.
    pub fn reversed(&self) -> Self {
        Self {
            times: self.times.iter().rev().copied().collect(),
            fields: self.fields.iter().rev().cloned().collect(),
        }
    }
}

/// Logarithmic time grid from `t0` to `t1` with `per_decade` intervals per decade.
pub fn log_times(t0: f64, t1: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t1 / t0).log10().abs();
    let n = ((per_decade as f64 * decades).round() as usize).max(1);
    (0..=n).map(|i| t0 * (t1 / t0).powf(i as f64 / n as f64)).collect()
}
