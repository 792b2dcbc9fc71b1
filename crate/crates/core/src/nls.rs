//! Split-step evolution of `i v_t + v_xx ± (1/t)(|v|² − a²) v = 0` with
//! logarithmic time stepping, the normalized energy and its dissipation law.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, SpatialGrid, Trajectory};
use crate::norms::homogeneous;
use crate::spectral::{fft_in_place, ifft_in_place};

/// Sign of the nonlinearity: `+1` focusing, `−1` defocusing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "focusing")]
    Focusing,
    #[serde(rename = "defocusing")]
    Defocusing,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub a: f64,
    pub sign: Sign,
    pub t_start: f64,
    pub t_end: f64,
    /// Step in `log t`: each step advances `t ↦ t·e^{dt}` (or less to land on outputs).
    pub dt: f64,
    pub grid: SpatialGrid,
}

/// Default log step.
pub const DEFAULT_LOG_STEP: f64 = 0.0025;

impl EvolutionConfig {
    /// Default resolution: `L = 40`, `N = 4096`, log step [`DEFAULT_LOG_STEP`].
    pub fn with_defaults(a: f64, sign: Sign, t_start: f64, t_end: f64) -> Self {
        let grid = SpatialGrid::new(40.0, 4096).expect("default grid");
        Self { a, sign, t_start, t_end, dt: DEFAULT_LOG_STEP, grid }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start > 0.0 && self.t_end > 0.0) {
            return Err(Error::Precondition("times must be positive (1/t coefficient)".into()));
        }
        if self.t_start == self.t_end {
            return Err(Error::Precondition("t_start equals t_end".into()));
        }
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(Error::Precondition(format!("log step must lie in (0, 0.1], got {}", self.dt)));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::Precondition(format!("amplitude must be nonnegative, got {}", self.a)));
        }
        Ok(())
    }
}

/// Reusable split-step propagator on a fixed grid.
pub struct SplitStep {
    a2: f64,
    sign: f64,
    xi2: Vec<f64>,
}

impl SplitStep {
    pub fn new(grid: &SpatialGrid, a: f64, sign: Sign) -> Self {
        Self { a2: a * a, sign: sign.value(), xi2: grid.freqs().iter().map(|x| x * x).collect() }
    }

    /// Exact flow of `v_t = ±i(1/t)(|v|² − a²)v` from `t1` to `t2`.
    pub fn nonlinear(&self, v: &mut [Complex64], t1: f64, t2: f64) {
        let d = self.sign * (t2 / t1).ln();
        for z in v.iter_mut() {
            *z *= Complex64::from_polar(1.0, d * (z.norm_sqr() - self.a2));
        }
    }

    /// `e^{i(t2−t1)∂²}` applied in place.
    pub fn linear(&self, v: &mut [Complex64], t1: f64, t2: f64) {
        let dt = t2 - t1;
        fft_in_place(v);
        for (z, &k2) in v.iter_mut().zip(&self.xi2) {
            *z *= Complex64::from_polar(1.0, -dt * k2);
        }
        ifft_in_place(v);
    }

    /// One Strang step `N(t1→tm) L(t1→t2) N(tm→t2)`, `tm` the arithmetic midpoint.
    pub fn step(&self, v: &mut [Complex64], t1: f64, t2: f64) {
        let tm = 0.5 * (t1 + t2);
        self.nonlinear(v, t1, tm);
        self.linear(v, t1, t2);
        self.nonlinear(v, tm, t2);
    }
}

/// Geometric substeps from `t1` to `t2` with log step at most `h`.
fn substeps(t1: f64, t2: f64, h: f64) -> Vec<f64> {
    let n = (((t2 / t1).ln().abs() / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (0..=n).map(|i| if i == n { t2 } else { t1 * (t2 / t1).powf(i as f64 / n as f64) }).collect()
}

/// Evolve `v0` from `cfg.t_start` to `cfg.t_end`, storing slices at `outputs`
/// (which must lie in the interval; `t_start` is always stored). Backward runs allowed.
pub fn evolve_v(v0: &ComplexField, cfg: &EvolutionConfig, outputs: &[f64]) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut fields = Vec::new();
    evolve_v_visit(v0, cfg, outputs, |t, f| {
        times.push(t);
        fields.push(f.clone());
        Ok(())
    })?;
    Trajectory::new(times, fields)
}

/// Streaming form of [`evolve_v`]: `visit` sees the start and every output time in order
/// without the trajectory being stored.
pub fn evolve_v_visit(
    v0: &ComplexField,
    cfg: &EvolutionConfig,
    outputs: &[f64],
    mut visit: impl FnMut(f64, &ComplexField) -> Result<()>,
) -> Result<()> {
    cfg.validate()?;
    if v0.grid() != &cfg.grid {
        return Err(Error::Grid("initial field not on the configured grid".into()));
    }
    let forward = cfg.t_end > cfg.t_start;
    let (lo, hi) = if forward { (cfg.t_start, cfg.t_end) } else { (cfg.t_end, cfg.t_start) };
    let mut stops: Vec<f64> = outputs
        .iter()
        .copied()
        .filter(|&t| t != cfg.t_start)
        .map(|t| {
            if t < lo * (1.0 - 1e-12) || t > hi * (1.0 + 1e-12) {
                Err(Error::OutOfRange(format!("output time {t} outside [{lo}, {hi}]")))
            } else {
                Ok(t)
            }
        })
        .collect::<Result<_>>()?;
    stops.sort_by(|a, b| if forward { a.total_cmp(b) } else { b.total_cmp(a) });
    stops.dedup();
    let limit = 10.0 * (cfg.a + v0.sup());
    let prop = SplitStep::new(&cfg.grid, cfg.a, cfg.sign);
    let mut v = v0.values().to_vec();
    visit(cfg.t_start, v0)?;
    let mut t = cfg.t_start;
    for &stop in &stops {
        let ts = substeps(t, stop, cfg.dt);
        for w in ts.windows(2) {
            prop.step(&mut v, w[0], w[1]);
            if cfg.sign == Sign::Focusing {
                let sup = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if !(sup <= limit) {
                    return Err(Error::BlowUp { t: w[1], sup, limit });
                }
            }
        }
        t = stop;
        visit(stop, &ComplexField::new(cfg.grid, v.clone())?)?;
    }
    Ok(())
}

/// `P = ∫(|v|² − a²)²`.
pub fn potential(v: &ComplexField, a: f64) -> f64 {
    let a2 = a * a;
    v.grid().dx() * v.values().iter().map(|z| (z.norm_sqr() - a2).powi(2)).sum::<f64>()
}

/// `E(t) = ½∫|v_x|² ∓ (1/4t)∫(|v|² − a²)²`, minus for focusing.
pub fn energy(v: &ComplexField, t: f64, a: f64, sign: Sign) -> f64 {
    let k = homogeneous(v, 1);
    0.5 * k * k - sign.value() / (4.0 * t) * potential(v, a)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyResidual {
    pub t: Vec<f64>,
    pub energy: Vec<f64>,
    /// `dE/dt − (±)P/(4t²)` at interior slices.
    pub residual: Vec<f64>,
    /// `residual / max(max|dE/dt|, 1e−14)`.
    pub relative: Vec<f64>,
}

impl EnergyResidual {
    pub fn max_relative(&self) -> f64 {
        self.relative.iter().map(|r| r.abs()).fold(0.0, f64::max)
    }
}

/// Residual of `∂_t E = ±(1/4t²)∫(|v|² − a²)²` from three-point nonuniform
/// centered differences in `t`.
pub fn energy_law_residual(traj: &Trajectory, a: f64, sign: Sign) -> Result<EnergyResidual> {
    if traj.len() < 3 {
        return Err(Error::Precondition("energy law needs at least three slices".into()));
    }
    let ts = traj.times();
    let e: Vec<f64> = traj.fields().iter().zip(ts).map(|(f, &t)| energy(f, t, a, sign)).collect();
    let mut t_out = Vec::new();
    let mut de = Vec::new();
    let mut res = Vec::new();
    for i in 1..ts.len() - 1 {
        let (h1, h2) = (ts[i] - ts[i - 1], ts[i + 1] - ts[i]);
        let d = (-h2 / (h1 * (h1 + h2))) * e[i - 1] + ((h2 - h1) / (h1 * h2)) * e[i] + (h1 / (h2 * (h1 + h2))) * e[i + 1];
        let law = sign.value() * potential(&traj.fields()[i], a) / (4.0 * ts[i] * ts[i]);
        t_out.push(ts[i]);
        de.push(d);
        res.push(d - law);
    }
    let scale = de.iter().map(|d| d.abs()).fold(0.0, f64::max).max(1e-14);
    let relative = res.iter().map(|r| r / scale).collect();
    Ok(EnergyResidual { t: t_out, energy: e, residual: res, relative })
}
