//! Self-similar binormal-flow profile: the Frenet system with `c = a`, `τ = x/2`,
//! its limiting tangents `A±`, the corner angle and the snapshots `√t G(x/√t)`.

use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::frame::{self, add, angle, axpy, norm, normalize, scale, sub, Frame, SkewCoeffs, Vec3};
use crate::quadrature::{hermite, hermite_integral};

/// Drift beyond which an integration is rejected.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// Extrapolation spread beyond which the tail range is declared too short.
pub const SPREAD_LIMIT: f64 = 1e-3;
/// Abscissa below which the tail correction `2c/x·b` is not applied.
const CORRECTION_FLOOR: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Re-orthonormalize after every step.
    pub project: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { project: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolution {
    pub a: f64,
    pub dx: f64,
    /// Nodes `x_j = (j − M)·dx`, `j = 0..=2M`.
    pub x: Vec<f64>,
    pub frames: Vec<Frame>,
    pub g: Vec<Vec3>,
    pub curvature: Vec<f64>,
    pub max_drift: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerData {
    pub a: f64,
    pub a_plus: Vec3,
    pub a_minus: Vec3,
    pub theta: f64,
    pub kappa_fit: f64,
    pub spread: f64,
}

/// Step giving `dx·max(a, X/2) = 0.01`.
pub fn default_step(a: f64, half_range: f64) -> f64 {
    0.01 / a.max(0.5 * half_range).max(1e-12)
}

/// Closed-form law `sin(θ/2) = e^{−a²/2}`, i.e. `θ = 2 arcsin e^{−a²/2}`.
pub fn theta_formula(a: f64) -> f64 {
    2.0 * (-0.5 * a * a).exp().asin()
}

fn check_step(a: f64, half_range: f64, dx: f64) -> Result<()> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Precondition(format!("amplitude must be nonnegative, got {a}")));
    }
    if !(half_range > 0.0 && dx > 0.0) {
        return Err(Error::Precondition("range and step must be positive".into()));
    }
    if dx * a.max(0.5 * half_range) > 0.1 + 1e-12 {
        return Err(Error::Precondition(format!(
            "dx·max(a, X/2) = {:.3e} exceeds 0.1",
            dx * a.max(0.5 * half_range)
        )));
    }
    Ok(())
}

/// Integrate a Frenet system with coefficients `(c(x), τ(x))` outward from `x = 0`
/// in both directions, starting from the identity frame, storing every node.
pub fn integrate_symmetric(
    c: impl Fn(f64) -> f64,
    tau: impl Fn(f64) -> f64,
    g0: Vec3,
    half_range: f64,
    dx: f64,
    opts: ProfileOptions,
) -> Result<ProfileSolution> {
    let m = (half_range / dx).ceil() as usize;
    let h = half_range / m as f64;
    let coeffs = |s: f64| SkewCoeffs::frenet(c(s), tau(s));
    let mut frames = vec![Frame::IDENTITY; 2 * m + 1];
    let mut drift: f64 = 0.0;
    for dir in [1.0, -1.0] {
        frame::integrate(Frame::IDENTITY, 0.0, dir * h, m, coeffs, opts.project, |i, _, f| {
            let j = if dir > 0.0 { m + i } else { m - i };
            frames[j] = *f;
            drift = drift.max(f.defect());
        });
    }
    if drift > DRIFT_LIMIT {
        return Err(Error::Resolution { drift, limit: DRIFT_LIMIT });
    }
    let x: Vec<f64> = (0..=2 * m).map(|j| (j as f64 - m as f64) * h).collect();
    let curvature: Vec<f64> = x.iter().map(|&s| c(s)).collect();
    let mut g = vec![g0; 2 * m + 1];
    for dir in [1isize, -1] {
        let mut acc = g0;
        for i in 1..=m {
            let (j0, j1) = ((m as isize + dir * (i as isize - 1)) as usize, (m as isize + dir * i as isize) as usize);
            let hh = x[j1] - x[j0];
            let d0 = scale(curvature[j0], frames[j0].n);
            let d1 = scale(curvature[j1], frames[j1].n);
            for k in 0..3 {
                acc[k] += 0.5 * hh * (frames[j0].t[k] + frames[j1].t[k]) + hh * hh / 12.0 * (d0[k] - d1[k]);
            }
            g[j1] = acc;
        }
    }
    Ok(ProfileSolution { a: c(0.0), dx: h, x, frames, g, curvature, max_drift: drift })
}

/// The self-similar profile on `[−X, X]`.
pub fn integrate_profile(a: f64, half_range: f64, dx: f64) -> Result<ProfileSolution> {
    integrate_profile_with(a, half_range, dx, ProfileOptions::default())
}

pub fn integrate_profile_with(a: f64, half_range: f64, dx: f64, opts: ProfileOptions) -> Result<ProfileSolution> {
    check_step(a, half_range, dx)?;
    let mut p = integrate_symmetric(|_| a, |x| 0.5 * x, [0.0, 0.0, 2.0 * a], half_range, dx, opts)?;
    p.a = a;
    Ok(p)
}

/// Corrected tail estimator `T + (2c/x) b`, pure `T` for `|x| < 1`.
pub fn corrected_tangent(f: &Frame, c: f64, x: f64) -> Vec3 {
    if x.abs() < CORRECTION_FLOOR {
        f.t
    } else {
        axpy(f.t, 2.0 * c / x, f.b)
    }
}

/// Fit `Q(x) ≈ A + B/x²` componentwise; returns `A`.
fn fit_limit(samples: &[(f64, Vec3)]) -> Vec3 {
    let rows: Vec<Vec<f64>> = samples.iter().map(|(x, _)| vec![1.0, 1.0 / (x * x)]).collect();
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let y: Vec<f64> = samples.iter().map(|(_, q)| q[k]).collect();
        *o = least_squares(&rows, &y)[0];
    }
    out
}

/// Extrapolated limit from tail samples of the corrected estimator, with the
/// spread between fits on the two halves of the sample window.
pub fn extrapolate_tail(samples: &[(f64, Vec3)]) -> Result<(Vec3, f64)> {
    if samples.len() < 8 {
        return Err(Error::Precondition("too few tail samples".into()));
    }
    let full = fit_limit(samples);
    let half = samples.len() / 2;
    let lo = fit_limit(&samples[..half]);
    let hi = fit_limit(&samples[half..]);
    let spread = norm(sub(lo, hi));
    if spread > SPREAD_LIMIT {
        return Err(Error::Extrapolation { spread, limit: SPREAD_LIMIT });
    }
    Ok((normalize(full), spread))
}

/// `A±` from a stored profile.
pub fn limiting_tangents(p: &ProfileSolution) -> Result<CornerData> {
    let half_range = *p.x.last().unwrap();
    if half_range < 20.0 / p.a.max(0.1) * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "tail range X = {half_range} below 20/max(a, 0.1)"
        )));
    }
    let m = p.x.len() / 2;
    let start = 0.5 * half_range;
    let stride = (m / 2000).max(1);
    let collect = |dir: isize| -> Vec<(f64, Vec3)> {
        (0..=m)
            .step_by(stride)
            .map(|i| (m as isize + dir * i as isize) as usize)
            .filter(|&j| p.x[j].abs() >= start)
            .map(|j| (p.x[j].abs(), corrected_tangent(&p.frames[j], p.curvature[j], p.x[j])))
            .collect()
    };
    let (a_plus, s1) = extrapolate_tail(&collect(1))?;
    let (a_minus, s2) = extrapolate_tail(&collect(-1))?;
    Ok(corner_from(p.a, a_plus, a_minus, s1.max(s2)))
}

fn corner_from(a: f64, a_plus: Vec3, a_minus: Vec3, spread: f64) -> CornerData {
    let theta = angle(a_plus, scale(-1.0, a_minus));
    let kappa_fit = if a > 0.0 { -(0.5 * theta).sin().ln() / (a * a) } else { f64::NAN };
    CornerData { a, a_plus, a_minus, theta, kappa_fit, spread }
}

/// Tail limit along one direction without storing the profile.
pub fn tail_limit(a: f64, half_range: f64, dx: f64, dir: f64, opts: ProfileOptions) -> Result<(Vec3, f64, f64)> {
    check_step(a, half_range, dx)?;
    let m = (half_range / dx).ceil() as usize;
    let h = half_range / m as f64;
    let stride = (m / 4000).max(1);
    let mut samples = Vec::new();
    let mut drift: f64 = 0.0;
    frame::integrate(
        Frame::IDENTITY,
        0.0,
        dir * h,
        m,
        |s| SkewCoeffs::frenet(a, 0.5 * s),
        opts.project,
        |i, s, f| {
            drift = drift.max(f.defect());
            if i % stride == 0 && s.abs() >= 0.5 * half_range {
                samples.push((s.abs(), corrected_tangent(f, a, s)));
            }
        },
    );
    if drift > DRIFT_LIMIT {
        return Err(Error::Resolution { drift, limit: DRIFT_LIMIT });
    }
    let (lim, spread) = extrapolate_tail(&samples)?;
    Ok((lim, spread, drift))
}

/// Default tail range for the corner measurement.
pub fn default_half_range(a: f64) -> f64 {
    (20.0 / a.max(0.1)).max(40.0)
}

/// Corner data for one amplitude (`kappa_fit` holds the single-point value `−ln sin(θ/2)/a²`).
pub fn corner_angle(a: f64) -> Result<CornerData> {
    if !(a > 0.0 && a <= 1.5) {
        return Err(Error::Precondition(format!("corner angle needs 0 < a ≤ 1.5, got {a}")));
    }
    let x = default_half_range(a);
    corner_angle_with(a, x, default_step(a, x))
}

pub fn corner_angle_with(a: f64, half_range: f64, dx: f64) -> Result<CornerData> {
    let opts = ProfileOptions::default();
    let (a_plus, s1, _) = tail_limit(a, half_range, dx, 1.0, opts)?;
    let (a_minus, s2, _) = tail_limit(a, half_range, dx, -1.0, opts)?;
    Ok(corner_from(a, a_plus, a_minus, s1.max(s2)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerSweep {
    pub rows: Vec<CornerData>,
    pub kappa: f64,
    /// RMS of `ln sin(θ/2) + κa²` over the sweep.
    pub residual: f64,
}

/// Corner angles over a sweep of amplitudes and the one-parameter fit
/// `sin(θ/2) = e^{−κa²}`.
pub fn corner_sweep(amplitudes: &[f64]) -> Result<CornerSweep> {
    let mut rows = amplitudes.iter().map(|&a| corner_angle(a)).collect::<Result<Vec<_>>>()?;
    let (kappa, residual) = fit_kappa(&rows);
    rows.iter_mut().for_each(|r| r.kappa_fit = kappa);
    Ok(CornerSweep { rows, kappa, residual })
}

pub fn fit_kappa(rows: &[CornerData]) -> (f64, f64) {
    let xs: Vec<f64> = rows.iter().map(|r| r.a * r.a).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (0.5 * r.theta).sin().ln()).collect();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let kappa = -sxy / sxx;
    let rms = (xs.iter().zip(&ys).map(|(x, y)| (y + kappa * x).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    (kappa, rms)
}

impl ProfileSolution {
    pub fn half_range(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn locate(&self, y: f64) -> Result<(usize, f64)> {
        let xr = self.half_range();
        if y.abs() > xr * (1.0 + 1e-12) {
            return Err(Error::OutOfRange(format!("abscissa {y} outside profile range ±{xr}")));
        }
        let m = self.x.len() / 2;
        let pos = (y / self.dx + m as f64).clamp(0.0, (2 * m) as f64);
        let j = (pos.floor() as usize).min(2 * m - 1);
        Ok((j, pos - j as f64))
    }

    /// `G(y)` by cubic Hermite interpolation with `G' = T`.
    pub fn g_at(&self, y: f64) -> Result<Vec3> {
        let (j, _) = self.locate(y)?;
        let (x0, x1) = (self.x[j], self.x[j + 1]);
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = hermite(x0, x1, self.g[j][k], self.g[j + 1][k], self.frames[j].t[k], self.frames[j + 1].t[k], y);
        }
        Ok(out)
    }

    /// `T(y)` by cubic Hermite interpolation with `T' = c n`, renormalized.
    pub fn tangent_at(&self, y: f64) -> Result<Vec3> {
        let (j, _) = self.locate(y)?;
        let (x0, x1) = (self.x[j], self.x[j + 1]);
        let d0 = scale(self.curvature[j], self.frames[j].n);
        let d1 = scale(self.curvature[j + 1], self.frames[j + 1].n);
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = hermite(x0, x1, self.frames[j].t[k], self.frames[j + 1].t[k], d0[k], d1[k], y);
        }
        Ok(normalize(out))
    }

    /// `∫₀^y T` from the stored G, i.e. `G(y) − G(0)`, through the Hermite antiderivative.
    pub fn tangent_integral(&self, y: f64) -> Result<Vec3> {
        let (j, _) = self.locate(y)?;
        let (x0, x1) = (self.x[j], self.x[j + 1]);
        let d0 = scale(self.curvature[j], self.frames[j].n);
        let d1 = scale(self.curvature[j + 1], self.frames[j + 1].n);
        let g0 = self.g[self.x.len() / 2];
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.g[j][k] - g0[k]
                + hermite_integral(x0, x1, self.frames[j].t[k], self.frames[j + 1].t[k], d0[k], d1[k], y);
        }
        Ok(out)
    }
}

/// `χ(t, x) = √t G(x/√t)` with tangents `T(x/√t)`.
pub fn selfsimilar_snapshot(p: &ProfileSolution, t: f64, xs: &[f64]) -> Result<Curve> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("snapshot time must be positive, got {t}")));
    }
    let r = t.sqrt();
    let mut chi = Vec::with_capacity(xs.len());
    let mut tangent = Vec::with_capacity(xs.len());
    for &x in xs {
        chi.push(scale(r, p.g_at(x / r)?));
        tangent.push(p.tangent_at(x / r)?);
    }
    Ok(Curve { t, x: xs.to_vec(), chi, tangent })
}

/// `sup_y |G(y) − A± y|` over the stored profile, the deviation from the corner at `t = 1`.
pub fn corner_deviation(p: &ProfileSolution, corner: &CornerData) -> f64 {
    p.x.iter()
        .zip(&p.g)
        .map(|(&y, g)| {
            let a = if y >= 0.0 { corner.a_plus } else { corner.a_minus };
            norm(axpy(*g, -y, a))
        })
        .fold(0.0, f64::max)
}

/// `|∫₀^x (T(s/√t) − A+) ds| = √t |G(X) − G(0) − A+ X|`, `X = x/√t`, for each `t`.
pub fn weak_limit_check(p: &ProfileSolution, a_plus: Vec3, x: f64, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    times
        .iter()
        .map(|&t| {
            let r = t.sqrt();
            let y = x / r;
            let d = axpy(p.tangent_integral(y)?, -y, a_plus);
            Ok((t, r * norm(d)))
        })
        .collect()
}

/// `sup_{y≥1} y |T(y) − A+|`, the constant in `|T(y) − A+| ≤ C/y`.
pub fn tail_constant(p: &ProfileSolution, a_plus: Vec3) -> f64 {
    p.x.iter()
        .zip(&p.frames)
        .filter(|(&y, _)| y >= 1.0)
        .map(|(&y, f)| y * norm(sub(f.t, a_plus)))
        .fold(0.0, f64::max)
}

/// `A−` predicted from `A+` by the symmetry `T(−x) = diag(1,−1,−1) T(x)`.
pub fn mirror(v: Vec3) -> Vec3 {
    [v[0], -v[1], -v[2]]
}

/// `sup |(T + (2a/x) b)' + (2a/x²) b|` by centered differences on `|x| ≥ x_min`.
pub fn tail_identity_residual(p: &ProfileSolution, x_min: f64) -> f64 {
    let a = p.a;
    (1..p.x.len() - 1)
        .filter(|&j| p.x[j].abs() >= x_min)
        .map(|j| {
            let q = |k: usize| axpy(p.frames[k].t, 2.0 * a / p.x[k], p.frames[k].b);
            let dq = scale(0.5 / p.dx, sub(q(j + 1), q(j - 1)));
            norm(add(dq, scale(2.0 * a / (p.x[j] * p.x[j]), p.frames[j].b)))
        })
        .fold(0.0, f64::max)
}
