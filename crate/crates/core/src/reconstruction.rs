//! Binormal-flow reconstruction from filament data: origin frame in time, Frenet frames in
//! `x`, the curve `χ(t, x)` and the residuals that certify it.

use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::frame::{self, add, axpy, cross, norm, scale, sub, Frame, SkewCoeffs, Vec3};
use crate::hasimoto::{FilamentData, FilamentSample};
use crate::quadrature::{cumulative_cubic, hermite};

/// Orthonormality drift above which a frame integration is rejected.
pub const FRAME_DRIFT_LIMIT: f64 = 1e-6;

/// Time-system entries `(−cτ, c_x, (c_xx − cτ²)/c)` at the sample nearest the origin.
pub fn origin_coefficients(s: &FilamentSample) -> SkewCoeffs {
    let j = s.origin_index();
    SkewCoeffs { tn: -s.c[j] * s.tau[j], tb: s.c_x[j], nb: s.rotation_rate(j) }
}

/// Four-point Lagrange interpolation of `ys(xs)` at `x`, using the stencil around `i`.
fn lagrange4(xs: &[f64], ys: &[f64], i: usize, x: f64) -> f64 {
    let n = xs.len();
    if n < 4 {
        let j = i.min(n - 2);
        return ys[j] + (ys[j + 1] - ys[j]) * (x - xs[j]) / (xs[j + 1] - xs[j]);
    }
    let lo = i.saturating_sub(1).min(n - 4);
    let mut acc = 0.0;
    for a in lo..lo + 4 {
        let mut w = 1.0;
        for b in lo..lo + 4 {
            if a != b {
                w *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        acc += w * ys[a];
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginHistory {
    /// In integration order, starting at the reference time.
    pub times: Vec<f64>,
    pub frames: Vec<Frame>,
    pub c: Vec<f64>,
    pub max_drift: f64,
}

impl OriginHistory {
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-12 * t)
    }
}

/// RK4 in time for the origin frame from `samples[0]` through the rest, with stage
/// coefficients interpolated in `log t` from four neighbouring samples.
pub fn evolve_origin_frame(samples: &[FilamentSample], initial: Frame, project: bool) -> Result<OriginHistory> {
    if samples.is_empty() {
        return Err(Error::Precondition("no filament samples".into()));
    }
    let logs: Vec<f64> = samples.iter().map(|s| s.t.ln()).collect();
    if logs.windows(2).any(|w| w[1] == w[0]) || (logs.len() > 2 && logs.windows(3).any(|w| (w[1] - w[0]) * (w[2] - w[1]) <= 0.0)) {
        return Err(Error::Precondition("sample times must be strictly monotone".into()));
    }
    let k: Vec<SkewCoeffs> = samples.iter().map(origin_coefficients).collect();
    let tn: Vec<f64> = k.iter().map(|q| q.tn).collect();
    let tb: Vec<f64> = k.iter().map(|q| q.tb).collect();
    let nb: Vec<f64> = k.iter().map(|q| q.nb).collect();
    let mut frames = vec![initial];
    let mut f = initial;
    let mut drift: f64 = initial.defect();
    for i in 0..samples.len() - 1 {
        let (t0, t1) = (samples[i].t, samples[i + 1].t);
        let at = |t: f64| -> SkewCoeffs {
            if t == t0 {
                return k[i];
            }
            if t == t1 {
                return k[i + 1];
            }
            let l = t.ln();
            SkewCoeffs { tn: lagrange4(&logs, &tn, i, l), tb: lagrange4(&logs, &tb, i, l), nb: lagrange4(&logs, &nb, i, l) }
        };
        f = frame::rk4_step(&f, t0, t1 - t0, &at);
        if project {
            f = f.orthonormalized();
        }
        drift = drift.max(f.defect());
        frames.push(f);
    }
    if drift > FRAME_DRIFT_LIMIT {
        return Err(Error::Resolution { drift, limit: FRAME_DRIFT_LIMIT });
    }
    let c = samples.iter().map(|s| s.c[s.origin_index()]).collect();
    Ok(OriginHistory { times: samples.iter().map(|s| s.t).collect(), frames, c, max_drift: drift })
}

/// `χ(t, 0) = χ(t_ref, 0) − ∫_t^{t_ref} (c b)(t', 0) dt'`, the integrand taken as
/// `c b t` against `log t` and integrated by fourth-order cumulative quadrature.
pub fn origin_curve(h: &OriginHistory, chi_ref: Vec3) -> Vec<Vec3> {
    let logs: Vec<f64> = h.times.iter().map(|t| t.ln()).collect();
    let mut out = vec![chi_ref; h.times.len()];
    if h.times.len() < 2 {
        return out;
    }
    // cumulative quadrature wants ascending abscissae
    let descending = logs[1] < logs[0];
    let order: Vec<usize> = if descending { (0..logs.len()).rev().collect() } else { (0..logs.len()).collect() };
    let xs: Vec<f64> = order.iter().map(|&i| logs[i]).collect();
    for k in 0..3 {
        let ys: Vec<f64> = order.iter().map(|&i| h.c[i] * h.frames[i].b[k] * h.times[i]).collect();
        let cum = cumulative_cubic(&xs, &ys);
        let ref_pos = if descending { xs.len() - 1 } else { 0 };
        for (p, &i) in order.iter().enumerate() {
            // χ(t) − χ(t_ref) = ∫_{t_ref}^t χ_t = ∫_{log t_ref}^{log t} c b t d(log t)
            out[i][k] = chi_ref[k] + (cum[p] - cum[ref_pos]);
        }
    }
    out
}

/// Frenet frames of one slice on the grid nodes covering `[−x_max, x_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameField {
    pub t: f64,
    pub x: Vec<f64>,
    pub frames: Vec<Frame>,
    pub c: Vec<f64>,
    pub tau: Vec<f64>,
    pub max_drift: f64,
}

impl FrameField {
    fn locate(&self, x: f64) -> Result<usize> {
        let (lo, hi) = (self.x[0], *self.x.last().unwrap());
        if x < lo - 1e-12 * lo.abs().max(1.0) || x > hi + 1e-12 * hi.abs().max(1.0) {
            return Err(Error::OutOfRange(format!("abscissa {x} outside slice [{lo}, {hi}]")));
        }
        Ok(self.x.partition_point(|&s| s <= x).clamp(1, self.x.len() - 1) - 1)
    }

    /// `T(x)` by cubic Hermite interpolation with `T' = c n`.
    pub fn tangent_at(&self, x: f64) -> Result<Vec3> {
        let j = self.locate(x)?;
        let (f0, f1) = (&self.frames[j], &self.frames[j + 1]);
        let d0 = scale(self.c[j], f0.n);
        let d1 = scale(self.c[j + 1], f1.n);
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = hermite(self.x[j], self.x[j + 1], f0.t[k], f1.t[k], d0[k], d1[k], x);
        }
        Ok(out)
    }

    pub fn origin_index(&self) -> usize {
        (0..self.x.len()).min_by(|&i, &j| self.x[i].abs().total_cmp(&self.x[j].abs())).unwrap()
    }
}

/// RK4 Frenet integration of a tabulated slice outward from `x = 0`, midpoint
/// coefficients by four-point interpolation of `(c, τ̃)`.
pub fn integrate_frenet_slice(fd: &FilamentData, origin: Frame, x_max: f64, project: bool) -> Result<FrameField> {
    let g = fd.grid;
    let o = g.origin();
    let m = ((x_max / g.dx() - 1e-9).ceil() as usize).min(o).min(g.len() - 1 - o);
    if m < 2 {
        return Err(Error::Grid(format!("window ±{x_max} holds fewer than two steps")));
    }
    let xs = g.nodes();
    let rem: Vec<f64> = fd.tau.iter().zip(&xs).map(|(t, x)| t - fd.chirp * x).collect();
    let h = g.dx();
    let coeffs_at = |x: f64| -> SkewCoeffs {
        let p = (x + g.half_width()) / h;
        let i = (p.floor() as usize).min(g.len() - 2);
        if (p - p.round()).abs() < 1e-9 {
            let j = p.round() as usize;
            return SkewCoeffs::frenet(fd.c[j], fd.tau[j]);
        }
        let c = lagrange4(&xs, &fd.c, i, x);
        let r = lagrange4(&xs, &rem, i, x);
        SkewCoeffs::frenet(c, fd.chirp * x + r)
    };
    let mut frames = vec![origin; 2 * m + 1];
    let mut drift: f64 = origin.defect();
    for dir in [1.0, -1.0] {
        frame::integrate(origin, 0.0, dir * h, m, |s| coeffs_at(s), project, |i, _, f| {
            let j = if dir > 0.0 { m + i } else { m - i };
            frames[j] = *f;
            drift = drift.max(f.defect());
        });
    }
    if drift > FRAME_DRIFT_LIMIT {
        return Err(Error::Resolution { drift, limit: FRAME_DRIFT_LIMIT });
    }
    let idx = o - m..=o + m;
    Ok(FrameField {
        t: fd.t,
        x: (-(m as i64)..=m as i64).map(|i| i as f64 * h).collect(),
        frames,
        c: fd.c[idx.clone()].to_vec(),
        tau: fd.tau[idx].to_vec(),
        max_drift: drift,
    })
}

/// `χ(t, x) = χ(t, 0) + ∫₀^x T` with the Hermite-corrected trapezoid (`T' = c n`).
pub fn assemble_chi(field: &FrameField, chi_origin: Vec3) -> Curve {
    let o = field.origin_index();
    let n = field.x.len();
    let mut chi = vec![chi_origin; n];
    for dir in [1isize, -1] {
        let mut acc = chi_origin;
        let mut j = o as isize;
        loop {
            let k = j + dir;
            if k < 0 || k >= n as isize {
                break;
            }
            let (a, b) = (j as usize, k as usize);
            let hh = field.x[b] - field.x[a];
            let d0 = scale(field.c[a], field.frames[a].n);
            let d1 = scale(field.c[b], field.frames[b].n);
            for q in 0..3 {
                acc[q] += 0.5 * hh * (field.frames[a].t[q] + field.frames[b].t[q]) + hh * hh / 12.0 * (d0[q] - d1[q]);
            }
            chi[b] = acc;
            j = k;
        }
    }
    Curve { t: field.t, x: field.x.clone(), chi, tangent: field.frames.iter().map(|f| f.t).collect() }
}

/// `χ(x)` by cubic Hermite interpolation with `χ' = T`.
pub fn chi_at(curve: &Curve, x: f64) -> Result<Vec3> {
    let n = curve.x.len();
    let (lo, hi) = (curve.x[0], curve.x[n - 1]);
    if x < lo - 1e-12 * lo.abs().max(1.0) || x > hi + 1e-12 * hi.abs().max(1.0) {
        return Err(Error::OutOfRange(format!("abscissa {x} outside curve [{lo}, {hi}]")));
    }
    let j = curve.x.partition_point(|&s| s <= x).clamp(1, n - 1) - 1;
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = hermite(curve.x[j], curve.x[j + 1], curve.chi[j][k], curve.chi[j + 1][k], curve.tangent[j][k], curve.tangent[j + 1][k], x);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSolution {
    pub times: Vec<f64>,
    pub fields: Vec<FrameField>,
    pub curves: Vec<Curve>,
    pub origin: OriginHistory,
    pub origin_chi: Vec<Vec3>,
}

/// Combine the origin history with per-slice frame fields; each slice time must be one
/// of the history times.
pub fn assemble(origin: OriginHistory, fields: Vec<FrameField>, chi_ref: Vec3) -> Result<FlowSolution> {
    let origin_chi = origin_curve(&origin, chi_ref);
    let mut curves = Vec::with_capacity(fields.len());
    for f in &fields {
        let i = origin
            .index_of(f.t)
            .ok_or_else(|| Error::Precondition(format!("slice time {} missing from the origin history", f.t)))?;
        if f.frames[f.origin_index()].distance(&origin.frames[i]) > 1e-12 {
            return Err(Error::Precondition(format!("slice at t = {} does not start from the origin frame", f.t)));
        }
        curves.push(assemble_chi(f, origin_chi[i]));
    }
    Ok(FlowSolution { times: fields.iter().map(|f| f.t).collect(), fields, curves, origin, origin_chi })
}

/// Three-point derivative at the middle of a nonuniform stencil.
fn centered(t: [f64; 3], y: [f64; 3]) -> f64 {
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    -h1 / (h0 * (h0 + h1)) * y[0] + (h1 - h0) / (h0 * h1) * y[1] + h0 / (h1 * (h0 + h1)) * y[2]
}

fn centered3(t: [f64; 3], y: [Vec3; 3]) -> Vec3 {
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = centered(t, [y[0][k], y[1][k], y[2][k]]);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinormalResidual {
    pub t: f64,
    /// `T_t − T ∧ T_xx`.
    pub tangent_sup: f64,
    pub tangent_l2: f64,
    /// `χ_t − c b`.
    pub chi_sup: f64,
    pub chi_l2: f64,
}

/// Residuals at the middle of slices `i−1, i, i+1` over the interior nodes of slice `i`
/// with `|x| ≤ window`; time differences at fixed `x`, second differences in `x`.
pub fn binormal_residual(sol: &FlowSolution, i: usize, window: f64) -> Result<BinormalResidual> {
    if i == 0 || i + 1 >= sol.fields.len() {
        return Err(Error::Precondition("residual needs a slice on each side".into()));
    }
    let ts = [sol.times[i - 1], sol.times[i], sol.times[i + 1]];
    let mid = &sol.fields[i];
    let h = mid.x[1] - mid.x[0];
    let (mut ts_sup, mut ts_sq, mut cs_sup, mut cs_sq) = (0.0f64, 0.0, 0.0f64, 0.0);
    for j in 1..mid.x.len() - 1 {
        let x = mid.x[j];
        if x.abs() > window {
            continue;
        }
        let tan = [sol.fields[i - 1].tangent_at(x)?, mid.frames[j].t, sol.fields[i + 1].tangent_at(x)?];
        let t_t = centered3(ts, tan);
        let mut t_xx = [0.0; 3];
        for k in 0..3 {
            t_xx[k] = (mid.frames[j + 1].t[k] - 2.0 * mid.frames[j].t[k] + mid.frames[j - 1].t[k]) / (h * h);
        }
        let r = norm(sub(t_t, cross(mid.frames[j].t, t_xx)));
        let chis = [chi_at(&sol.curves[i - 1], x)?, sol.curves[i].chi[j], chi_at(&sol.curves[i + 1], x)?];
        let q = norm(sub(centered3(ts, chis), scale(mid.c[j], mid.frames[j].b)));
        ts_sup = ts_sup.max(r);
        cs_sup = cs_sup.max(q);
        ts_sq += r * r * h;
        cs_sq += q * q * h;
    }
    Ok(BinormalResidual { t: ts[1], tangent_sup: ts_sup, tangent_l2: ts_sq.sqrt(), chi_sup: cs_sup, chi_l2: cs_sq.sqrt() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResidual {
    pub t: f64,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl EvolutionResidual {
    pub fn sup(&self) -> f64 {
        self.first.iter().chain(&self.second).fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_samples(s: &[FilamentSample]) -> Result<()> {
    if s.len() < 3 {
        return Err(Error::Precondition("need at least three samples in time".into()));
    }
    if s.windows(2).any(|w| w[0].x != w[1].x) {
        return Err(Error::Precondition("samples must share abscissae".into()));
    }
    Ok(())
}

/// `c_t + 2c_xτ + cτ_x` and `τ_t − ((c_xx − cτ²)/c)_x − c_x c` at every interior time.
pub fn darios_betchov_residual(samples: &[FilamentSample]) -> Result<Vec<EvolutionResidual>> {
    check_samples(samples)?;
    Ok((1..samples.len() - 1)
        .map(|i| {
            let (a, b, c) = (&samples[i - 1], &samples[i], &samples[i + 1]);
            let ts = [a.t, b.t, c.t];
            let n = b.x.len();
            let first = (0..n).map(|j| centered(ts, [a.c[j], b.c[j], c.c[j]]) + 2.0 * b.c_x[j] * b.tau[j] + b.c[j] * b.tau_x[j]).collect();
            let second = (0..n)
                .map(|j| centered(ts, [a.tau[j], b.tau[j], c.tau[j]]) - b.rotation_rate_x(j) - b.c_x[j] * b.c[j])
                .collect();
            EvolutionResidual { t: b.t, first, second }
        })
        .collect())
}

/// Rows one and three of the `x`-system for `(α, β, γ) = (−cτ, c_x, (c_xx − cτ²)/c)` with
/// source `(c_t, 0, τ_t)`; the middle row holds identically.
pub fn compatibility_residual(samples: &[FilamentSample]) -> Result<Vec<EvolutionResidual>> {
    check_samples(samples)?;
    Ok((1..samples.len() - 1)
        .map(|i| {
            let (a, b, c) = (&samples[i - 1], &samples[i], &samples[i + 1]);
            let ts = [a.t, b.t, c.t];
            let n = b.x.len();
            let first = (0..n)
                .map(|j| {
                    let alpha_x = -b.c_x[j] * b.tau[j] - b.c[j] * b.tau_x[j];
                    alpha_x - b.tau[j] * b.c_x[j] - centered(ts, [a.c[j], b.c[j], c.c[j]])
                })
                .collect();
            let second = (0..n)
                .map(|j| b.rotation_rate_x(j) + b.c[j] * b.c_x[j] - centered(ts, [a.tau[j], b.tau[j], c.tau[j]]))
                .collect();
            EvolutionResidual { t: b.t, first, second }
        })
        .collect())
}

/// `sup |χ(t, x) − χ_path(t, x)|` where `χ_path` integrates `c b` in time at fixed `x` from
/// the first slice; slices must be dense in time for the quadrature to resolve.
pub fn path_independence(sol: &FlowSolution, xs: &[f64]) -> Result<f64> {
    let n = sol.fields.len();
    if n < 3 {
        return Err(Error::Precondition("need at least three slices".into()));
    }
    let logs: Vec<f64> = sol.times.iter().map(|t| t.ln()).collect();
    let descending = logs[1] < logs[0];
    let order: Vec<usize> = if descending { (0..n).rev().collect() } else { (0..n).collect() };
    let ls: Vec<f64> = order.iter().map(|&i| logs[i]).collect();
    let start = if descending { n - 1 } else { 0 };
    let mut worst: f64 = 0.0;
    for &x in xs {
        let mut cb = Vec::with_capacity(n);
        for &i in &order {
            let f = &sol.fields[i];
            let j = f.locate(x)?;
            let w = (x - f.x[j]) / (f.x[j + 1] - f.x[j]);
            let b = axpy(scale(1.0 - w, f.frames[j].b), w, f.frames[j + 1].b);
            let c = (1.0 - w) * f.c[j] + w * f.c[j + 1];
            cb.push(scale(c * sol.times[i], b));
        }
        let base = chi_at(&sol.curves[0], x)?;
        let mut cums = Vec::new();
        for k in 0..3 {
            cums.push(cumulative_cubic(&ls, &cb.iter().map(|v| v[k]).collect::<Vec<_>>()));
        }
        for (p, &i) in order.iter().enumerate() {
            let mut path = base;
            for k in 0..3 {
                path[k] += cums[k][p] - cums[k][start];
            }
            worst = worst.max(norm(sub(path, chi_at(&sol.curves[i], x)?)));
        }
    }
    Ok(worst)
}

/// Frames at the origin rotated into the gauge `ñ + i b̃ = e^{iφ/2}(n + i b)`.
pub fn gauge_frame(f: &Frame, phi: f64) -> Frame {
    f.rotate_normal(0.5 * phi)
}

/// Add a constant vector to every point of a curve.
pub fn translate(curve: &Curve, v: Vec3) -> Curve {
    Curve { chi: curve.chi.iter().map(|c| add(*c, v)).collect(), ..curve.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{log_times, SpatialGrid};
    use crate::profile::integrate_profile;

    fn selfsimilar_flow(a: f64, n: usize, h: f64, x_max: f64) -> (FlowSolution, Vec<FilamentSample>) {
        let grid = SpatialGrid::new(4.0, n).unwrap();
        let times: Vec<f64> = log_times(0.5, 1.0, 1).into_iter().rev().collect::<Vec<_>>();
        let steps = ((1.0f64 / 0.5).ln() / h).round() as usize;
        let times: Vec<f64> = if times.len() > 1 { (0..=steps).map(|i| (-(i as f64) * h).exp()).collect() } else { times };
        let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let fds: Vec<FilamentData> = times.iter().map(|&t| FilamentData::selfsimilar(a, t, grid).unwrap()).collect();
        let samples: Vec<FilamentSample> = fds.iter().map(|fd| FilamentSample::from_filament(fd, &xs)).collect();
        let origin = evolve_origin_frame(&fds.iter().map(|fd| FilamentSample::from_filament(fd, &[0.0])).collect::<Vec<_>>(), Frame::IDENTITY, false).unwrap();
        let fields = fds.iter().map(|fd| integrate_frenet_slice(fd, Frame::IDENTITY, x_max, false).unwrap()).collect();
        (assemble(origin, fields, [0.0, 0.0, 2.0 * a]).unwrap(), samples)
    }

    #[test]
    fn selfsimilar_flow_matches_profile() {
        let a = 0.4;
        let (sol, samples) = selfsimilar_flow(a, 1024, 0.01, 2.0);
        let p = integrate_profile(a, 4.0, 1e-3).unwrap();
        for (t, curve) in sol.times.iter().zip(&sol.curves).step_by(10) {
            for (x, chi) in curve.x.iter().zip(&curve.chi).step_by(16) {
                let exact = scale(t.sqrt(), p.g_at(x / t.sqrt()).unwrap());
                assert!(norm(sub(*chi, exact)) < 1e-6, "t={t} x={x}");
            }
            assert!(curve.arclength_defect() < 1e-4);
        }
        assert!(sol.origin.frames.iter().all(|f| f.distance(&Frame::IDENTITY) < 1e-10));
        let db = darios_betchov_residual(&samples).unwrap();
        assert!(db.iter().all(|r| r.sup() < 1e-3));
        let cp = compatibility_residual(&samples).unwrap();
        assert!(cp.iter().zip(&db).all(|(p, q)| (p.sup() - q.sup()).abs() < 1e-12));
        assert!(path_independence(&sol, &[-1.0, 0.3, 1.5]).unwrap() < 1e-5);
    }

    #[test]
    fn straight_filament_is_static() {
        let grid = SpatialGrid::new(4.0, 256).unwrap();
        let fd = FilamentData::new(grid, vec![1e-300; 256], vec![0.0; 256], 0.0, 0.0, 1.0).unwrap();
        let f = integrate_frenet_slice(&fd, Frame::IDENTITY, 2.0, false).unwrap();
        assert!(f.frames.iter().all(|g| g.distance(&Frame::IDENTITY) < 1e-15), "{:?}", f.frames[0]);
        let curve = assemble_chi(&f, [0.0; 3]);
        assert!(curve.chi.iter().zip(&curve.x).all(|(c, x)| norm(sub(*c, [*x, 0.0, 0.0])) < 1e-13));
    }

    #[test]
    fn residuals_converge_at_second_order() {
        let a = 0.4;
        let run = |n: usize, h: f64| {
            let (sol, samples) = selfsimilar_flow(a, n, h, 2.0);
            let mid = sol.fields.len() / 2;
            let r = binormal_residual(&sol, mid, 1.5).unwrap();
            let db = darios_betchov_residual(&samples).unwrap()[mid - 1].sup();
            (r.tangent_sup, r.chi_sup, db)
        };
        let (t1, c1, d1) = run(512, 0.02);
        let (t2, c2, d2) = run(1024, 0.01);
        assert!(t1 / t2 > 3.5, "{}", t1 / t2);
        assert!(c1 / c2 > 3.5, "{}", c1 / c2);
        assert!(d1 / d2 > 3.5, "{}", d1 / d2);
    }
}
