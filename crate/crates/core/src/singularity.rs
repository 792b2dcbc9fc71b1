//! Comparison of a reconstructed flow with the self-similar one: tangent deviations by
//! regime, the trace at `t = 0`, the corner cone and the tangent limits `A±(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::frame::{angle, axpy, norm, scale, sub, Frame, Vec3};
use crate::pipeline::PipelineOutput;
use crate::profile::{extrapolate_tail, CornerData, ProfileSolution};
use crate::quadrature::hermite;
use crate::reconstruction::{chi_at, FlowSolution, FrameField};

/// Self-similar frame `(T_a, n_a, b_a)(y)` by cubic Hermite interpolation of the stored
/// profile, using the Frenet derivatives with `c = a`, `τ = y/2`.
pub fn profile_frame_at(p: &ProfileSolution, y: f64) -> Result<Frame> {
    let xr = p.half_range();
    if y.abs() > xr * (1.0 + 1e-12) {
        return Err(Error::OutOfRange(format!("abscissa {y} outside profile range ±{xr}")));
    }
    let m = p.x.len() / 2;
    let j = (((y / p.dx) + m as f64).floor() as usize).min(2 * m - 1);
    let (x0, x1) = (p.x[j], p.x[j + 1]);
    let deriv = |k: usize| {
        let (f, c, tau) = (&p.frames[k], p.a, 0.5 * p.x[k]);
        Frame {
            t: scale(c, f.n),
            n: axpy(scale(-c, f.t), tau, f.b),
            b: scale(-tau, f.n),
        }
    };
    let (d0, d1) = (deriv(j), deriv(j + 1));
    let h = |a: Vec3, b: Vec3, da: Vec3, db: Vec3| -> Vec3 {
        let mut o = [0.0; 3];
        for k in 0..3 {
            o[k] = hermite(x0, x1, a[k], b[k], da[k], db[k], y);
        }
        o
    };
    let (f0, f1) = (&p.frames[j], &p.frames[j + 1]);
    Ok(Frame { t: h(f0.t, f1.t, d0.t, d1.t), n: h(f0.n, f1.n, d0.n, d1.n), b: h(f0.b, f1.b, d0.b, d1.b) })
}

/// `Σ² = |T − T_a|² + |Ñ − N_a|²` with `N = n + i b`.
fn sigma(f: &Frame, g: &Frame) -> f64 {
    let d = |u: Vec3, v: Vec3| norm(sub(u, v)).powi(2);
    (d(f.t, g.t) + d(f.n, g.n) + d(f.b, g.b)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub t: f64,
    /// `sup |T − T_a|` over `|x| ≤ M√t`.
    pub inner: f64,
    /// `sup |T − T_a|` over `M√t < |x| ≤ X`.
    pub outer: f64,
    /// `|T − T_a|` at the origin.
    pub origin: f64,
    /// Gauged `Σ(t, 0)`.
    pub sigma_origin: f64,
    pub sigma_inner: f64,
    /// `e^{Ma/2}Σ(t, 0) + e^{Ma/2} M √t sup(|c − c_a| + |τ − τ_a|)`.
    pub sigma_bound: f64,
}

impl RegimeRow {
    /// Left side below right side up to an absolute discretization floor.
    pub fn bound_holds(&self, floor: f64) -> bool {
        self.sigma_inner <= self.sigma_bound + floor
    }
}

/// Per-slice deviation from `T_a(x/√t)`; `phases[i]` is `φ(t_i, 0)` for the gauge
/// `ñ + i b̃ = e^{iφ/2}(n + i b)`.
pub fn tangent_deviation(sol: &FlowSolution, p: &ProfileSolution, phases: &[f64], m: f64) -> Result<Vec<RegimeRow>> {
    if phases.len() != sol.fields.len() {
        return Err(Error::Precondition("one phase per slice required".into()));
    }
    let a = p.a;
    sol.fields
        .iter()
        .zip(phases)
        .map(|(f, &phi)| {
            let r = f.t.sqrt();
            let split = m * r;
            let (c_a, mut inner, mut outer, mut sig, mut src) = (a / r, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
            let mut at_origin = (0.0, 0.0);
            for (j, &x) in f.x.iter().enumerate() {
                let fa = profile_frame_at(p, x / r)?;
                let dev = norm(sub(f.frames[j].t, fa.t));
                if x.abs() <= split {
                    inner = inner.max(dev);
                    let s = sigma(&f.frames[j].rotate_normal(0.5 * phi), &fa);
                    sig = sig.max(s);
                    src = src.max((f.c[j] - c_a).abs() + (f.tau[j] - x / (2.0 * f.t)).abs());
                    if x == 0.0 {
                        at_origin = (dev, s);
                    }
                } else {
                    outer = outer.max(dev);
                }
            }
            let e = (0.5 * m * a).exp();
            Ok(RegimeRow {
                t: f.t,
                inner,
                outer,
                origin: at_origin.0,
                sigma_origin: at_origin.1,
                sigma_inner: sig,
                sigma_bound: e * at_origin.1 + e * split * src,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub x: Vec<f64>,
    pub chi0: Vec<Vec3>,
    /// `sup_x |χ(t, x) − χ₀(x)|/(a√t)` per main slice.
    pub k_by_t: Vec<(f64, f64)>,
    pub k: f64,
    /// `max/min` of `K(t)` over the smallest decade.
    pub stability: f64,
    /// `sup |χ₀'|` by differences.
    pub lipschitz: f64,
    /// `sup |χ₀ − χ₀^{(2)}|` between the three-term and two-term extrapolations.
    pub extrapolation_gap: f64,
    /// Whether the self-similar flow was subtracted before extrapolating.
    pub referenced: bool,
}

/// Self-similar flow of the same `a` whose trace `A± x` is known; subtracting it leaves
/// a deviation that is smooth in `√t` at fixed `x`.
#[derive(Clone, Copy, Debug)]
pub struct TraceReference<'a> {
    pub profile: &'a ProfileSolution,
    pub corner: &'a CornerData,
}

impl TraceReference<'_> {
    fn chi(&self, t: f64, x: f64) -> Result<Vec3> {
        let r = t.sqrt();
        Ok(scale(r, self.profile.g_at(x / r)?))
    }

    fn trace(&self, x: f64) -> Vec3 {
        if x > 0.0 {
            scale(x, self.corner.a_plus)
        } else if x < 0.0 {
            scale(x, self.corner.a_minus)
        } else {
            [0.0; 3]
        }
    }
}

/// `χ₀` by least squares in `(1, √t, t)` over the slices of `times` within the smallest
/// decade, then the Cauchy constant `K` over all of `times`. With a reference the fit is
/// applied to `χ − χ_a` and the known trace of `χ_a` added back.
pub fn extract_trace(sol: &FlowSolution, times: &[f64], xs: &[f64], a: f64, reference: Option<TraceReference>) -> Result<Trace> {
    let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
    let idx = |t: f64| {
        sol.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * t)
            .ok_or_else(|| Error::Precondition(format!("time {t} not among the slices")))
    };
    let near: Vec<usize> = times.iter().filter(|&&t| t <= 10.0 * t_min * (1.0 + 1e-9)).map(|&t| idx(t)).collect::<Result<_>>()?;
    if near.len() < 3 {
        return Err(Error::Precondition("need three slices in the smallest decade".into()));
    }
    let rows3: Vec<Vec<f64>> = near.iter().map(|&i| vec![1.0, sol.times[i].sqrt(), sol.times[i]]).collect();
    let rows2: Vec<Vec<f64>> = near.iter().map(|&i| vec![1.0, sol.times[i].sqrt()]).collect();
    let mut chi0 = Vec::with_capacity(xs.len());
    let mut gap: f64 = 0.0;
    for &x in xs {
        let vals: Vec<Vec3> = near
            .iter()
            .map(|&i| {
                let c = chi_at(&sol.curves[i], x)?;
                match reference {
                    Some(r) => Ok(sub(c, r.chi(sol.times[i], x)?)),
                    None => Ok(c),
                }
            })
            .collect::<Result<_>>()?;
        let mut c3 = [0.0; 3];
        let mut c2 = [0.0; 3];
        for k in 0..3 {
            let y: Vec<f64> = vals.iter().map(|v| v[k]).collect();
            c3[k] = least_squares(&rows3, &y)[0];
            c2[k] = least_squares(&rows2, &y)[0];
        }
        gap = gap.max(norm(sub(c3, c2)));
        chi0.push(match reference {
            Some(r) => crate::frame::add(c3, r.trace(x)),
            None => c3,
        });
    }
    let mut k_by_t = Vec::with_capacity(times.len());
    for &t in times {
        let i = idx(t)?;
        let mut worst: f64 = 0.0;
        for (x, c0) in xs.iter().zip(&chi0) {
            worst = worst.max(norm(sub(chi_at(&sol.curves[i], *x)?, *c0)));
        }
        k_by_t.push((t, worst / (a * t.sqrt())));
    }
    let k = k_by_t.iter().map(|r| r.1).fold(0.0, f64::max);
    let decade: Vec<f64> = k_by_t.iter().filter(|r| r.0 <= 10.0 * t_min * (1.0 + 1e-9)).map(|r| r.1).collect();
    let stability = decade.iter().copied().fold(0.0, f64::max) / decade.iter().copied().fold(f64::INFINITY, f64::min);
    let lipschitz = xs.windows(2).zip(chi0.windows(2)).map(|(x, c)| norm(sub(c[1], c[0])) / (x[1] - x[0])).fold(0.0, f64::max);
    Ok(Trace { x: xs.to_vec(), chi0, k_by_t, k, stability, lipschitz, extrapolation_gap: gap, referenced: reference.is_some() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeCheck {
    /// `(x, ε_meas(x))` on the ladder.
    pub rows: Vec<(f64, f64)>,
    pub sup: f64,
    pub theta_meas: f64,
    pub theta_profile: f64,
    /// `|χ₀'(±X) − A±|` at the window edges.
    pub edge_mismatch: f64,
}

/// `ε_meas(x) = |χ₀(x) − χ₀(0) − A± x|/|x|` on `ladder` (positive magnitudes, both sides).
pub fn corner_cone_check(trace: &Trace, corner: &CornerData, ladder: &[f64]) -> Result<ConeCheck> {
    let at = |x: f64| -> Result<Vec3> {
        let j = trace.x.iter().position(|&s| (s - x).abs() <= 1e-12 * x.abs().max(1.0));
        j.map(|j| trace.chi0[j]).ok_or_else(|| Error::Precondition(format!("ladder point {x} missing from the trace")))
    };
    let o = at(0.0)?;
    let mut rows = Vec::new();
    let mut dirs = [[0.0; 3]; 2];
    for &m in ladder {
        for (side, x) in [(0, m), (1, -m)] {
            let d = scale(1.0 / x, sub(at(x)?, o));
            let a = if x > 0.0 { corner.a_plus } else { corner.a_minus };
            rows.push((x, norm(sub(d, a))));
            dirs[side] = crate::frame::add(dirs[side], d);
        }
    }
    let n = trace.x.len();
    let edge = |i: usize, j: usize| scale(1.0 / (trace.x[j] - trace.x[i]), sub(trace.chi0[j], trace.chi0[i]));
    let edge_mismatch = norm(sub(edge(n - 2, n - 1), corner.a_plus)).max(norm(sub(edge(0, 1), corner.a_minus)));
    if edge_mismatch > 0.5 {
        return Err(Error::Precondition(format!("trace and corner disagree by {edge_mismatch:.3} at the window edge; gauge mismatch")));
    }
    let sup = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(ConeCheck { rows, sup, theta_meas: angle(dirs[0], scale(-1.0, dirs[1])), theta_profile: corner.theta, edge_mismatch })
}

/// `A±(t)` of one slice from the corrected estimator `T + (2ct/x) b` on `X/2 ≤ |x| ≤ X`,
/// in the self-similar variable `y = x/√t`; needs `X ≥ 20√t`.
pub fn tangent_limit_at_infinity(f: &FrameField) -> Result<(Vec3, Vec3, f64)> {
    let r = f.t.sqrt();
    let xm = f.x.last().copied().unwrap_or(0.0);
    if xm < 20.0 * r {
        return Err(Error::Precondition(format!("slice reaches x = {xm}, below 20√t = {}", 20.0 * r)));
    }
    let stride = (f.x.len() / 4000).max(1);
    let collect = |sign: f64| -> Vec<(f64, Vec3)> {
        f.x.iter()
            .enumerate()
            .step_by(stride)
            .filter(|(_, &x)| x * sign >= 0.5 * xm)
            .map(|(j, &x)| (x.abs() / r, axpy(f.frames[j].t, 2.0 * f.c[j] * f.t / x, f.frames[j].b)))
            .collect()
    };
    let (plus, s1) = extrapolate_tail(&collect(1.0))?;
    let (minus, s2) = extrapolate_tail(&collect(-1.0))?;
    Ok((plus, minus, s1.max(s2)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentLimitRow {
    pub t: f64,
    pub a_plus: Option<Vec3>,
    pub a_minus: Option<Vec3>,
    pub spread: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub a: f64,
    pub regimes: Vec<RegimeRow>,
    pub trace: Trace,
    pub cone: ConeCheck,
    pub corner: CornerData,
    pub tangent_limits: Vec<TangentLimitRow>,
}

impl SingularityReport {
    pub fn max_deviation(&self) -> f64 {
        self.regimes.iter().map(|r| r.inner.max(r.outer)).fold(0.0, f64::max)
    }

    /// `|θ_meas − θ|` within `2 sup ε_meas + spread`.
    pub fn theta_matches(&self) -> bool {
        (self.cone.theta_meas - self.corner.theta).abs() <= 2.0 * self.cone.sup + self.corner.spread + 1e-9
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub regime_split: f64,
    /// Positive magnitudes of the dyadic ladder.
    pub ladder: Vec<f64>,
    /// Spacing of the uniform trace grid.
    pub trace_step: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { regime_split: 10.0, ladder: vec![1.0 / 16.0, 0.125, 0.25, 0.5, 1.0], trace_step: 1.0 / 64.0 }
    }
}

/// Trace abscissae: a uniform grid on `[−X, X]` containing `0` and the ladder.
pub fn trace_grid(x_max: f64, step: f64, ladder: &[f64]) -> Vec<f64> {
    let m = (x_max / step).floor() as i64;
    let mut xs: Vec<f64> = (-m..=m).map(|i| i as f64 * step).collect();
    for &l in ladder {
        xs.push(l);
        xs.push(-l);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    xs
}

/// Full report for a pipeline run against the self-similar profile of the same `a`.
pub fn analyze(out: &PipelineOutput, p: &ProfileSolution, corner: &CornerData, opts: &AnalysisOptions) -> Result<SingularityReport> {
    let sol = &out.flow;
    let phases: Vec<f64> = sol
        .times
        .iter()
        .map(|&t| {
            out.origin_samples
                .iter()
                .position(|s| (s.t - t).abs() <= 1e-12 * t)
                .map(|i| out.phase[i])
                .ok_or_else(|| Error::Precondition(format!("no origin sample at t = {t}")))
        })
        .collect::<Result<_>>()?;
    let regimes = tangent_deviation(sol, p, &phases, opts.regime_split)?;
    let x_edge = sol.fields.iter().map(|f| f.x.last().copied().unwrap_or(0.0)).fold(f64::INFINITY, f64::min);
    if let Some(&l) = opts.ladder.iter().find(|&&l| l > x_edge) {
        return Err(Error::Precondition(format!("ladder point {l} beyond the reconstructed window ±{x_edge}")));
    }
    let xs = trace_grid(x_edge, opts.trace_step, &opts.ladder);
    let trace = extract_trace(sol, &out.main_times, &xs, out.config.a, Some(TraceReference { profile: p, corner }))?;
    let cone = corner_cone_check(&trace, corner, &opts.ladder)?;
    let tangent_limits = sol
        .fields
        .iter()
        .filter(|f| out.main_times.iter().any(|&t| (t - f.t).abs() <= 1e-12 * t))
        .map(|f| match tangent_limit_at_infinity(f) {
            Ok((p, m, s)) => TangentLimitRow { t: f.t, a_plus: Some(p), a_minus: Some(m), spread: Some(s) },
            Err(_) => TangentLimitRow { t: f.t, a_plus: None, a_minus: None, spread: None },
        })
        .collect();
    Ok(SingularityReport { a: out.config.a, regimes, trace, cone, corner: *corner, tangent_limits })
}
