//! End-to-end construction: asymptotic datum, modified wave operator, smooth-side
//! evolution, filament data, origin frame and per-slice reconstruction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datum::Family;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::grid::{ComplexField, SpatialGrid};
use crate::hasimoto::{modulus_floor, origin_sample, unwrap_phases, FilamentData, FilamentSample};
use crate::nls::{evolve_v_visit, EvolutionConfig, Sign, DEFAULT_LOG_STEP};
use crate::reconstruction::{
    assemble, binormal_residual, darios_betchov_residual, evolve_origin_frame, integrate_frenet_slice, BinormalResidual,
    FlowSolution,
};
use crate::spectral::{derivative, refine};
use crate::wave_operator::{picard_solve, DuhamelOptions, PicardOptions, PicardOutcome, ScatteringDatum};
use crate::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialFrame {
    /// `(T, ñ, b̃)(t̃₀, 0)` equal to the self-similar frame, `ñ + i b̃ = e^{iφ/2}(n + i b)`.
    Gauged,
    /// `(T, n, b)(t̃₀, 0)` equal to the identity.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub a: f64,
    pub sign: Sign,
    pub u_plus: Family,
    /// Smooth-side grid half-width and point count.
    pub v_half_width: f64,
    pub v_points: usize,
    /// Reference time `t̃₀` where the origin frame is fixed.
    pub t_ref: f64,
    pub t_min: f64,
    /// Truncation of the Duhamel integrals on the smooth side.
    pub scatter_t_max: f64,
    /// Step in `log s`; also the spacing of the origin samples.
    pub log_step: f64,
    pub slices_per_decade: usize,
    /// Refinement factor of the smooth-side grid when slices are resampled in `x`.
    pub refine: usize,
    /// Half-width of the reconstructed window in `x`.
    pub x_max: f64,
    pub initial_frame: InitialFrame,
    pub project: bool,
    pub picard: PicardOptions,
    pub duhamel: DuhamelOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            a: 0.1,
            sign: Sign::Focusing,
            u_plus: Family::GaussianDerivative { amplitude: DEFAULT_AMPLITUDE, width: 8.0, order: 2 },
            v_half_width: 4096.0,
            v_points: 8192,
            t_ref: 1.0,
            t_min: 1e-3,
            scatter_t_max: 1e3,
            log_step: DEFAULT_LOG_STEP,
            slices_per_decade: 4,
            refine: 16,
            x_max: 1.25,
            initial_frame: InitialFrame::Gauged,
            project: false,
            picard: PicardOptions::default(),
            duhamel: DuhamelOptions::default(),
        }
    }
}

/// Amplitude of the default datum `A ∂²e^{−x²/64}`, giving `‖u₊‖_{H³} + ‖u₊‖_{W^{3,1}} ≈ 0.01`.
pub const DEFAULT_AMPLITUDE: f64 = 0.014;

impl PipelineConfig {
    pub fn v_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.v_half_width, self.v_points)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if !(self.t_min > 0.0) {
            return bad(format!("t_min must be positive, got {}", self.t_min));
        }
        if !(self.t_min < self.t_ref) {
            return bad(format!("t_min = {} must lie below t_ref = {}", self.t_min, self.t_ref));
        }
        if !(self.log_step > 0.0 && self.log_step < 0.1) {
            return bad(format!("log step {} outside (0, 0.1)", self.log_step));
        }
        if self.slices_per_decade == 0 || self.refine == 0 {
            return bad("slices_per_decade and refine must be positive".into());
        }
        if !(self.x_max > 0.0) {
            return bad(format!("x_max must be positive, got {}", self.x_max));
        }
        let g = self.v_grid()?;
        if self.x_max / self.t_min >= g.half_width() {
            return bad(format!(
                "window ±{} at t_min = {} maps to |y| = {} beyond the smooth-side half-width {}",
                self.x_max,
                self.t_min,
                self.x_max / self.t_min,
                g.half_width()
            ));
        }
        Ok(())
    }

    /// Dense `s = 1/t` grid from `1/t_ref` to `1/t_min` with uniform step in `log s`.
    pub fn s_grid(&self) -> Vec<f64> {
        let (s0, s1) = (1.0 / self.t_ref, 1.0 / self.t_min);
        let n = ((s1 / s0).ln() / self.log_step).ceil() as usize;
        let h = (s1 / s0).ln() / n as f64;
        (0..=n).map(|i| if i == n { s1 } else { s0 * (i as f64 * h).exp() }).collect()
    }

    /// Indices of the reconstructed slices: the main ladder with one neighbour on each
    /// side for time differences.
    pub fn slice_indices(&self, n: usize) -> (Vec<usize>, Vec<usize>) {
        let span = (self.t_ref / self.t_min).ln();
        let spacing = span / (n - 1) as f64;
        let step = 10f64.ln() / self.slices_per_decade as f64;
        let count = (span / step + 1e-9).floor() as usize;
        let mut main: Vec<usize> = (0..=count).map(|k| ((k as f64 * step / spacing).round() as usize).min(n - 1)).collect();
        if *main.last().unwrap() != n - 1 {
            main.push(n - 1);
        }
        main.dedup();
        let mut all: Vec<usize> = main.iter().flat_map(|&i| [i.saturating_sub(1), i, (i + 1).min(n - 1)]).collect();
        all.sort_unstable();
        all.dedup();
        (main, all)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub config: PipelineConfig,
    pub flow: FlowSolution,
    /// Origin samples on the dense grid, ordered from `t_ref` downward.
    pub origin_samples: Vec<FilamentSample>,
    /// Unwrapped `φ(t, 0)` aligned with `origin_samples`.
    pub phase: Vec<f64>,
    /// Times of the main slices, a subset of `flow.times`.
    pub main_times: Vec<f64>,
    pub picard: Option<PicardSummary>,
    pub v_start_sup_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardSummary {
    pub ratios: Vec<f64>,
    pub converged: bool,
    pub first_iterate_norm: f64,
}

impl From<&PicardOutcome> for PicardSummary {
    fn from(o: &PicardOutcome) -> Self {
        Self { ratios: o.ratios.clone(), converged: o.converged, first_iterate_norm: o.first_iterate_norm }
    }
}

/// `v(s₀)` at `s₀ = 1/t_ref` from the modified wave operator; `v ≡ a` for a zero datum.
pub fn starting_field(cfg: &PipelineConfig) -> Result<(ComplexField, Option<PicardSummary>)> {
    let grid = cfg.v_grid()?;
    let constant = ComplexField::constant(grid, Complex64::new(cfg.a, 0.0));
    if cfg.u_plus == Family::Zero {
        return Ok((constant, None));
    }
    let s0 = 1.0 / cfg.t_ref;
    let d = ScatteringDatum { u_plus: cfg.u_plus.sample(grid), a: cfg.a, sign: cfg.sign, t0: s0, t_max: cfg.scatter_t_max * s0 };
    let out = picard_solve(&d, cfg.picard, cfg.duhamel, &[])?;
    if !out.converged {
        return Err(Error::NonContraction { iteration: out.ratios.len(), ratio: out.ratios.last().copied().unwrap_or(f64::NAN) });
    }
    let i = out.times.iter().position(|&t| (t - s0).abs() <= 1e-12 * s0).ok_or_else(|| Error::Precondition("Picard grid misses s₀".into()))?;
    let v = crate::wave_operator::profile_v1(&d, s0).add(&out.remainder[i]);
    Ok((v, Some(PicardSummary::from(&out))))
}

/// Filament data of `u = PC(v)` at `t = 1/s` on the refined `x`-grid `x = y/s`.
pub fn filament_from_v(v: &ComplexField, s: f64, refine_by: usize, a: f64, x_max: f64) -> Result<FilamentData> {
    let g = *v.grid();
    let w = refine(v, refine_by);
    let wy = refine(&derivative(v, 1), refine_by);
    let xg = SpatialGrid::new(g.half_width() / s, g.len() * refine_by)?;
    let t = 1.0 / s;
    let floor = modulus_floor(a, t);
    let mut c = Vec::with_capacity(xg.len());
    let mut rem = Vec::with_capacity(xg.len());
    for (j, (z, zy)) in w.values().iter().zip(wy.values()).enumerate() {
        let cj = s.sqrt() * z.norm();
        let x = xg.x(j);
        if x.abs() <= x_max && cj < floor {
            return Err(Error::ModulusFloor { t, x, modulus: cj, floor });
        }
        c.push(cj);
        rem.push(-s * (z.conj() * zy).im / z.norm_sqr().max(f64::MIN_POSITIVE));
    }
    let chirp = 0.5 * s;
    let tau = rem.iter().enumerate().map(|(j, r)| r + chirp * xg.x(j)).collect();
    let phi0 = -v.at_origin().arg();
    FilamentData::new(xg, c, tau, chirp, phi0, t)
}

/// Run the whole construction.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let (v0, picard) = starting_field(cfg)?;
    let v_start_sup_deviation = v0.values().iter().map(|z| (z - cfg.a).norm()).fold(0.0, f64::max);
    let s = cfg.s_grid();
    let (main, keep) = cfg.slice_indices(s.len());
    let spacing = (s[s.len() - 1] / s[0]).ln() / (s.len() - 1) as f64;
    let ecfg = EvolutionConfig { dt: spacing * (1.0 + 1e-9), ..EvolutionConfig::with_defaults(cfg.a, cfg.sign, s[0], s[s.len() - 1]) };
    let ecfg = EvolutionConfig { grid: *v0.grid(), ..ecfg };
    let mut samples = Vec::with_capacity(s.len());
    let mut kept: Vec<(f64, ComplexField)> = Vec::with_capacity(keep.len());
    let mut next = 0;
    evolve_v_visit(&v0, &ecfg, &s[1..], |si, v| {
        samples.push(origin_sample(v, si));
        let i = samples.len() - 1;
        if next < keep.len() && keep[next] == i {
            kept.push((si, v.clone()));
            next += 1;
        }
        Ok(())
    })?;
    if samples.len() != s.len() {
        return Err(Error::Precondition(format!("evolution visited {} of {} times", samples.len(), s.len())));
    }
    let mut phase: Vec<f64> = samples.iter().map(|p| p.phi0).collect();
    unwrap_phases(&mut phase);
    let origin_frame = match cfg.initial_frame {
        InitialFrame::Gauged => Frame::IDENTITY.rotate_normal(-0.5 * phase[0]),
        InitialFrame::Identity => Frame::IDENTITY,
    };
    let history = evolve_origin_frame(&samples, origin_frame, cfg.project)?;
    let fields = kept
        .par_iter()
        .map(|(si, v)| {
            let fd = filament_from_v(v, *si, cfg.refine, cfg.a, cfg.x_max)?;
            let i = history.index_of(1.0 / si).ok_or_else(|| Error::Precondition("slice time missing".into()))?;
            integrate_frenet_slice(&fd, history.frames[i], cfg.x_max, cfg.project)
        })
        .collect::<Result<Vec<_>>>()?;
    let chi_ref = [0.0, 0.0, 2.0 * cfg.a * cfg.t_ref.sqrt()];
    let flow = assemble(history, fields, chi_ref)?;
    Ok(PipelineOutput {
        config: cfg.clone(),
        flow,
        origin_samples: samples,
        phase,
        main_times: main.iter().map(|&i| 1.0 / s[i]).collect(),
        picard,
        v_start_sup_deviation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    /// Binormal residuals at the interior main slices.
    pub binormal: Vec<BinormalResidual>,
    /// `sup_t t·|T_t − T ∧ T_xx|_∞ / a`.
    pub binormal_scaled: f64,
    /// DaRios–Betchov residuals at the origin over the dense samples, scaled by `t^{3/2}/a`
    /// and `t/a` respectively.
    pub origin_darios_betchov: f64,
}

/// Residual diagnostics of a pipeline run over `|x| ≤ min(window, radius·√t)`.
///
/// The time stencil spans one dense step `h` in `ln t`; at fixed `x` the frame turns with phase
/// `x²/4t`, so the stencil error grows like `(x²h/4t)²` and `radius` keeps it resolved.
pub fn residuals(out: &PipelineOutput, window: f64, radius: Option<f64>) -> Result<ResidualSummary> {
    let sol = &out.flow;
    let a = out.config.a;
    let mut binormal = Vec::new();
    for &t in &out.main_times {
        let i = match sol.times.iter().position(|&s| (s - t).abs() <= 1e-12 * t) {
            Some(i) if i > 0 && i + 1 < sol.times.len() => i,
            _ => continue,
        };
        let w = radius.map_or(window, |r| window.min(r * t.sqrt()));
        binormal.push(binormal_residual(sol, i, w)?);
    }
    let binormal_scaled = binormal.iter().map(|r| r.tangent_sup * r.t / a).fold(0.0, f64::max);
    let db = darios_betchov_residual(&out.origin_samples)?;
    let origin_darios_betchov = db
        .iter()
        .map(|r| (r.first[0].abs() * r.t.powf(1.5) / a).max(r.second[0].abs() * r.t / a))
        .fold(0.0, f64::max);
    Ok(ResidualSummary { binormal, binormal_scaled, origin_darios_betchov })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{norm, scale, sub};
    use crate::norms::sobolev;
    use crate::profile::integrate_profile;
    use crate::spectral::derivative;

    fn small(cfg: PipelineConfig) -> PipelineConfig {
        PipelineConfig { v_half_width: 512.0, v_points: 1024, t_min: 1e-2, refine: 8, x_max: 1.0, ..cfg }
    }

    #[test]
    fn zero_datum_reproduces_selfsimilar_flow() {
        let cfg = small(PipelineConfig { u_plus: Family::Zero, ..Default::default() });
        let out = run_pipeline(&cfg).unwrap();
        let p = integrate_profile(cfg.a, 12.0, 1e-3).unwrap();
        let mut worst: f64 = 0.0;
        for c in &out.flow.curves {
            for (x, chi) in c.x.iter().zip(&c.chi).step_by(7) {
                let r = c.t.sqrt();
                worst = worst.max(norm(sub(*chi, scale(r, p.g_at(x / r).unwrap()))));
            }
        }
        assert!(worst < 1e-6, "{worst:e}");
        assert!(out.phase.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn perturbed_run_has_small_residuals() {
        let cfg = small(PipelineConfig::default());
        let out = run_pipeline(&cfg).unwrap();
        assert!(out.v_start_sup_deviation > 1e-5);
        let r = residuals(&out, 0.5, None).unwrap();
        assert!(!r.binormal.is_empty());
        assert!(r.binormal_scaled < 1e-3, "{}", r.binormal_scaled);
        assert!(r.origin_darios_betchov < 1e-3, "{}", r.origin_darios_betchov);
    }

    #[test]
    fn ladder_contains_neighbours() {
        let cfg = PipelineConfig::default();
        let s = cfg.s_grid();
        assert!((s[0] - 1.0).abs() < 1e-15 && (s[s.len() - 1] - 1000.0).abs() < 1e-12);
        let (main, all) = cfg.slice_indices(s.len());
        assert_eq!(main.len(), 13);
        for &m in &main {
            assert!(all.contains(&m) && all.contains(&m.saturating_sub(1)));
        }
    }

    #[test]
    fn default_amplitude_matches_norm_budget() {
        let g = SpatialGrid::new(256.0, 4096).unwrap();
        let u = PipelineConfig::default().u_plus.sample(g);
        let w31: f64 = (0..=3).map(|k| derivative(&u, k).l1()).sum();
        let total = sobolev(&u, 3) + w31;
        assert!((0.009..=0.01).contains(&total), "{total}");
    }
}
