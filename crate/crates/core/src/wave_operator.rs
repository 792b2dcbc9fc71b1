//! Modified wave operator for `i v_t + v_xx ± (1/t)(|v|² − a²)v = 0`.
//!
//! With `W(τ) = e^{iγ log τ} e^{iτ∂²} u₊`, `γ = ±a²`, `v₁ = a + W` and `N(v) = (|v|² − a²)v`,
//!
//! `Av(t) = v₁(t) ∓ i ∫_t^∞ e^{i(t−τ)∂²} [N(v) − a²W](τ)/τ dτ = v₁ + I + J₁ + J₂ + J₃`,
//!
//! where `I` carries `N(v) − N(v₁)`, `J₁` carries `a²W̄`, `J₂` carries `2a|W|² + aW²`
//! and `J₃` carries `|W|²W`. Every term is stored through its Fourier coefficient
//! `∓i e^{−itξ²} Q(t)`, `Q(t) = ∫_t^∞ e^{iτξ²} F̂(τ) dτ`, and `Q` is accumulated downward
//! from `T_max` on a logarithmic grid with Filon panels that integrate the known chirp of
//! each source exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_decay_exponent, DecayFit};
use crate::grid::{log_times, ComplexField, SpatialGrid, Trajectory};
use crate::nls::Sign;
use crate::norms::{homogeneous, mixed_norm_l4_linf, passes_zero_mode_rule};
use crate::oscillatory::{filon_linear, filon_quadratic, normalized_power_tail, power_tail_contour, power_tail_series};
use crate::quadrature::cumulative_cubic;
use crate::spectral::{continuous_spectrum, fft_in_place, free_propagate, ifft_in_place};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringDatum {
    pub u_plus: ComplexField,
    pub a: f64,
    pub sign: Sign,
    pub t0: f64,
    pub t_max: f64,
}

impl ScatteringDatum {
    /// Default Ḣ^{-2}-class datum `3∂²e^{-x²/64}` with `a = 0.1`, focusing, on `[−32768, 32768)`
    /// with `N = 16384`, `t0 = 1`, `T_max = 2000`.
    pub fn default_scatter() -> Self {
        let grid = SpatialGrid::new(32768.0, 16384).expect("default scatter grid");
        Self {
            u_plus: crate::datum::Family::GaussianDerivative { amplitude: 3.0, width: 8.0, order: 2 }.sample(grid),
            a: 0.1,
            sign: Sign::Focusing,
            t0: 1.0,
            t_max: 2000.0,
        }
    }

    pub fn validate(&self, require_hdot_minus2: bool) -> Result<()> {
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::Precondition(format!("amplitude must be nonnegative, got {}", self.a)));
        }
        if !(self.t0 > 0.0) {
            return Err(Error::Precondition(format!("t0 must be positive, got {}", self.t0)));
        }
        if !(self.t_max >= 100.0 * self.t0) {
            return Err(Error::Precondition(format!("T_max = {} below 100·t0", self.t_max)));
        }
        if require_hdot_minus2 && !passes_zero_mode_rule(&self.u_plus) {
            return Err(Error::Precondition("u₊ fails the Ḣ^{-2} zero-mode rule".into()));
        }
        Ok(())
    }

    /// `γ = ±a²`, the sign of the nonlinearity.
    pub fn gamma(&self) -> f64 {
        self.sign.value() * self.a * self.a
    }

    pub fn grid(&self) -> &SpatialGrid {
        self.u_plus.grid()
    }
}

/// `W(t) = e^{iγ log t} e^{it∂²} u₊`.
pub fn free_profile(d: &ScatteringDatum, t: f64) -> ComplexField {
    free_propagate(&d.u_plus, t).scale(Complex64::from_polar(1.0, d.gamma() * t.ln()))
}

/// `v₁(t) = a + e^{±ia² log t} e^{it∂²} u₊`.
pub fn profile_v1(d: &ScatteringDatum, t: f64) -> ComplexField {
    let a = Complex64::new(d.a, 0.0);
    free_profile(d, t).map(|z| z + a)
}

fn nonlinearity(v: Complex64, a2: f64) -> Complex64 {
    v * (v.norm_sqr() - a2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DuhamelOptions {
    /// Log-grid nodes per decade.
    pub per_decade: usize,
    /// Quadratic Filon subpanels per log panel for the per-mode `J₁` quadrature.
    pub j1_refine: usize,
    /// Modes with `|û₊| ≤ skip·max|û₊|` are not integrated for `J₁`.
    pub skip: f64,
}

impl Default for DuhamelOptions {
    fn default() -> Self {
        Self { per_decade: 32, j1_refine: 8, skip: 1e-15 }
    }
}

/// Per-time decomposition `Av − v₁ = I + J₁ + J₂ + J₃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuhamelBreakdown {
    pub t: f64,
    pub i: ComplexField,
    pub j1: ComplexField,
    pub j2: ComplexField,
    pub j3: ComplexField,
    /// `2T‖F(T)‖` for the `I` and `J₃` integrands beyond `T_max`.
    pub tail_bound: f64,
    /// `tail_bound` above 1% of `‖I + J₃‖` at this time.
    pub tail_flag: bool,
}

impl DuhamelBreakdown {
    pub fn total(&self) -> ComplexField {
        self.i.add(&self.j1).add(&self.j2).add(&self.j3)
    }
}

/// `∫_t^∞ e^{iωτ} τ^{−β} dτ` per mode by quadratic Filon on a refined log grid
/// plus the integration-by-parts series once `ωτ ≥ 40`. Values at every node of `times`.
fn power_integral_nodes(omega: f64, beta: Complex64, times: &[f64], powers: &PowerTable) -> Vec<Complex64> {
    let n = times.len();
    let t_top = times[n - 1];
    let mut acc = if omega == 0.0 {
        if beta.im == 0.0 {
            return vec![ZERO; n];
        }
        // ∫_T^∞ τ^{−1−iγ} = T^{−iγ}/(iγ) for β = 1 + iγ
        Complex64::new(t_top, 0.0).powc(1.0 - beta) / (beta - 1.0)
    } else if omega * t_top >= 40.0 {
        power_tail_series(omega, t_top, beta)
    } else {
        let t_end = 40.0 / omega;
        let per = powers.refine * powers.per_decade;
        let ext = log_times(t_top, t_end, per);
        let mut s = power_tail_series(omega, t_end, beta);
        for w in ext.windows(2).rev() {
            let m = 0.5 * (w[0] + w[1]);
            let f = |t: f64| Complex64::new(t, 0.0).powc(-beta);
            s += filon_quadratic(omega, w[0], w[1], f(w[0]), f(m), f(w[1]));
        }
        s
    };
    let mut out = vec![ZERO; n];
    out[n - 1] = acc;
    for j in (0..n - 1).rev() {
        for sub in powers.panels[j].iter().rev() {
            acc += filon_quadratic(omega, sub.0, sub.2, sub.3, sub.4, sub.5);
        }
        out[j] = acc;
    }
    out
}

/// Refined subpanels `(τa, τm, τb, τa^{−β}, τm^{−β}, τb^{−β})` of every log panel.
struct PowerTable {
    per_decade: usize,
    refine: usize,
    panels: Vec<Vec<(f64, f64, f64, Complex64, Complex64, Complex64)>>,
}

impl PowerTable {
    fn new(times: &[f64], beta: Complex64, per_decade: usize, refine: usize) -> Self {
        let p = |t: f64| Complex64::new(t, 0.0).powc(-beta);
        let panels = times
            .windows(2)
            .map(|w| {
                (0..refine)
                    .map(|i| {
                        let a = w[0] * (w[1] / w[0]).powf(i as f64 / refine as f64);
                        let b = w[0] * (w[1] / w[0]).powf((i + 1) as f64 / refine as f64);
                        let m = 0.5 * (a + b);
                        (a, m, b, p(a), p(m), p(b))
                    })
                    .collect()
            })
            .collect();
        Self { per_decade, refine, panels }
    }
}

/// Linear Duhamel operator with the `J` terms precomputed on a log grid.
pub struct WaveOperator {
    datum: ScatteringDatum,
    times: Vec<f64>,
    xi2: Vec<f64>,
    /// Fourier coefficients of `J₁ + J₂ + J₃` at every node.
    j_total: Vec<Vec<Complex64>>,
    /// Separate `(J₁, J₂, J₃)` coefficients at retained nodes.
    parts: Vec<Option<[Vec<Complex64>; 3]>>,
    j3_tail_bound: f64,
}

/// Sources of one time level in Fourier space: `(S_A, S_B, S_C)` with chirps removed.
fn sources(d: &ScatteringDatum, xi2: &[f64], uhat: &[Complex64], tau: f64) -> [Vec<Complex64>; 3] {
    let g = d.gamma();
    let mut w: Vec<Complex64> = uhat
        .iter()
        .zip(xi2)
        .map(|(u, k2)| u * Complex64::from_polar(1.0, g * tau.ln() - tau * k2))
        .collect();
    ifft_in_place(&mut w);
    let mut a_src: Vec<Complex64> = w.iter().map(|z| Complex64::new(2.0 * d.a * z.norm_sqr() / tau, 0.0)).collect();
    let mut b_src: Vec<Complex64> = w.iter().map(|z| d.a * z * z / tau).collect();
    let mut c_src: Vec<Complex64> = w.iter().map(|z| z * z.norm_sqr() / tau).collect();
    fft_in_place(&mut a_src);
    fft_in_place(&mut b_src);
    fft_in_place(&mut c_src);
    a_src[0] = ZERO;
    for (k, k2) in xi2.iter().enumerate() {
        b_src[k] *= Complex64::from_polar(1.0, 0.5 * tau * k2);
        c_src[k] *= Complex64::from_polar(1.0, tau * k2);
    }
    [a_src, b_src, c_src]
}

/// Stationary-phase tail of the `2a|W|²` source beyond `T`, evaluated in `x`:
/// `(a/πx) ∫₀^{x/2T} |û₊(ζ)|² dζ`, zero mode removed, as Fourier coefficients.
fn modulus_tail(d: &ScatteringDatum, t_top: f64) -> Vec<Complex64> {
    let grid = *d.grid();
    let n = grid.len();
    let spec = continuous_spectrum(&d.u_plus);
    let mut pts: Vec<(f64, f64)> = (0..n).map(|k| (grid.freq(k), spec[k].norm_sqr())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let zs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ps: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let cum = cumulative_cubic(&zs, &ps);
    let origin = zs.partition_point(|&z| z < 0.0);
    let c0 = cum[origin];
    let prim = |z: f64| -> f64 {
        let i = zs.partition_point(|&v| v <= z).clamp(1, zs.len() - 1);
        let (za, zb) = (zs[i - 1], zs[i]);
        cum[i - 1] + (cum[i] - cum[i - 1]) * (z - za) / (zb - za) - c0
    };
    let p0 = ps[origin];
    let mut vals: Vec<Complex64> = (0..n)
        .map(|j| {
            let x = grid.x(j);
            let v = if x == 0.0 { p0 / (2.0 * t_top) } else { prim(x / (2.0 * t_top)) / x };
            Complex64::new(d.a / std::f64::consts::PI * v, 0.0)
        })
        .collect();
    fft_in_place(&mut vals);
    vals[0] = ZERO;
    vals
}

impl WaveOperator {
    /// Precompute `J₁, J₂, J₃` on the log grid `[t_start, T_max]`; separate parts are kept
    /// at the nodes nearest to `keep`.
    pub fn new(d: &ScatteringDatum, t_start: f64, opts: DuhamelOptions, keep: &[f64]) -> Result<Self> {
        d.validate(false)?;
        if !(t_start >= d.t0 && t_start < d.t_max) {
            return Err(Error::OutOfRange(format!("start {t_start} outside [t0, T_max)")));
        }
        let grid = *d.grid();
        let n = grid.len();
        let times = log_times(t_start, d.t_max, opts.per_decade);
        let nt = times.len();
        let xi2: Vec<f64> = grid.freqs().iter().map(|x| x * x).collect();
        let mut uhat = d.u_plus.values().to_vec();
        fft_in_place(&mut uhat);
        let s = -I * d.sign.value();
        let gamma = d.gamma();
        let a2 = d.a * d.a;

        let keep_idx: Vec<usize> = keep.iter().map(|&t| nearest(&times, t)).collect();
        let mut parts: Vec<Option<[Vec<Complex64>; 3]>> = vec![None; nt];
        for &j in &keep_idx {
            parts[j] = Some([vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]]);
        }
        let mut j_total = vec![vec![ZERO; n]; nt];

        // J₁ per mode.
        let beta = Complex64::new(1.0, gamma);
        let table = PowerTable::new(&times, beta, opts.per_decade, opts.j1_refine.max(1));
        let umax = uhat.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..n {
            let ubar = uhat[(n - k) % n].conj();
            if ubar.norm() <= opts.skip * umax {
                continue;
            }
            let kk = power_integral_nodes(2.0 * xi2[k], beta, &times, &table);
            for j in 0..nt {
                let v = s * a2 * Complex64::from_polar(1.0, -times[j] * xi2[k]) * ubar * kk[j];
                j_total[j][k] += v;
                if let Some(p) = parts[j].as_mut() {
                    p[0][k] = v;
                }
            }
        }

        // J₂ and J₃ by quadratic Filon with midpoint sources.
        let t_top = times[nt - 1];
        let top = sources(d, &xi2, &uhat, t_top);
        let tail_a = modulus_tail(d, t_top);
        let pb = Complex64::new(1.5, -2.0 * gamma);
        let pc = Complex64::new(2.0, -gamma);
        let mut q2: Vec<Complex64> = (0..n)
            .map(|k| tail_a[k] + top[1][k] * normalized_power_tail(0.5 * xi2[k], t_top, pb))
            .collect();
        let mut q3: Vec<Complex64> = (0..n).map(|k| top[2][k] * normalized_power_tail(0.0, t_top, pc)).collect();
        let j3_tail_bound = {
            let mut c = top[2].clone();
            for (k, k2) in xi2.iter().enumerate() {
                c[k] *= Complex64::from_polar(1.0, -t_top * k2);
            }
            ifft_in_place(&mut c);
            2.0 * t_top * ComplexField::from_raw(grid, c).l2()
        };
        let mut upper = top;
        let store = |j: usize, q2: &[Complex64], q3: &[Complex64], jt: &mut Vec<Vec<Complex64>>, parts: &mut Vec<Option<[Vec<Complex64>; 3]>>| {
            for k in 0..n {
                let ph = s * Complex64::from_polar(1.0, -times[j] * xi2[k]);
                jt[j][k] += ph * (q2[k] + q3[k]);
                if let Some(p) = parts[j].as_mut() {
                    p[1][k] = ph * q2[k];
                    p[2][k] = ph * q3[k];
                }
            }
        };
        store(nt - 1, &q2, &q3, &mut j_total, &mut parts);
        for j in (0..nt - 1).rev() {
            let (ta, tb) = (times[j], times[j + 1]);
            let tm = 0.5 * (ta + tb);
            let mid = sources(d, &xi2, &uhat, tm);
            let lower = sources(d, &xi2, &uhat, ta);
            for k in 0..n {
                q2[k] += filon_quadratic(xi2[k], ta, tb, lower[0][k], mid[0][k], upper[0][k]);
                q2[k] += filon_quadratic(0.5 * xi2[k], ta, tb, lower[1][k], mid[1][k], upper[1][k]);
                q3[k] += filon_quadratic(0.0, ta, tb, lower[2][k], mid[2][k], upper[2][k]);
            }
            store(j, &q2, &q3, &mut j_total, &mut parts);
            upper = lower;
        }

        Ok(Self { datum: d.clone(), times, xi2, j_total, parts, j3_tail_bound })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn datum(&self) -> &ScatteringDatum {
        &self.datum
    }

    pub fn node(&self, t: f64) -> usize {
        nearest(&self.times, t)
    }

    /// `J₁ + J₂ + J₃` at node `j` in `x`.
    pub fn j_sum(&self, j: usize) -> ComplexField {
        let mut v = self.j_total[j].clone();
        ifft_in_place(&mut v);
        ComplexField::from_raw(*self.datum.grid(), v)
    }

    /// `(J₁, J₂, J₃)` at a retained node.
    pub fn j_parts(&self, j: usize) -> Option<[ComplexField; 3]> {
        self.parts[j].as_ref().map(|p| {
            p.clone().map(|mut v| {
                ifft_in_place(&mut v);
                ComplexField::from_raw(*self.datum.grid(), v)
            })
        })
    }

    /// One application of `A` to `v = v₁ + r` given by the remainders `r` at every node.
    /// Returns the new remainders and the `I` term (Fourier) at every node, plus the
    /// `I`-integrand norm at `T_max`.
    pub fn apply(&self, r: &[ComplexField]) -> Result<(Vec<ComplexField>, Vec<Vec<Complex64>>, f64)> {
        let nt = self.times.len();
        if r.len() != nt {
            return Err(Error::Precondition(format!("{} remainders for {} nodes", r.len(), nt)));
        }
        let grid = *self.datum.grid();
        let n = grid.len();
        let d = &self.datum;
        let a2 = d.a * d.a;
        let s = -I * d.sign.value();
        let mut uhat = d.u_plus.values().to_vec();
        fft_in_place(&mut uhat);
        let source = |j: usize| -> (Vec<Complex64>, f64) {
            let tau = self.times[j];
            let v1 = profile_v1(d, tau);
            let mut f: Vec<Complex64> = v1
                .values()
                .iter()
                .zip(r[j].values())
                .map(|(&w, &q)| (nonlinearity(w + q, a2) - nonlinearity(w, a2)) / tau)
                .collect();
            let norm = ComplexField::from_raw(grid, f.clone()).l2();
            fft_in_place(&mut f);
            for (k, k2) in self.xi2.iter().enumerate() {
                f[k] *= Complex64::from_polar(1.0, tau * k2);
            }
            (f, norm)
        };
        let (mut upper, top_norm) = source(nt - 1);
        let mut q = vec![ZERO; n];
        let mut i_terms = vec![Vec::new(); nt];
        let mut out = vec![ComplexField::zeros(grid); nt];
        let finish = |j: usize, q: &[Complex64]| -> (Vec<Complex64>, ComplexField) {
            let it: Vec<Complex64> = (0..n).map(|k| s * Complex64::from_polar(1.0, -self.times[j] * self.xi2[k]) * q[k]).collect();
            let mut tot: Vec<Complex64> = it.iter().zip(&self.j_total[j]).map(|(a, b)| a + b).collect();
            ifft_in_place(&mut tot);
            (it, ComplexField::from_raw(grid, tot))
        };
        let (it, o) = finish(nt - 1, &q);
        i_terms[nt - 1] = it;
        out[nt - 1] = o;
        for j in (0..nt - 1).rev() {
            let (lower, _) = source(j);
            for k in 0..n {
                q[k] += filon_linear(0.0, self.times[j], self.times[j + 1], lower[k], upper[k]);
            }
            let (it, o) = finish(j, &q);
            i_terms[j] = it;
            out[j] = o;
            upper = lower;
        }
        Ok((out, i_terms, 2.0 * self.times[nt - 1] * top_norm))
    }

    /// Breakdown at node `j` from an `I` coefficient vector.
    pub fn breakdown(&self, j: usize, i_term: &[Complex64], i_tail: f64) -> Result<DuhamelBreakdown> {
        let [j1, j2, j3] = self
            .j_parts(j)
            .ok_or_else(|| Error::Precondition(format!("node {j} was not retained")))?;
        let mut iv = i_term.to_vec();
        ifft_in_place(&mut iv);
        let i = ComplexField::from_raw(*self.datum.grid(), iv);
        let tail_bound = i_tail + self.j3_tail_bound;
        let reference = i.add(&j3).l2();
        Ok(DuhamelBreakdown {
            t: self.times[j],
            tail_flag: tail_bound > 0.01 * reference,
            i,
            j1,
            j2,
            j3,
            tail_bound,
        })
    }
}

fn nearest(times: &[f64], t: f64) -> usize {
    (0..times.len())
        .min_by(|&i, &j| (times[i].ln() - t.ln()).abs().total_cmp(&(times[j].ln() - t.ln()).abs()))
        .unwrap()
}

/// Apply `A` to a trajectory stored on the operator's log grid from `min(eval_times)` to `T_max`.
pub fn apply_a(
    v: &Trajectory,
    d: &ScatteringDatum,
    eval_times: &[f64],
    opts: DuhamelOptions,
) -> Result<(Trajectory, Vec<DuhamelBreakdown>)> {
    let t_start = eval_times.iter().copied().fold(f64::INFINITY, f64::min);
    let op = WaveOperator::new(d, t_start, opts, eval_times)?;
    let times = op.times();
    if v.len() != times.len() || v.times().iter().zip(times).any(|(a, b)| (a - b).abs() > 1e-9 * b) {
        return Err(Error::Precondition("trajectory must be stored on the operator's log grid".into()));
    }
    let r: Vec<ComplexField> = v
        .fields()
        .iter()
        .zip(times)
        .map(|(f, &t)| f.sub(&profile_v1(d, t)))
        .collect();
    let (out, i_terms, i_tail) = op.apply(&r)?;
    let fields = out.iter().zip(times).map(|(q, &t)| profile_v1(d, t).add(q)).collect();
    let traj = Trajectory::new(times.to_vec(), fields)?;
    let mut bd = Vec::new();
    for &t in eval_times {
        let j = op.node(t);
        bd.push(op.breakdown(j, &i_terms[j], i_tail)?);
    }
    Ok((traj, bd))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOutcome {
    pub times: Vec<f64>,
    /// `v − v₁` at every node of the log grid.
    pub remainder: Vec<ComplexField>,
    /// `sup_t ‖v^{k+1} − v^k‖_{L²}` per iteration.
    pub changes: Vec<f64>,
    /// Successive change ratios.
    pub ratios: Vec<f64>,
    pub converged: bool,
    /// `I`-integrand tail bound of the last application.
    pub i_tail_bound: f64,
    pub j3_tail_bound: f64,
    /// Surrogate X-norm `sup_t t^{1/4}‖J(t)‖_{L²}` of the first iterate.
    pub first_iterate_norm: f64,
    pub breakdowns: Vec<DuhamelBreakdown>,
}

impl PicardOutcome {
    pub fn trajectory(&self, d: &ScatteringDatum) -> Result<Trajectory> {
        let fields = self.remainder.iter().zip(&self.times).map(|(r, &t)| profile_v1(d, t).add(r)).collect();
        Trajectory::new(self.times.clone(), fields)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardOptions {
    pub n_iter: usize,
    pub tol: f64,
    pub max_amplitude: f64,
    pub max_first_norm: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { n_iter: 12, tol: 1e-12, max_amplitude: 0.3, max_first_norm: 0.1 }
    }
}

/// Fixed-point iteration `v⁰ = v₁`, `v^{k+1} = A v^k` on the log grid `[t0, T_max]`.
pub fn picard_solve(
    d: &ScatteringDatum,
    popts: PicardOptions,
    dopts: DuhamelOptions,
    keep: &[f64],
) -> Result<PicardOutcome> {
    d.validate(false)?;
    if d.a > popts.max_amplitude {
        return Err(Error::Precondition(format!("a = {} above the smallness surrogate {}", d.a, popts.max_amplitude)));
    }
    let op = WaveOperator::new(d, d.t0, dopts, keep)?;
    let nt = op.times().len();
    let grid = *d.grid();
    let first_iterate_norm = (0..nt).map(|j| op.times()[j].powf(0.25) * op.j_sum(j).l2()).fold(0.0, f64::max);
    if first_iterate_norm > popts.max_first_norm {
        return Err(Error::Precondition(format!(
            "first iterate X-norm {first_iterate_norm:.3e} above {}",
            popts.max_first_norm
        )));
    }
    let mut r = vec![ComplexField::zeros(grid); nt];
    let mut changes = Vec::new();
    let mut ratios = Vec::new();
    let mut converged = false;
    let mut last = None;
    for _ in 0..popts.n_iter.max(1) {
        let (next, i_terms, i_tail) = op.apply(&r)?;
        let change = next.iter().zip(&r).map(|(a, b)| a.sub(b).l2()).fold(0.0, f64::max);
        if let Some(&prev) = changes.last() {
            let ratio: f64 = if prev > 0.0 { change / prev } else { 0.0 };
            ratios.push(ratio);
            if ratio >= 1.0 && change > popts.tol {
                return Err(Error::NonContraction { iteration: changes.len(), ratio });
            }
        }
        changes.push(change);
        r = next;
        last = Some((i_terms, i_tail));
        if change <= popts.tol {
            converged = true;
            break;
        }
    }
    let (i_terms, i_tail) = last.unwrap();
    let breakdowns = keep
        .iter()
        .map(|&t| {
            let j = op.node(t);
            op.breakdown(j, &i_terms[j], i_tail)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PicardOutcome {
        times: op.times().to_vec(),
        remainder: r,
        changes,
        ratios,
        converged,
        i_tail_bound: i_tail,
        j3_tail_bound: op.j3_tail_bound,
        first_iterate_norm,
        breakdowns,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: f64,
    pub l2: f64,
    /// `‖∂^k(v − v₁)‖_{L²}` for `k = 1..=s`.
    pub derivatives: Vec<f64>,
    pub mixed_tail: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    pub l2_fit: Option<DecayFit>,
    pub derivative_fits: Vec<Option<DecayFit>>,
    pub mixed_fit: Option<DecayFit>,
    pub exact_zero: bool,
}

/// Fitted decay exponents of `v − v₁` over `[t_lo, t_hi]`.
pub fn verify_decay(out: &PicardOutcome, s: u32, t_lo: f64, t_hi: f64) -> Result<DecayTable> {
    let grid = *out.remainder[0].grid();
    let traj = Trajectory::new(out.times.clone(), out.remainder.clone())?;
    let t_end = *out.times.last().unwrap();
    let mut rows = Vec::new();
    for (t, r) in out.times.iter().zip(&out.remainder) {
        if *t < t_lo * (1.0 - 1e-12) || *t > t_hi * (1.0 + 1e-12) {
            continue;
        }
        rows.push(DecayRow {
            t: *t,
            l2: r.l2(),
            derivatives: (1..=s).map(|k| homogeneous(r, k as i32)).collect(),
            mixed_tail: mixed_norm_l4_linf(&traj, *t, t_end)?,
        });
    }
    let _ = grid;
    let exact_zero = rows.iter().all(|r| r.l2 == 0.0);
    let fit = |sel: &dyn Fn(&DecayRow) -> f64| -> Option<DecayFit> {
        if exact_zero {
            return None;
        }
        fit_decay_exponent(&rows.iter().map(|r| (r.t, sel(r))).collect::<Vec<_>>()).ok()
    };
    let l2_fit = fit(&|r| r.l2);
    let derivative_fits = (0..s as usize).map(|k| fit(&|r: &DecayRow| r.derivatives[k])).collect();
    let mixed_fit = fit(&|r| r.mixed_tail);
    Ok(DecayTable { rows, l2_fit, derivative_fits, mixed_fit, exact_zero })
}

/// `J₁(t)` with the time integral truncated at `t_max` and no tail, for the phase choice `γ`.
pub fn j1_truncated(d: &ScatteringDatum, gamma: f64, t: f64, t_max: f64, opts: DuhamelOptions) -> ComplexField {
    let grid = *d.grid();
    let n = grid.len();
    let mut uhat = d.u_plus.values().to_vec();
    fft_in_place(&mut uhat);
    let beta = Complex64::new(1.0, gamma);
    let times = log_times(t, t_max, opts.per_decade);
    let table = PowerTable::new(&times, beta, opts.per_decade, opts.j1_refine.max(1));
    let s = -I * d.sign.value() * d.a * d.a;
    let mut out: Vec<Complex64> = (0..n)
        .map(|k| {
            let xi2 = grid.freq(k).powi(2);
            let omega = 2.0 * xi2;
            let mut acc = ZERO;
            for panel in &table.panels {
                for sub in panel {
                    acc += filon_quadratic(omega, sub.0, sub.2, sub.3, sub.4, sub.5);
                }
            }
            s * Complex64::from_polar(1.0, -t * xi2) * uhat[(n - k) % n].conj() * acc
        })
        .collect();
    ifft_in_place(&mut out);
    ComplexField::from_raw(grid, out)
}

/// `J₁(t)` from the rotated-contour closed form, independent of the time grid.
pub fn j1_closed_form(d: &ScatteringDatum, t: f64) -> ComplexField {
    let grid = *d.grid();
    let n = grid.len();
    let mut uhat = d.u_plus.values().to_vec();
    fft_in_place(&mut uhat);
    let umax = uhat.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let beta = Complex64::new(1.0, d.gamma());
    let s = -I * d.sign.value() * d.a * d.a;
    let mut out: Vec<Complex64> = (0..n)
        .map(|k| {
            let ubar = uhat[(n - k) % n].conj();
            let xi2 = grid.freq(k).powi(2);
            if ubar.norm() <= 1e-15 * umax {
                return ZERO;
            }
            let kk = if xi2 == 0.0 {
                if beta.im == 0.0 {
                    return ZERO;
                }
                Complex64::new(t, 0.0).powc(1.0 - beta) / (beta - 1.0)
            } else {
                power_tail_contour(2.0 * xi2, t, beta)
            };
            s * Complex64::from_polar(1.0, -t * xi2) * ubar * kk
        })
        .collect();
    ifft_in_place(&mut out);
    ComplexField::from_raw(grid, out)
}

/// `J₁(t)` on its own through the per-mode time quadrature plus series tail.
pub fn j1_time_quadrature(d: &ScatteringDatum, t: f64, opts: DuhamelOptions) -> ComplexField {
    let grid = *d.grid();
    let n = grid.len();
    let mut uhat = d.u_plus.values().to_vec();
    fft_in_place(&mut uhat);
    let umax = uhat.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let beta = Complex64::new(1.0, d.gamma());
    let times = log_times(t, d.t_max.max(10.0 * t), opts.per_decade);
    let table = PowerTable::new(&times, beta, opts.per_decade, opts.j1_refine.max(1));
    let s = -I * d.sign.value() * d.a * d.a;
    let mut out: Vec<Complex64> = (0..n)
        .map(|k| {
            let ubar = uhat[(n - k) % n].conj();
            if ubar.norm() <= 1e-15 * umax {
                return ZERO;
            }
            let xi2 = grid.freq(k).powi(2);
            let kk = power_integral_nodes(2.0 * xi2, beta, &times, &table)[0];
            s * Complex64::from_polar(1.0, -t * xi2) * ubar * kk
        })
        .collect();
    ifft_in_place(&mut out);
    ComplexField::from_raw(grid, out)
}

/// The resonant Duhamel term `∓i ∫_t^T e^{i(t−τ)∂²} a²W₀(τ)/τ dτ`, `W₀ = e^{iτ∂²}u₊`, left
/// uncancelled when the phase correction is dropped. The source is built in `x` at every
/// node and integrated with the same panels as the other Duhamel terms.
pub fn resonant_term(d: &ScatteringDatum, t: f64, t_max: f64, per_decade: usize) -> ComplexField {
    let grid = *d.grid();
    let xi2: Vec<f64> = grid.freqs().iter().map(|x| x * x).collect();
    let a2 = d.a * d.a;
    let source = |tau: f64| -> Vec<Complex64> {
        let mut f = free_propagate(&d.u_plus, tau).scale(Complex64::new(a2 / tau, 0.0)).into_values();
        fft_in_place(&mut f);
        for (k, k2) in xi2.iter().enumerate() {
            f[k] *= Complex64::from_polar(1.0, tau * k2);
        }
        f
    };
    let times = log_times(t, t_max, per_decade);
    let mut q = vec![ZERO; grid.len()];
    let mut upper = source(t_max);
    for w in times.windows(2).rev() {
        let mid = source(0.5 * (w[0] + w[1]));
        let lower = source(w[0]);
        for k in 0..q.len() {
            q[k] += filon_quadratic(0.0, w[0], w[1], lower[k], mid[k], upper[k]);
        }
        upper = lower;
    }
    let s = -I * d.sign.value();
    for (k, k2) in xi2.iter().enumerate() {
        q[k] *= s * Complex64::from_polar(1.0, -t * k2);
    }
    ifft_in_place(&mut q);
    ComplexField::from_raw(grid, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::Family;

    fn datum(amp: f64, order: u32) -> ScatteringDatum {
        let grid = SpatialGrid::new(256.0, 2048).unwrap();
        ScatteringDatum {
            u_plus: Family::GaussianDerivative { amplitude: amp, width: 1.0, order }.sample(grid),
            a: 0.1,
            sign: Sign::Focusing,
            t0: 1.0,
            t_max: 100.0,
        }
    }

    #[test]
    fn zero_datum_gives_constant() {
        let d = datum(0.0, 1);
        let out = picard_solve(&d, PicardOptions::default(), DuhamelOptions::default(), &[1.0]).unwrap();
        assert!(out.converged);
        assert_eq!(out.changes.len(), 1);
        assert!(out.remainder.iter().all(|r| r.sup() == 0.0));
        assert_eq!(profile_v1(&d, 3.0), ComplexField::constant(*d.grid(), Complex64::new(0.1, 0.0)));
    }

    #[test]
    fn v1_bound_and_sign() {
        let d = datum(0.05, 1);
        for t in [1.0, 5.0, 20.0] {
            let v1 = profile_v1(&d, t);
            assert!(v1.sup() <= d.a + d.u_plus.l1() / (4.0 * std::f64::consts::PI * t).sqrt() + 1e-12);
            let mut e = d.clone();
            e.sign = Sign::Defocusing;
            let w1 = free_profile(&d, t);
            let w2 = free_profile(&e, t);
            assert!(w1.values().iter().zip(w2.values()).all(|(p, q)| (p.norm() - q.norm()).abs() < 1e-15));
        }
    }

    #[test]
    fn j1_routes_agree() {
        let d = datum(0.01, 1);
        for t in [1.0, 7.0] {
            let a = j1_closed_form(&d, t);
            let b = j1_time_quadrature(&d, t, DuhamelOptions::default());
            let rel = a.sub(&b).l2() / a.l2();
            assert!(rel <= 1e-6, "t={t} rel={rel:e}");
        }
    }

    #[test]
    fn resonant_term_grows_logarithmically() {
        let d = datum(0.01, 1);
        let n1 = resonant_term(&d, 1.0, 1e3, 32).l2();
        let n2 = resonant_term(&d, 1.0, 1e4, 32).l2();
        let slope = (n2 - n1) / (d.a * d.a * d.u_plus.l2() * 10f64.ln());
        assert!((slope - 1.0).abs() < 1e-6, "{slope}");
    }
}
