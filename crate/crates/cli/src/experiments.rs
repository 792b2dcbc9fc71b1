use binormal_core::frame::norm;
use binormal_core::pipeline::{residuals, run_pipeline, PipelineOutput, ResidualSummary};
use binormal_core::profile::{
    default_half_range, default_step, fit_kappa, integrate_profile, limiting_tangents, selfsimilar_snapshot, theta_formula,
};
use binormal_core::singularity::{analyze, SingularityReport};
use binormal_core::wave_operator::{picard_solve, verify_decay, ScatteringDatum};
use binormal_core::{corner_angle, Error, Family, SpatialGrid};
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifacts::{decimate, Artifacts};
use crate::config::{Experiment, ExperimentConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), pass: value <= limit, value, limit, detail: format!("{value:.6e} <= {limit:.3e}") }
    }

    pub fn within(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            pass: (value - target).abs() <= tol,
            value,
            limit: tol,
            detail: format!("|{value:.6} - {target}| <= {tol}"),
        }
    }

    pub fn holds(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, value: if pass { 1.0 } else { 0.0 }, limit: 1.0, detail }
    }
}

pub type Outcome = Result<(Vec<Check>, Value), Error>;

pub fn run(cfg: &ExperimentConfig, art: &mut Artifacts) -> Outcome {
    art.json("config.json", "experiment-config", &cfg).map_err(Error::Io)?;
    match cfg.experiment {
        Experiment::Selfsimilar => selfsimilar(cfg, art),
        Experiment::Scatter => scatter(cfg, art),
        Experiment::Reconstruct => {
            let (checks, summary, _) = reconstruct(cfg, art)?;
            Ok((checks, summary))
        }
        Experiment::Singularity => singularity(cfg, art, false),
        Experiment::FullPipeline => singularity(cfg, art, true),
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn selfsimilar(cfg: &ExperimentConfig, art: &mut Artifacts) -> Outcome {
    let p = &cfg.selfsimilar;
    let mut theta_rows = Vec::new();
    let mut dev_rows = Vec::new();
    let mut corners = Vec::new();
    let mut checks = Vec::new();
    let mut worst_dev: f64 = 0.0;
    for (i, &a) in p.amplitudes.iter().enumerate() {
        if a == 0.0 {
            theta_rows.push(vec![0.0, std::f64::consts::PI, theta_formula(0.0), f64::NAN, 0.0]);
            continue;
        }
        let c = corner_angle(a)?;
        theta_rows.push(vec![a, c.theta, theta_formula(a), c.kappa_fit, c.spread]);
        corners.push(c);
        let half = default_half_range(a);
        let prof = integrate_profile(a, half, default_step(a, half))?;
        let lim = limiting_tangents(&prof)?;
        for &t in &p.times {
            let r = t.sqrt();
            let xs: Vec<f64> = (-400..=400).map(|k| k as f64 / 400.0 * 0.99 * prof.half_range() * r).collect();
            let snap = selfsimilar_snapshot(&prof, t, &xs)?;
            let dev = snap
                .x
                .iter()
                .zip(&snap.chi)
                .map(|(&x, c)| {
                    let ray = if x >= 0.0 { lim.a_plus } else { lim.a_minus };
                    norm([c[0] - x * ray[0], c[1] - x * ray[1], c[2] - x * ray[2]])
                })
                .fold(0.0, f64::max);
            let ratio = dev / (2.0 * a * r);
            worst_dev = worst_dev.max(ratio);
            dev_rows.push(vec![a, t, dev, ratio]);
        }
        let rows: Vec<Vec<f64>> = decimate(prof.x.len(), p.profile_rows)
            .into_iter()
            .map(|j| {
                let (g, t) = (prof.g[j], prof.frames[j].t);
                vec![prof.x[j], g[0], g[1], g[2], t[0], t[1], t[2]]
            })
            .collect();
        art.csv(&format!("profile_{i:02}.csv"), "profile-curve", &["y", "g_x", "g_y", "g_z", "t_x", "t_y", "t_z"], &rows)
            .map_err(io)?;
    }
    art.csv("theta.csv", "corner-angle", &["a", "theta", "theta_formula", "kappa_single", "spread"], &theta_rows).map_err(io)?;
    art.csv("deviation.csv", "selfsimilar-deviation", &["a", "t", "sup_deviation", "ratio"], &dev_rows).map_err(io)?;
    let mut summary = json!({ "theta": theta_rows.iter().map(|r| json!({"a": r[0], "theta": r[1]})).collect::<Vec<_>>() });
    if corners.len() >= 2 {
        let (kappa, rms) = fit_kappa(&corners);
        summary["kappa"] = json!(kappa);
        checks.push(Check::at_most("corner-law fit residual", rms, 1e-3));
    }
    if p.amplitudes.contains(&0.0) {
        checks.push(Check::holds("straight line at a = 0", true, "theta = pi".into()));
    }
    if !dev_rows.is_empty() {
        checks.push(Check::at_most("self-similar deviation ratio", worst_dev, 1.01));
    }
    Ok((checks, summary))
}

fn scatter(cfg: &ExperimentConfig, art: &mut Artifacts) -> Outcome {
    let s = &cfg.scatter;
    let grid = SpatialGrid::new(s.half_width, s.points)?;
    let d = ScatteringDatum { u_plus: s.u_plus.sample(grid), a: s.a, sign: s.sign, t0: s.t0, t_max: s.t_max };
    d.validate(s.require_hdot_minus2)?;
    let out = picard_solve(&d, s.picard, s.duhamel, &[])?;
    let tab = verify_decay(&out, 1, s.fit_from, s.fit_to)?;
    let rows: Vec<Vec<f64>> = tab.rows.iter().map(|r| vec![r.t, r.l2, r.derivatives[0], r.mixed_tail]).collect();
    art.csv("decay.csv", "decay-table", &["t", "l2", "grad_l2", "mixed_tail"], &rows).map_err(io)?;
    let crow: Vec<Vec<f64>> = out
        .changes
        .iter()
        .enumerate()
        .map(|(k, c)| vec![k as f64 + 1.0, *c, if k == 0 { f64::NAN } else { out.ratios[k - 1] }])
        .collect();
    art.csv("contraction.csv", "picard-contraction", &["iteration", "change", "ratio"], &crow).map_err(io)?;
    let mut checks = vec![Check::holds("Picard converged", out.converged, format!("ratios {:?}", out.ratios))];
    if tab.exact_zero {
        checks.push(Check::holds("remainder identically zero", true, "u+ = 0".into()));
    } else {
        let l2 = tab.l2_fit.as_ref().map_or(f64::NAN, |f| f.exponent);
        let g = tab.derivative_fits[0].as_ref().map_or(f64::NAN, |f| f.exponent);
        checks.push(Check::within("L2 decay exponent", l2, -0.5, 0.1));
        checks.push(Check::within("gradient decay exponent", g, -1.0, 0.15));
    }
    let summary = json!({
        "l2_fit": tab.l2_fit,
        "gradient_fit": tab.derivative_fits[0],
        "mixed_fit": tab.mixed_fit,
        "first_iterate_norm": out.first_iterate_norm,
        "i_tail_bound": out.i_tail_bound,
        "j3_tail_bound": out.j3_tail_bound,
    });
    Ok((checks, summary))
}

fn reconstruct(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<(Vec<Check>, Value, PipelineOutput), Error> {
    let out = run_pipeline(&cfg.pipeline)?;
    let an = &cfg.analysis;
    let res = residuals(&out, an.residual_window, Some(an.residual_radius))?;
    let full = residuals(&out, an.residual_window, None)?;
    let sol = &out.flow;
    let origin: Vec<Vec<f64>> = (0..sol.origin.times.len())
        .map(|i| {
            let (f, chi, s) = (&sol.origin.frames[i], sol.origin_chi[i], &out.origin_samples[i]);
            let mut r = vec![sol.origin.times[i], s.c[0], s.tau[0], out.phase[i]];
            r.extend(f.t.iter().chain(&f.n).chain(&f.b).chain(&chi));
            r
        })
        .collect();
    let header = [
        "t", "c", "tau", "phi", "t_x", "t_y", "t_z", "n_x", "n_y", "n_z", "b_x", "b_y", "b_z", "chi_x", "chi_y", "chi_z",
    ];
    art.csv("origin.csv", "origin-history", &header, &origin).map_err(io)?;
    let rows = |s: &ResidualSummary| -> Vec<Vec<f64>> {
        s.binormal.iter().map(|r| vec![r.t, r.tangent_sup, r.tangent_l2, r.chi_sup, r.chi_l2]).collect()
    };
    let header = ["t", "tangent_sup", "tangent_l2", "chi_sup", "chi_l2"];
    art.csv("residuals.csv", "binormal-residual", &header, &rows(&res)).map_err(io)?;
    art.csv("residuals_full_window.csv", "binormal-residual", &header, &rows(&full)).map_err(io)?;
    let mut slices = Vec::new();
    let mut unit: f64 = 0.0;
    for (k, &t) in out.main_times.iter().enumerate() {
        let i = sol.times.iter().position(|&s| s == t).expect("main slice stored");
        let c = &sol.curves[i];
        unit = unit.max(c.tangent.iter().map(|v| (norm(*v) - 1.0).abs()).fold(0.0, f64::max));
        let rows: Vec<Vec<f64>> = decimate(c.len(), cfg.analysis.curve_rows)
            .into_iter()
            .map(|j| {
                let (p, q) = (c.chi[j], c.tangent[j]);
                vec![c.x[j], p[0], p[1], p[2], q[0], q[1], q[2]]
            })
            .collect();
        let name = format!("curves/slice_{k:02}.csv");
        art.csv(&name, "slice-curve", &["x", "chi_x", "chi_y", "chi_z", "t_x", "t_y", "t_z"], &rows).map_err(io)?;
        slices.push(json!({ "t": t, "file": name }));
    }
    let mut checks = vec![
        Check::at_most("binormal residual (units a/t)", res.binormal_scaled, 1e-3),
        Check::at_most("origin DaRios-Betchov residual", res.origin_darios_betchov, 1e-3),
        Check::at_most("unit tangent defect", unit, 1e-8),
    ];
    if let Some(p) = &out.picard {
        checks.push(Check::holds("Picard converged", p.converged, format!("ratios {:?}", p.ratios)));
    }
    let summary = json!({
        "slices": slices,
        "origin_drift": sol.origin.max_drift,
        "slice_drift": sol.fields.iter().map(|f| f.max_drift).fold(0.0, f64::max),
        "binormal_scaled": res.binormal_scaled,
        "binormal_scaled_full_window": full.binormal_scaled,
        "origin_darios_betchov": res.origin_darios_betchov,
        "v_start_sup_deviation": out.v_start_sup_deviation,
        "picard": out.picard,
    });
    Ok((checks, summary, out))
}

fn singularity(cfg: &ExperimentConfig, art: &mut Artifacts, full: bool) -> Outcome {
    let (mut checks, mut summary, out) = reconstruct(cfg, art)?;
    let pc = &cfg.pipeline;
    let half = pc.x_max / pc.t_min.sqrt() * 1.05;
    let prof = integrate_profile(pc.a, half, default_step(pc.a, half))?;
    let corner = corner_angle(pc.a)?;
    let rep = analyze(&out, &prof, &corner, &cfg.analysis.options())?;
    write_singularity(art, &rep).map_err(io)?;
    let floor = cfg.analysis.bound_floor;
    let bound_ok = rep.regimes.iter().all(|r| r.bound_holds(floor));
    checks.push(Check::at_most("trace constant K", rep.trace.k, 2.5));
    checks.push(Check::at_most("K stability over the smallest decade", rep.trace.stability, 2.0));
    checks.push(Check::at_most("cone defect sup eps", rep.cone.sup, cfg.analysis.eps_target));
    checks.push(Check::holds(
        "corner angle from the trace",
        rep.theta_matches(),
        format!("theta_meas {:.8} vs {:.8}", rep.cone.theta_meas, rep.corner.theta),
    ));
    checks.push(Check::holds("inner-regime frame bound", bound_ok, format!("floor {floor:e}")));
    checks.push(Check::within("trace Lipschitz constant", rep.trace.lipschitz, 1.0, 0.05));
    if full && pc.u_plus == Family::Zero {
        checks.push(Check::at_most("zero datum deviation", rep.max_deviation(), 1e-6));
    }
    summary["singularity"] = json!({
        "k": rep.trace.k,
        "k_stability": rep.trace.stability,
        "eps_sup": rep.cone.sup,
        "theta_meas": rep.cone.theta_meas,
        "theta_profile": rep.corner.theta,
        "max_tangent_deviation": rep.max_deviation(),
        "extrapolation_gap": rep.trace.extrapolation_gap,
    });
    Ok((checks, summary))
}

fn write_singularity(art: &mut Artifacts, rep: &SingularityReport) -> std::io::Result<()> {
    let rows: Vec<Vec<f64>> = rep
        .regimes
        .iter()
        .map(|r| vec![r.t, r.inner, r.outer, r.origin, r.sigma_origin, r.sigma_inner, r.sigma_bound])
        .collect();
    art.csv(
        "regimes.csv",
        "tangent-regimes",
        &["t", "inner_sup", "outer_sup", "origin", "sigma_origin", "sigma_inner", "sigma_bound"],
        &rows,
    )?;
    let rows: Vec<Vec<f64>> = rep.trace.x.iter().zip(&rep.trace.chi0).map(|(x, c)| vec![*x, c[0], c[1], c[2]]).collect();
    art.csv("trace.csv", "trace-curve", &["x", "chi0_x", "chi0_y", "chi0_z"], &rows)?;
    let rows: Vec<Vec<f64>> = rep.trace.k_by_t.iter().map(|(t, k)| vec![*t, *k]).collect();
    art.csv("trace_constant.csv", "trace-constant", &["t", "k"], &rows)?;
    let rows: Vec<Vec<f64>> = rep.cone.rows.iter().map(|(x, e)| vec![*x, *e]).collect();
    art.csv("cone.csv", "cone-defect", &["x", "eps"], &rows)?;
    let nan3 = [f64::NAN; 3];
    let rows: Vec<Vec<f64>> = rep
        .tangent_limits
        .iter()
        .map(|r| {
            let (p, m) = (r.a_plus.unwrap_or(nan3), r.a_minus.unwrap_or(nan3));
            vec![r.t, p[0], p[1], p[2], m[0], m[1], m[2], r.spread.unwrap_or(f64::NAN)]
        })
        .collect();
    art.csv(
        "tangent_limits.csv",
        "tangent-limits",
        &["t", "a_plus_x", "a_plus_y", "a_plus_z", "a_minus_x", "a_minus_y", "a_minus_z", "spread"],
        &rows,
    )?;
    art.json("singularity.json", "singularity-report", rep)
}
