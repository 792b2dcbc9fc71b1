use binormal_core::fit_decay_exponent;
use binormal_core::frame::Frame;
use binormal_core::hasimoto::{pseudoconformal_slice, FilamentData, FilamentSample, Side};
use binormal_core::reconstruction::{
    assemble, binormal_residual, darios_betchov_residual, evolve_origin_frame, integrate_frenet_slice,
};
use binormal_core::pipeline::{run_pipeline, PipelineConfig, DEFAULT_AMPLITUDE};
use binormal_core::profile::corner_angle;
use binormal_core::singularity::{analyze, AnalysisOptions, SingularityReport};
use binormal_core::spectral::asymptotic_identity;
use binormal_core::nls::{energy_law_residual, DEFAULT_LOG_STEP};
use binormal_core::profile::{
    corner_sweep, default_half_range, default_step, integrate_profile, limiting_tangents, selfsimilar_snapshot, theta_formula,
};
use binormal_core::wave_operator::{
    j1_closed_form, j1_time_quadrature, j1_truncated, picard_solve, resonant_term, verify_decay, DuhamelOptions,
    PicardOptions, ScatteringDatum,
};
use binormal_core::{evolve_v, Complex64, ComplexField, EvolutionConfig, Family, Sign, SpatialGrid};

fn report(id: u32, name: &str, pass: bool, detail: String) -> bool {
    let line = format!("criterion {id:>2} [{}] {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::Write::write_all(&mut std::io::stderr(), line.as_bytes()).unwrap();
    pass
}

#[test]
fn c01_corner_angle_law() {
    let sweep = corner_sweep(&[0.25, 0.5, 0.75, 1.0]).unwrap();
    for r in &sweep.rows {
        println!("  a={} theta={:.8} formula={:.8} spread={:.2e}", r.a, r.theta, theta_formula(r.a), r.spread);
    }
    let pass = sweep.residual <= 1e-3;
    assert!(report(1, "corner-angle law", pass, format!("kappa={:.6} (closed-form law 0.5) residual={:.2e}", sweep.kappa, sweep.residual)));
}

fn small_datum(gamma_sign: Sign) -> ScatteringDatum {
    let grid = SpatialGrid::new(256.0, 2048).unwrap();
    ScatteringDatum {
        u_plus: Family::GaussianDerivative { amplitude: 0.01, width: 1.0, order: 2 }.sample(grid),
        a: 0.1,
        sign: gamma_sign,
        t0: 1.0,
        t_max: 1e3,
    }
}

#[test]
fn c03_decay_exponents() {
    let d = ScatteringDatum::default_scatter();
    let out = picard_solve(&d, PicardOptions::default(), DuhamelOptions::default(), &[10.0, 100.0, 1000.0]).unwrap();
    let tab = verify_decay(&out, 1, 10.0, 1000.0).unwrap();
    let l2 = tab.l2_fit.unwrap().exponent;
    let d1 = tab.derivative_fits[0].unwrap().exponent;
    println!("  contraction ratios {:?}", out.ratios.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>());
    let pass = out.converged && (l2 + 0.5).abs() <= 0.1 && (d1 + 1.0).abs() <= 0.15;
    assert!(report(3, "decay exponents", pass, format!("L2 {l2:.3}, gradient {d1:.3}, {} rows", tab.rows.len())));
}

#[test]
fn c04_phase_choice() {
    let d = small_datum(Sign::Focusing);
    let norm = d.u_plus.l2() * d.a * d.a;
    let ts = [1e2, 1e3, 1e4];
    let vals: Vec<f64> = ts.iter().map(|&t| resonant_term(&d, 1.0, t, 32).l2() / norm).collect();
    let slope = (vals[2] - vals[0]) / (ts[2] / ts[0]).ln();
    let mut worst: f64 = 0.0;
    for sign in [Sign::Focusing, Sign::Defocusing] {
        let d = small_datum(sign);
        let g = d.gamma();
        let j1 = j1_truncated(&d, g, 1.0, 1e3, DuhamelOptions::default());
        let j2 = j1_truncated(&d, g, 1.0, 2e3, DuhamelOptions::default());
        worst = worst.max(j1.sub(&j2).l2() / j1.l2());
    }
    let pass = (slope - 1.0).abs() <= 0.1 && worst <= 0.01;
    assert!(report(4, "phase-choice necessity", pass, format!("gamma=0 slope {slope:.4}; gamma=±a² J1 change on doubling {worst:.2e}")));
}

#[test]
fn c05_j1_dual_evaluation() {
    let mut worst: f64 = 0.0;
    for sign in [Sign::Focusing, Sign::Defocusing] {
        let d = small_datum(sign);
        for t in [1.0, 10.0, 100.0] {
            let a = j1_closed_form(&d, t);
            let b = j1_time_quadrature(&d, t, DuhamelOptions::default());
            worst = worst.max(a.sub(&b).l2() / a.l2());
        }
    }
    assert!(report(5, "J1 dual evaluation", worst <= 1e-6, format!("max relative difference {worst:.2e}")));
}

#[test]
fn c10_constant_and_energy_law() {
    let a = 0.5;
    let mut worst_const: f64 = 0.0;
    for sign in [Sign::Focusing, Sign::Defocusing] {
        let c = EvolutionConfig::with_defaults(a, sign, 1.0, 100.0);
        let v0 = ComplexField::constant(c.grid, Complex64::new(a, 0.0));
        let tr = evolve_v(&v0, &c, &[10.0, 100.0]).unwrap();
        for f in tr.fields() {
            worst_const = worst_const.max(f.sub(&v0).sup() / a);
        }
    }
    // one stored slice per step so the time stencil and the splitting refine together
    let run = |dt: f64| {
        let n = (4f64.ln() / dt).ceil() as usize;
        let mut c = EvolutionConfig::with_defaults(a, Sign::Defocusing, 1.0, 4.0);
        c.dt = 4f64.ln() / n as f64 * (1.0 + 1e-9);
        let v0 = ComplexField::from_fn(c.grid, |x| Complex64::new(a, 0.0) + 0.2 * (-x * x).exp());
        let outs: Vec<f64> = (1..=n).map(|i| (4f64.ln() * i as f64 / n as f64).exp()).collect();
        energy_law_residual(&evolve_v(&v0, &c, &outs).unwrap(), a, Sign::Defocusing).unwrap().max_relative()
    };
    let r1 = run(2.0 * DEFAULT_LOG_STEP);
    let r2 = run(DEFAULT_LOG_STEP);
    let ratio = r1 / r2;
    let pass = worst_const <= 1e-12 && r2 <= 1e-4 && ratio > 3.5;
    assert!(report(
        10,
        "constant solution and energy law",
        pass,
        format!("constant drift {worst_const:.1e}; energy residual {r2:.2e} at default step, halving ratio {ratio:.2}")
    ));
}

#[test]
fn c02_selfsimilar_deviation_bound() {
    let a = 0.5;
    let p = integrate_profile(a, default_half_range(a), default_step(a, default_half_range(a))).unwrap();
    let corner = limiting_tangents(&p).unwrap();
    let mut worst: f64 = 0.0;
    for t in [0.01f64, 0.1, 1.0] {
        let r: f64 = t.sqrt();
        let xs: Vec<f64> = (-400..=400).map(|i| i as f64 / 400.0 * 0.99 * p.half_range() * r).collect();
        let snap = selfsimilar_snapshot(&p, t, &xs).unwrap();
        let dev = snap
            .x
            .iter()
            .zip(&snap.chi)
            .map(|(&x, c)| {
                let ray = if x >= 0.0 { corner.a_plus } else { corner.a_minus };
                (0..3).map(|i| (c[i] - x * ray[i]).powi(2)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max);
        let ratio = dev / (2.0 * a * r);
        println!("  t={t} sup deviation {dev:.5e} ratio to 2a√t {ratio:.4}");
        worst = worst.max(ratio);
    }
    assert!(report(2, "self-similar deviation bound", worst <= 1.01, format!("max deviation/(2a√t) = {worst:.4}")));
}

#[test]
fn c06_asymptotic_identity() {
    let grid = SpatialGrid::new(4096.0, 32768).unwrap();
    let u = Family::Gaussian { amplitude: 1.0, width: 1.0, center: 0.0 }.sample(grid);
    let mut worst: f64 = 0.0;
    let mut samples = Vec::new();
    for t in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
        let (lhs, rhs) = asymptotic_identity(&u, t);
        let rel = (lhs - rhs).abs() / rhs;
        println!("  t={t} difference {lhs:.10e} identity {rhs:.10e} relative {rel:.1e}");
        worst = worst.max(rel);
        if t >= 8.0 {
            samples.push((t, lhs));
        }
    }
    let fit = fit_decay_exponent(&samples).expect("decay fit");
    let pass = worst <= 1e-8 && (fit.exponent + 1.0).abs() <= 0.05;
    assert!(report(6, "free-evolution identity", pass, format!("max relative mismatch {worst:.1e}; decay exponent {:.4}", fit.exponent)));
}

#[test]
fn c07_pseudoconformal_involution() {
    let g1 = SpatialGrid::new(40.0, 2048).unwrap();
    let g2 = SpatialGrid::new(24.0, 2048).unwrap();
    let g3 = SpatialGrid::new(16.0, 1024).unwrap();
    let exact = |s: f64, grid: SpatialGrid| {
        ComplexField::from_fn(grid, |y| {
            let q = Complex64::new(1.0, 4.0 * s);
            0.5 + 0.2 * q.sqrt().inv() * (-(y * y) / q).exp()
        })
    };
    let mut worst: f64 = 0.0;
    for s in [0.7, 0.85, 1.0, 1.2, 1.4] {
        let u = pseudoconformal_slice(&exact(s, g1), s, Side::V, &g2).unwrap();
        let back = pseudoconformal_slice(&u, 1.0 / s, Side::U, &g3).unwrap();
        let want = exact(s, g3);
        worst = worst.max(back.sub(&want).l2() / want.l2());
    }
    assert!(report(7, "pseudo-conformal involution", worst <= 1e-10, format!("max relative error {worst:.2e}")));
}

struct ExactFlow {
    tangent: f64,
    chi: f64,
    darios_betchov: f64,
    drift: f64,
}

fn exact_flow(a: f64, n: usize, h: f64) -> ExactFlow {
    let grid = SpatialGrid::new(8.0, n).unwrap();
    let times: Vec<f64> = (0..=20).map(|i| 0.5 * (-(i as f64) * h).exp()).collect();
    let xs: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
    let fds: Vec<FilamentData> = times.iter().map(|&t| FilamentData::selfsimilar(a, t, grid).unwrap()).collect();
    let samples: Vec<FilamentSample> = fds.iter().map(|fd| FilamentSample::from_filament(fd, &xs)).collect();
    let at_origin: Vec<FilamentSample> = fds.iter().map(|fd| FilamentSample::from_filament(fd, &[0.0])).collect();
    let origin = evolve_origin_frame(&at_origin, Frame::IDENTITY, false).unwrap();
    let fields: Vec<_> = fds.iter().map(|fd| integrate_frenet_slice(fd, Frame::IDENTITY, 4.0, false).expect("frenet")).collect();
    let drift = fields.iter().map(|f| f.max_drift).fold(0.0, f64::max);
    let sol = assemble(origin, fields, [0.0, 0.0, 2.0 * a * times[0].sqrt()]).unwrap();
    let mid = times.len() / 2;
    let r = binormal_residual(&sol, mid, 2.0).unwrap();
    let db = darios_betchov_residual(&samples).unwrap()[mid - 1].sup();
    ExactFlow { tangent: r.tangent_sup, chi: r.chi_sup, darios_betchov: db, drift }
}

#[test]
fn c08_reconstruction_convergence() {
    let a = 0.5;
    let coarse = exact_flow(a, 1024, 0.02);
    let fine = exact_flow(a, 2048, 0.01);
    let ratios = [
        coarse.tangent / fine.tangent,
        coarse.chi / fine.chi,
        coarse.darios_betchov / fine.darios_betchov,
        coarse.drift / fine.drift,
    ];
    println!(
        "  coarse: T {:.3e} chi {:.3e} DB {:.3e} drift {:.3e}",
        coarse.tangent, coarse.chi, coarse.darios_betchov, coarse.drift
    );
    println!("  fine:   T {:.3e} chi {:.3e} DB {:.3e} drift {:.3e}", fine.tangent, fine.chi, fine.darios_betchov, fine.drift);
    let pass = ratios[..3].iter().all(|&r| r >= 3.5) && ratios[3] >= 12.0;
    assert!(report(
        8,
        "reconstruction residual convergence",
        pass,
        format!("halving ratios T {:.2}, chi {:.2}, DB {:.2}, drift {:.2}", ratios[0], ratios[1], ratios[2], ratios[3])
    ));
}

fn singularity_run(amplitude: f64) -> (SingularityReport, f64) {
    let cfg = PipelineConfig {
        u_plus: Family::GaussianDerivative { amplitude, width: 8.0, order: 2 },
        ..PipelineConfig::default()
    };
    let start = std::time::Instant::now();
    let out = run_pipeline(&cfg).unwrap();
    let half = cfg.x_max / cfg.t_min.sqrt() * 1.05;
    let p = integrate_profile(cfg.a, half, default_step(cfg.a, half)).unwrap();
    let corner = corner_angle(cfg.a).unwrap();
    let rep = analyze(&out, &p, &corner, &AnalysisOptions::default()).unwrap();
    (rep, start.elapsed().as_secs_f64())
}

#[test]
fn c09_trace_and_corner() {
    let (full, secs) = singularity_run(DEFAULT_AMPLITUDE);
    let (tenth, _) = singularity_run(0.1 * DEFAULT_AMPLITUDE);
    for (name, r) in [("default", &full), ("tenth", &tenth)] {
        println!(
            "  {name}: K {:.4} stability {:.3} eps {:.3e} theta {:.6} vs {:.6} max |T-T_a| {:.3e} gap {:.2e} lipschitz {:.4}",
            r.trace.k,
            r.trace.stability,
            r.cone.sup,
            r.cone.theta_meas,
            r.corner.theta,
            r.max_deviation(),
            r.trace.extrapolation_gap,
            r.trace.lipschitz
        );
    }
    println!("  default run {secs:.1} s");
    let pass = full.trace.k <= 2.5
        && full.trace.stability <= 2.0
        && full.cone.sup <= 0.05
        && tenth.cone.sup <= 0.01
        && full.theta_matches()
        && tenth.theta_matches();
    assert!(report(
        9,
        "trace and corner",
        pass,
        format!(
            "K {:.3} (stability {:.2}); eps {:.2e} default, {:.2e} at tenth; theta {:.5} vs {:.5}",
            full.trace.k, full.trace.stability, full.cone.sup, tenth.cone.sup, full.cone.theta_meas, full.corner.theta
        )
    ));
}
