use binormal_core::norms::{passes_zero_mode_rule, sobolev};
use binormal_core::spectral::{derivative, recurrence_time};
use binormal_core::{Family, SpatialGrid};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};

/// Largest `a` for which the Picard iteration has been observed to contract.
pub const VERIFIED_AMPLITUDE: f64 = 0.3;
/// Small-data surrogate for `‖u₊‖_{H³} + ‖u₊‖_{W^{3,1}}`.
pub const SMALL_DATUM: f64 = 0.01;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }
}

fn datum_size(f: &Family, grid: SpatialGrid) -> f64 {
    let u = f.sample(grid);
    sobolev(&u, 3) + (0..=3).map(|k| derivative(&u, k).l1()).sum::<f64>()
}

pub fn validate(cfg: &ExperimentConfig) -> Diagnostics {
    let mut d = Diagnostics::default();
    match cfg.experiment {
        Experiment::Selfsimilar => {
            let s = &cfg.selfsimilar;
            if s.amplitudes.is_empty() {
                d.errors.push("selfsimilar.amplitudes is empty".into());
            }
            for &a in &s.amplitudes {
                if !(0.0..=1.5).contains(&a) {
                    d.errors.push(format!("amplitude {a} outside [0, 1.5]"));
                }
            }
            if s.times.iter().any(|&t| !(t > 0.0)) {
                d.errors.push("selfsimilar.times must be positive".into());
            }
        }
        Experiment::Scatter => {
            let s = &cfg.scatter;
            match SpatialGrid::new(s.half_width, s.points) {
                Err(e) => d.errors.push(e.to_string()),
                Ok(grid) => {
                    if !(s.t0 > 0.0) {
                        d.errors.push(format!("scatter.t0 must be positive, got {}", s.t0));
                    }
                    if !(s.t_max >= 100.0 * s.t0) {
                        d.errors.push(format!("scatter.t_max = {} below 100·t0", s.t_max));
                    }
                    if !(s.fit_from >= s.t0 && s.fit_to <= s.t_max && s.fit_to >= 10.0 * s.fit_from) {
                        d.errors.push("fit window must lie in [t0, t_max] and span a decade".into());
                    }
                    if s.require_hdot_minus2 && !passes_zero_mode_rule(&s.u_plus.sample(grid)) {
                        d.errors.push("u+ has nonzero mean: the decay checks need the Hdot^-2 zero-mode rule".into());
                    }
                    if s.a > VERIFIED_AMPLITUDE {
                        d.warnings.push(format!("a = {} outside the verified contraction regime a <= {VERIFIED_AMPLITUDE}", s.a));
                    }
                    let w = s.u_plus.width();
                    if w > 0.0 && s.t_max > recurrence_time(&grid, w) {
                        d.warnings.push(format!(
                            "t_max = {} exceeds the recurrence time {:.1} of the periodic grid",
                            s.t_max,
                            recurrence_time(&grid, w)
                        ));
                    }
                }
            }
        }
        Experiment::Reconstruct | Experiment::Singularity | Experiment::FullPipeline => {
            let p = &cfg.pipeline;
            if let Err(e) = p.validate() {
                d.errors.push(e.to_string());
            }
            if let Ok(grid) = p.v_grid() {
                if p.a > VERIFIED_AMPLITUDE {
                    d.warnings.push(format!("a = {} outside the verified contraction regime a <= {VERIFIED_AMPLITUDE}", p.a));
                }
                if p.u_plus != Family::Zero {
                    let size = datum_size(&p.u_plus, grid);
                    if size > SMALL_DATUM {
                        d.warnings.push(format!("u+ size {size:.3e} above the small-data surrogate {SMALL_DATUM}"));
                    }
                    if !passes_zero_mode_rule(&p.u_plus.sample(grid)) {
                        d.warnings.push("u+ has nonzero mean; the scattering rates are not guaranteed".into());
                    }
                    // 1e-12 reach of the dispersed envelope plus the window must not wrap
                    let w = p.u_plus.width().max(1.0);
                    let s_max = 1.0 / p.t_min;
                    let reach = (12.0 * std::f64::consts::LN_10).sqrt() * (w * w + 16.0 * s_max * s_max / (w * w)).sqrt();
                    if reach + s_max * p.x_max > 2.0 * grid.half_width() {
                        d.warnings.push(format!(
                            "dispersed datum (reach {reach:.0}) wraps into the window |y| <= {:.0} on the periodic grid",
                            s_max * p.x_max
                        ));
                    }
                }
            }
            if cfg.analysis.ladder.iter().any(|&l| !(l > 0.0 && l <= p.x_max)) {
                d.errors.push(format!("analysis.ladder must lie in (0, x_max = {}]", p.x_max));
            }
            if !(cfg.analysis.regime_split > 0.0) {
                d.errors.push("analysis.regime_split must be positive".into());
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    #[test]
    fn large_amplitude_warns() {
        let c = parse("schema_version = 1\nexperiment = \"full-pipeline\"\n[pipeline]\na = 0.5\n").unwrap();
        let d = validate(&c);
        assert!(d.ok());
        assert!(d.warnings.iter().any(|w| w.contains("contraction regime")));
    }

    #[test]
    fn zero_t_min_is_an_error() {
        let c = parse("schema_version = 1\nexperiment = \"singularity\"\n[pipeline]\nt_min = 0.0\n").unwrap();
        assert!(!validate(&c).ok());
    }

    #[test]
    fn nonzero_mean_rejected_for_decay_checks() {
        let c = parse(
            "schema_version = 1\nexperiment = \"scatter\"\n[scatter]\nu_plus = { family = \"gaussian\", amplitude = 0.01, width = 1.0 }\n",
        )
        .unwrap();
        let d = validate(&c);
        assert!(d.errors.iter().any(|e| e.contains("zero-mode")), "{d:?}");
    }

    #[test]
    fn defaults_are_clean() {
        for e in ["selfsimilar", "scatter", "reconstruct", "singularity", "full-pipeline"] {
            let c = parse(&format!("schema_version = 1\nexperiment = \"{e}\"\n")).unwrap();
            let d = validate(&c);
            assert!(d.ok() && d.warnings.is_empty(), "{e}: {d:?}");
        }
    }
}
