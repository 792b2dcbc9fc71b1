use binormal_core::frame::{dot, norm};
use binormal_core::hasimoto::{extract_curvature_torsion, hasimoto_filament, FilamentData};
use binormal_core::profile::{default_step, mirror, selfsimilar_snapshot};
use binormal_core::{integrate_profile, Family, SpatialGrid};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn profile_tangent_is_mirror_symmetric(a in 0.05f64..1.0, y in 0.0f64..5.0) {
        let p = integrate_profile(a, 6.0, default_step(a, 6.0)).unwrap();
        let (tp, tm) = (p.tangent_at(y).unwrap(), p.tangent_at(-y).unwrap());
        let m = mirror(tp);
        prop_assert!(norm([tm[0] - m[0], tm[1] - m[1], tm[2] - m[2]]) < 1e-8);
    }

    #[test]
    fn selfsimilar_snapshots_have_unit_tangents(a in 0.05f64..1.0, t in 0.01f64..1.0, x in -0.5f64..0.5) {
        let half = 0.6 / t.sqrt();
        let p = integrate_profile(a, half, default_step(a, half)).unwrap();
        let c = selfsimilar_snapshot(&p, t, &[x, 0.0]).unwrap();
        prop_assert!((norm(c.tangent[0]) - 1.0).abs() < 1e-12);
        prop_assert!((dot(c.tangent[1], [1.0, 0.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hasimoto_transform_round_trips(bump in 0.0f64..0.5, chirp in 0.0f64..0.5, shift in -2.0f64..2.0) {
        let g = SpatialGrid::new(8.0, 1024).unwrap();
        let c: Vec<f64> = g.nodes().iter().map(|x| 1.0 + bump * (-(x - shift).powi(2)).exp()).collect();
        let tau: Vec<f64> = g.nodes().iter().map(|x| chirp * x + bump * (-(x + shift).powi(2)).exp()).collect();
        let fd = FilamentData::new(g, c, tau, chirp, 0.0, 1.0).unwrap();
        let back = extract_curvature_torsion(&hasimoto_filament(&fd), 1.0, chirp, 0.5).unwrap();
        for j in 0..g.len() {
            prop_assert!((back.c[j] - fd.c[j]).abs() < 1e-12);
            prop_assert!((back.tau[j] - fd.tau[j]).abs() < 1e-7);
        }
    }

    #[test]
    fn datum_families_are_linear_in_amplitude(s in -3.0f64..3.0, x in -20.0f64..20.0, order in 0u32..4) {
        let f = Family::GaussianDerivative { amplitude: 0.7, width: 3.0, order };
        prop_assert!((f.scaled(s).value(x) - s * f.value(x)).abs() < 1e-14);
    }
}
