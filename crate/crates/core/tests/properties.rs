use hall_edge::band::{solve_fiber, unscale, DispersionBranch, FiberGrid};
use hall_edge::halfplane::{Amplitude, TransportConfig};
use hall_edge::mourre::{band_scan, mourre_budget, nu_window};
use hall_edge::packet::{evolve_free, make_packet, y_expectation, PacketShape};
use hall_edge::specfun::pcf_d;
use proptest::prelude::*;
use std::sync::OnceLock;

fn ground() -> &'static [DispersionBranch] {
    static B: OnceLock<Vec<DispersionBranch>> = OnceLock::new();
    B.get_or_init(|| band_scan(0, 0.05).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pcf_recurrence(nu in 0.5f64..8.0, z in -6.0f64..4.0) {
        let d = |v: f64| pcf_d(v, z).unwrap().value;
        let (lo, mid, hi) = (d(nu - 1.0), d(nu), d(nu + 1.0));
        let scale = lo.abs().max(mid.abs() * z.abs()).max(hi.abs()).max(1e-300);
        prop_assert!((hi - z * mid + nu * lo).abs() / scale < 1e-9);
    }

    #[test]
    fn unscale_round_trip(b in 0.01f64..1e4) {
        let br = &ground()[0];
        for (u, s) in unscale(br, b).unwrap().iter().zip(&br.samples).step_by(17) {
            let (k, a) = u.rescale();
            prop_assert!((k - s.kappa).abs() <= 1e-12 * (1.0 + s.kappa.abs()));
            prop_assert!((a - s.alpha).abs() <= 1e-13 * a.abs());
        }
    }

    #[test]
    fn bracket_decreases_in_both_arguments(e1 in 0.0f64..1e-4, e2 in 0.0f64..1e-4, a in 0.0f64..1e-5) {
        let b = mourre_budget(0, 0.2, 0.2, ground()).unwrap();
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        prop_assert!(b.bracket(hi, a) <= b.bracket(lo, a));
        prop_assert!(b.bracket(lo, a + 1e-6) <= b.bracket(lo, a));
        prop_assert!(b.bracket(0.0, 0.0) == 1.0);
    }

    #[test]
    fn config_text_round_trip(
        lambda in 0.01f64..0.45,
        seed in any::<u64>(),
        c in 0.0f64..0.99,
        absolute in proptest::bool::ANY,
        dt in 1e-4f64..0.05,
    ) {
        let cfg = TransportConfig {
            lambda,
            seed,
            dt,
            amplitude: if absolute { Amplitude::Absolute(c * 1e-6) } else { Amplitude::Admissible(c) },
            ..TransportConfig::default()
        };
        prop_assert_eq!(TransportConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn branches_ordered_and_above_levels(kappa in -4.0f64..4.0, dk in 0.01f64..0.5) {
        let a = solve_fiber(kappa, 2, &FiberGrid::for_kappa(kappa)).unwrap();
        let b = solve_fiber(kappa + dk, 2, &FiberGrid::for_kappa(kappa + dk)).unwrap();
        for (n, (x, y)) in a.iter().zip(&b).enumerate() {
            prop_assert!(x.alpha > n as f64 + 0.5);
            prop_assert!(y.alpha < x.alpha);
            prop_assert!(x.boundary_derivative > 0.0);
        }
        prop_assert!(a[0].alpha < a[1].alpha && a[1].alpha < a[2].alpha);
        prop_assert!(a[0].overlap(&a[1]).abs() < 1e-8);
    }

    #[test]
    fn sandwich_bounds_are_ordered(lo in 0.62f64..1.4, w in 0.01f64..0.1) {
        let hi = (lo + w).min(1.5);
        let win = nu_window(lo, hi, ground()).unwrap();
        prop_assert!(0.0 < win.nu_minus && win.nu_minus <= win.nu_plus);
    }

    #[test]
    fn free_evolution_is_unitary_and_additive(c in -1.5f64..1.5, w in 0.1f64..0.4, s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let p = make_packet(0, PacketShape::Gaussian { center: c, width: w }, ground()).unwrap();
        let once = evolve_free(&p, s + t);
        let twice = evolve_free(&evolve_free(&p, s), t);
        prop_assert!((once.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!((y_expectation(&once) - y_expectation(&twice)).abs() < 1e-9);
        let drift = y_expectation(&once) - y_expectation(&p);
        prop_assert!((drift - (s + t) * p.drift_rate()).abs() < 1e-6);
        prop_assert!(drift <= 0.0);
    }
}
