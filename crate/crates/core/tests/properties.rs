use num_complex::Complex;
use proptest::prelude::*;
use tdho::classical::{solve_zeta, SigmaModel};
use tdho::diagnostics::fit_decay_rate;
use tdho::harness::{parse_config, Experiment, Family, RunConfig, SigmaSpec};
use tdho::numeric::geomspace;
use tdho::params::{b_window, lambda_threshold};
use tdho::spectral::{dilate, fourier, inverse_fourier, mdfm_between, modulate, undilate, Field, Grid};

fn field(n: usize, size: usize, values: Vec<(f64, f64)>) -> Field<f64> {
    let g = Grid::centered(n, size, 8.0).unwrap();
    Field::new(g, values.into_iter().map(|(a, b)| Complex::new(a, b)).collect()).unwrap()
}

fn values(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_are_unitary(v in values(64), tau in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64]) {
        let f = field(1, 64, v);
        let m = f.l2_norm();
        prop_assert!(rel(modulate(&f, tau).unwrap().l2_norm(), m) < 1e-12);
        prop_assert!(rel(dilate(&f, tau).unwrap().l2_norm(), m) < 1e-12);
        prop_assert!(rel(fourier(&f).l2_norm(), m) < 1e-12);
        let back = inverse_fourier(&fourier(&f));
        prop_assert!(back.relative_distance(&f).unwrap() < 1e-13);
        let d = undilate(&dilate(&f, tau).unwrap(), tau).unwrap();
        prop_assert!(d.relative_distance(&f).unwrap() < 1e-15);
    }

    #[test]
    fn transforms_are_unitary_in_2d(v in values(256), tau in 0.2..4.0f64) {
        let f = field(2, 16, v);
        let m = f.l2_norm();
        prop_assert!(rel(fourier(&f).l2_norm(), m) < 1e-12);
        prop_assert!(rel(dilate(&f, tau).unwrap().l2_norm(), m) < 1e-12);
    }

    #[test]
    fn propagator_is_unitary(v in values(128), s in 2.0..20.0f64, t in 2.0..20.0f64) {
        let cs = solve_zeta(&SigmaModel::inverse_square(0.09, 1.0).unwrap(), 25.0, 1e-10).unwrap();
        let f = field(1, 128, v);
        let g = mdfm_between(&cs, t, s, &f).unwrap();
        prop_assert!(rel(g.l2_norm(), f.l2_norm()) < 1e-10);
    }

    #[test]
    fn wronskian_is_conserved(s0 in 0.001..0.249f64, r0 in 0.2..3.0f64, c in 0.0..2.0f64) {
        let tol = 1e-10;
        for sigma in [SigmaModel::inverse_square(s0, r0).unwrap(), SigmaModel::matched_inverse_square(s0, r0).unwrap(), SigmaModel::Constant(c)] {
            let cs = solve_zeta(&sigma, 200.0, tol).unwrap();
            prop_assert!(cs.max_wronskian_drift() <= 10.0 * tol, "{:?} {}", sigma, cs.max_wronskian_drift());
        }
    }

    #[test]
    fn strict_window_nests_in_nominal(n in 1usize..=3, frac in 0.0..0.999f64, afrac in 0.01..0.999f64) {
        let thr: f64 = lambda_threshold(n).unwrap();
        let lambda = frac * thr;
        let amax = tdho::params::alpha_max(n, lambda).unwrap();
        let w = b_window(n, lambda, afrac * amax).unwrap();
        prop_assert!(w.strict.lo >= w.nominal.lo && w.strict.hi == w.nominal.hi);
        prop_assert_eq!(w.discrepancy, w.strict.lo > w.nominal.lo);
        let boundary = (5.0 - 17f64.sqrt()) / 4.0;
        prop_assert_eq!(w.discrepancy, n == 1 && lambda < boundary);
    }

    #[test]
    fn power_law_fit_is_exact(c in 0.01..100.0f64, b in -2.0..3.0f64, lo in 0.5..50.0f64, k in 5usize..40) {
        let ts = geomspace(lo, lo * 20.0, k);
        let es: Vec<f64> = ts.iter().map(|t| c * t.powf(-b)).collect();
        let f = fit_decay_rate(&ts, &es).unwrap();
        prop_assert!((f.b_est - b).abs() < 1e-10);
        prop_assert!(rel(f.c, c) < 1e-10);
        prop_assert!((f.r_squared - 1.0).abs() < 1e-10);
    }

    #[test]
    fn config_round_trip(
        exp in 0usize..5,
        kind in 0usize..4,
        s0 in 0.001..0.249f64,
        amp in 0.001..1.0f64,
        mu in -2.0..2.0f64,
        n in 1usize..=3,
        p in 3u32..12,
        t0 in 2.0..50.0f64,
        span in 1.5..100.0f64,
        alpha in prop::option::of(0.1..1.0f64),
        lambdas in prop::collection::vec(0.0..0.49f64, 0..5),
        seed in any::<u64>(),
    ) {
        let mut cfg = RunConfig::default();
        cfg.experiment = [Experiment::Classical, Experiment::Params, Experiment::Evolve, Experiment::VerifyTheorem, Experiment::Picard][exp];
        cfg.sigma = match kind {
            0 => SigmaSpec::Zero,
            1 => SigmaSpec::Constant { value: s0 },
            2 => SigmaSpec::InverseSquare { sigma0: s0, r0: 1.5 },
            _ => SigmaSpec::MatchedInverseSquare { sigma0: s0, r0: 0.5 },
        };
        cfg.profile.family = Family::Gaussian { amplitude: amp, width: 1.0 / amp };
        cfg.profile.mu = mu;
        cfg.profile.n = n;
        cfg.profile.points = 1 << p;
        cfg.window.t_start = t0;
        cfg.window.t_end = t0 * span;
        cfg.parameters.alpha = alpha;
        cfg.sweep_lambdas = lambdas;
        cfg.seed = seed;
        cfg.validate().unwrap();
        let text = cfg.to_text();
        let again = parse_config(&text).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.to_text(), text);
    }
}
