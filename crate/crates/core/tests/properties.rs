use std::f64::consts::PI;

use fracshe::cli_runner::{parse_config, Experiment, ExperimentConfig};
use fracshe::special_fn::gamma;
use fracshe::{
    ml_neg, sample_noise, simulate, Basis, DomainSpec, FracOrder, Grid, InitialCondition, KernelKind, Model, Policy,
    SigmaSpec,
};
use proptest::prelude::*;

fn small_grid() -> Grid {
    Grid::new(8, 0.05, 0.5)
}

fn model(beta: f64, lambda: f64, c: f64, amplitude: f64) -> Model {
    let mut m = Model::new(FracOrder::new(beta).unwrap(), lambda, PI);
    m.sigma = SigmaSpec::Linear { c };
    m.u0 = InitialCondition::Mode { k: 1, amplitude };
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ml_sandwich(beta in 0.05f64..0.999, lx in -3.0f64..3.0) {
        let x = 10f64.powf(lx);
        let e = ml_neg(FracOrder::new(beta).unwrap(), x).unwrap();
        let upper = 1.0 / (1.0 + x / gamma(1.0 + beta));
        let lower = 1.0 / (1.0 + gamma(1.0 - beta) * x);
        prop_assert!(e <= upper * (1.0 + 1e-12), "upper: {e} > {upper}");
        prop_assert!(e >= lower * (1.0 - 1e-12), "lower: {e} < {lower}");
    }

    #[test]
    fn ml_is_decreasing(beta in 0.05f64..1.0, x in 0.0f64..200.0, dx in 1e-3f64..5.0) {
        let b = FracOrder::new(beta).unwrap();
        let (a, c) = (ml_neg(b, x).unwrap(), ml_neg(b, x + dx).unwrap());
        prop_assert!(c < a && c > 0.0);
    }

    #[test]
    fn kernel_is_symmetric(beta in 0.2f64..1.0, t in 0.05f64..3.0, x in 0.0f64..PI, y in 0.0f64..PI) {
        let b = Basis::new(DomainSpec::new(PI, 64).with_tail_tol(1.0), Policy::default()).unwrap();
        let kind = KernelKind::from_order(FracOrder::new(beta).unwrap());
        prop_assert_eq!(b.kernel(kind, t, x, y).unwrap(), b.kernel(kind, t, y, x).unwrap());
        prop_assert!(b.kernel(kind, t, 0.0, y).unwrap().abs() < 1e-12);
    }

    #[test]
    fn solution_is_linear_in_the_initial_datum(seed in any::<u64>(), a in 0.1f64..10.0) {
        let g = small_grid();
        let noise = sample_noise(&g, PI, seed, 0).unwrap();
        let one = simulate(&model(0.6, 1.0, 1.0, 1.0), &g, &noise).unwrap();
        let scaled = simulate(&model(0.6, 1.0, 1.0, a), &g, &noise).unwrap();
        for (u, v) in one.values().iter().zip(scaled.values()) {
            prop_assert!((a * u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn antithetic_noise_equals_flipped_diffusion(seed in any::<u64>(), c in 0.2f64..3.0) {
        let g = small_grid();
        let noise = sample_noise(&g, PI, seed, 3).unwrap();
        let plus = simulate(&model(0.5, 0.7, c, 1.0), &g, &noise).unwrap();
        let minus = simulate(&model(0.5, 0.7, -c, 1.0), &g, &noise.negated()).unwrap();
        prop_assert_eq!(plus.values(), minus.values());
    }

    #[test]
    fn same_seed_same_path(seed in any::<u64>(), stream in 0u64..1000) {
        let g = small_grid();
        let m = model(0.8, 0.5, 1.0, 1.0);
        let a = simulate(&m, &g, &sample_noise(&g, PI, seed, stream).unwrap()).unwrap();
        let b = simulate(&m, &g, &sample_noise(&g, PI, seed, stream).unwrap()).unwrap();
        let other = simulate(&m, &g, &sample_noise(&g, PI, seed, stream + 1).unwrap()).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert_ne!(a.values(), other.values());
    }

    #[test]
    fn zero_lambda_is_deterministic(seed in any::<u64>()) {
        let g = small_grid();
        let m = model(0.5, 0.0, 1.0, 1.0);
        let a = simulate(&m, &g, &sample_noise(&g, PI, seed, 0).unwrap()).unwrap();
        let b = simulate(&m, &g, &sample_noise(&g, PI, seed ^ 1, 0).unwrap()).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn config_round_trips(
        seed in any::<u64>(),
        beta in 0.01f64..=1.0,
        lambda in 0.0f64..50.0,
        cells in 2usize..200,
        replicas in 2usize..1000,
        p in 1u32..8,
    ) {
        let doc = format!(
            "output_dir = \"o\"\n[model]\nbeta = {beta:?}\nlambda = {lambda:?}\n[grid]\ncells = {cells}\ndt = 0.25\nt_final = 2.0\n\
             [mc]\nseed = \"{seed}\"\nreplicas = {replicas}\n[experiment]\nkind = \"continuity\"\np = {}\n",
            2 * p
        );
        let cfg: ExperimentConfig = parse_config(&doc).unwrap();
        let again = parse_config(&cfg.to_canonical_toml()).unwrap();
        prop_assert_eq!(&cfg, &again);
        prop_assert_eq!(cfg.digest(), again.digest());
        prop_assert_eq!(cfg.mc.seed, seed);
        prop_assert_eq!(cfg.experiment, Experiment::Continuity { p: 2 * p });
    }
}
