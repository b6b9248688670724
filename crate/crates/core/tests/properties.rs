use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use spin_kinetics::kernel::{evolve_series, kernel_ab, markov_term, rho_element, EvolutionParams};
use spin_kinetics::lineshape::{decay_rate, lorentzian, rate_w, LineshapeParams};
use spin_kinetics::spin_model::{
    dipolar_matrix, geometric_factors, gyromagnetic_ratio, magic_angle, rf_matrix, spectrum, FieldConfig, Nucleus,
    SpinGeometry,
};

fn nucleus() -> impl Strategy<Value = Nucleus> {
    prop_oneof![Just(Nucleus::proton()), Just(Nucleus::carbon13())]
}

fn geometry() -> impl Strategy<Value = SpinGeometry> {
    (-9.0f64..-7.0, 0.0f64..=PI, 0.0f64..(2.0 * PI))
        .prop_map(|(lr, th, ph)| SpinGeometry::new(10f64.powf(lr), th, ph).unwrap())
}

proptest! {
    #[test]
    fn dipolar_and_rf_are_hermitian(g in geometry(), n in nucleus(), h1 in 0.0f64..500.0, w in 0.0f64..1e9, t in 0.0f64..1e-2) {
        let gamma = gyromagnetic_ratio(&n);
        for m in [dipolar_matrix(gamma, &g).unwrap(), rf_matrix(gamma, h1, w, t)] {
            prop_assert_eq!(m, m.adjoint());
        }
    }

    #[test]
    fn rf_couples_only_neighbouring_triplet_states(n in nucleus(), h1 in 0.0f64..500.0, w in 0.0f64..1e9, t in 0.0f64..1e-2) {
        let m = rf_matrix(gyromagnetic_ratio(&n), h1, w, t);
        for (i, j) in [(0, 2), (0, 3), (1, 3), (2, 3)] {
            prop_assert_eq!(m[(i, j)], Complex64::from(0.0));
            prop_assert_eq!(m[(j, i)], Complex64::from(0.0));
        }
    }

    #[test]
    fn level_identities(g in geometry(), n in nucleus(), hz in 1e2f64..1e5) {
        let s = spectrum(&n, &g, &FieldConfig::new(hz, 1.0).unwrap()).unwrap();
        prop_assert_eq!(s.e4, 0.0);
        prop_assert!((s.e1 + s.e2 + s.e3).abs() <= 1e-6 * s.e3.abs());
        prop_assert!(((s.de12 + s.de23) - 2.0 * s.gamma_n * hz).abs() <= 1e-12 * 2.0 * s.gamma_n * hz);
        // the dipolar shift of the two transitions is antisymmetric
        let y0 = geometric_factors(&g).unwrap().y0;
        let shift = s.de12 - s.gamma_n * hz;
        prop_assert!((shift + 0.75 * s.gamma_n * s.gamma_n * spin_kinetics::spin_model::HBAR * y0).abs() <= 1e-9 * s.gamma_n * hz);
    }

    #[test]
    fn magic_angle_degeneracy(n in nucleus(), lr in -9.0f64..-7.0, phi in 0.0f64..std::f64::consts::TAU, hz in 1e2f64..1e5) {
        let g = SpinGeometry::new(10f64.powf(lr), magic_angle(), phi).unwrap();
        let s = spectrum(&n, &g, &FieldConfig::new(hz, 0.0).unwrap()).unwrap();
        prop_assert!((s.de12 - s.de23).abs() < 1e-9 * s.gamma_n * hz);
    }

    #[test]
    fn rate_identity_and_scaling(gn in 1e3f64..1e5, h1 in 0.1f64..300.0, ld in 4.0f64..8.0, w0 in 1e6f64..1e9) {
        let p = LineshapeParams::new(w0, 10f64.powf(ld)).unwrap();
        let g = decay_rate(gn, h1, &p);
        let w = rate_w(gn, h1, 1.0 / (PI * p.delta), -1).unwrap();
        prop_assert!((w - 2.0 * g).abs() <= 1e-12 * w);
        prop_assert!((decay_rate(gn, 2.0 * h1, &p) - 4.0 * g).abs() <= 1e-12 * g);
        let wide = LineshapeParams::new(w0, 2.0 * p.delta).unwrap();
        prop_assert!((decay_rate(gn, h1, &wide) - 0.5 * g).abs() <= 1e-12 * g);
    }

    #[test]
    fn lorentzian_is_symmetric(w0 in 1_000_000u32..1_000_000_000, ld in 4.0f64..8.0, x in 0u32..100_000_000) {
        // integer offsets keep w0 +- x exact
        let (w0, x) = (f64::from(w0), f64::from(x));
        let p = LineshapeParams::new(w0, 10f64.powf(ld)).unwrap();
        prop_assert_eq!(lorentzian(w0 + x, &p), lorentzian(w0 - x, &p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_denominator_stays_positive(lt in -9.0f64..-5.0, ratio in 1.0f64..400.0) {
        let delta = 1e6;
        let k = kernel_ab(10f64.powf(lt), ratio * delta, delta).unwrap();
        prop_assert!(k.eval.d_min > 0.0);
        prop_assert!(k.a.is_finite() && k.b.is_finite());
    }

    #[test]
    fn evolution_stays_physical(kappa in 1e3f64..1e6, t_frac in 0.0f64..1.0) {
        let delta = 1e6;
        let p = EvolutionParams::new(kappa * kappa / (2.0 * delta), kappa, 1.79e8, delta).unwrap();
        let t = t_frac * 5.0 / delta;
        let rho = rho_element(t, &p).unwrap();
        prop_assert!(rho.is_finite());
        prop_assert!(rho >= markov_term(t, p.gamma_minus1) - 1e-6);
        prop_assert!(rho <= 1.0 + 1e-9);
    }
}

#[test]
fn series_is_independent_of_partitioning() {
    let delta = 1e6;
    let kappa = 2.675e4 * 25.0;
    let p = EvolutionParams::new(kappa * kappa / (2.0 * delta), kappa, 1.79e8, delta).unwrap();
    let grid: Vec<f64> = (0..257).map(|i| i as f64 * 4e-8).collect();
    let whole = evolve_series(&grid, &p).unwrap();
    let mut pieces = Vec::new();
    for chunk in grid.chunks(13) {
        pieces.extend(evolve_series(chunk, &p).unwrap().rho_complete);
    }
    assert_eq!(whole.rho_complete, pieces);
    for (&t, &v) in grid.iter().zip(&whole.rho_complete) {
        assert_eq!(v.to_bits(), rho_element(t, &p).unwrap().to_bits());
    }
}

#[test]
fn gyromagnetic_ratios() {
    assert_relative_eq!(gyromagnetic_ratio(&Nucleus::proton()), 2.675e4, max_relative = 1e-3);
    assert_relative_eq!(gyromagnetic_ratio(&Nucleus::carbon13()), 6.73e3, max_relative = 1e-3);
    assert_eq!(gyromagnetic_ratio(&Nucleus::new("none", 0.0).unwrap()), 0.0);
}
