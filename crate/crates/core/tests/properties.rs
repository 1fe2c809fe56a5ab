use std::f64::consts::PI;

use gamma_core::echo::cumulative_stats;
use gamma_core::fock::hermitian_deviation;
use gamma_core::{
    echo_general, echo_pure, evolve, evolve_delta, random_pure_state, split_diagonal, EchoModel,
    DeltaParams, GammaParams, PureState, C64,
};
use proptest::prelude::*;

fn with_phases(psi: &PureState, phases: &[f64]) -> PureState {
    let amplitudes = psi
        .amplitudes()
        .iter()
        .zip(phases)
        .map(|(c, phi)| c * C64::from_polar(1.0, *phi))
        .collect();
    PureState::from_amplitudes(amplitudes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn echo_ignores_amplitude_phases(
        seed in 0u64..10_000,
        n_max in 1usize..20,
        gamma in -2.0f64..4.0,
        t in 0.0f64..500.0,
        phases in prop::collection::vec(0.0f64..(2.0 * PI), 20),
    ) {
        let psi = random_pure_state(n_max, seed);
        let rotated = with_phases(&psi, &phases[..=n_max]);
        let a = echo_pure(&psi, gamma, 1.0, 1.0, t).unwrap();
        let b = echo_pure(&rotated, gamma, 1.0, 1.0, t).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn evolution_preserves_state_invariants(
        seed in 0u64..10_000,
        gamma in -2.0f64..4.0,
        omega in -1.0f64..1.0,
        t in 0.0f64..100.0,
    ) {
        let rho = random_pure_state(10, seed).to_density();
        let params = GammaParams { omega, ..GammaParams::with_gamma(gamma) };
        let rt = evolve(&rho, &params, t).unwrap();
        prop_assert!(hermitian_deviation(rt.matrix()) < 1e-12);
        prop_assert!((rt.matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!((rt.purity() - 1.0).abs() < 1e-12);
        prop_assert_eq!(rt.populations(), rho.populations());
    }

    #[test]
    fn diagonal_split_is_exact(seed in 0u64..10_000, t in 0.0f64..50.0) {
        let rho = evolve_delta(&random_pure_state(8, seed).to_density(), 1.7, 1.0, 1.0, t).unwrap();
        let (d, nd) = split_diagonal(rho.matrix());
        prop_assert_eq!(&(d + nd), rho.matrix());
    }

    #[test]
    fn fidelity_symmetric_and_bounded(a in 0u64..10_000, b in 0u64..10_000) {
        let r1 = random_pure_state(6, a).to_density();
        let r2 = random_pure_state(6, b).to_density();
        let f12 = echo_general(&r1, &r2).unwrap();
        let f21 = echo_general(&r2, &r1).unwrap();
        prop_assert!((f12 - f21).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&f12));
        if a != b {
            prop_assert!(f12 < 1.0 - 1e-6);
        }
    }

    // t + 2π carries a rounding error of order ulp(t) that the gaps θ_m − θ_n
    // amplify, so the ranges keep max|Δθ|·ulp(t) well under the tolerance
    #[test]
    fn integer_gamma_echo_is_periodic(
        seed in 0u64..10_000,
        gamma in 1u32..4,
        t in 0.0f64..20.0,
    ) {
        let psi = random_pure_state(8, seed);
        let delta = DeltaParams::new(gamma as f64, 1.0, 1.0).unwrap();
        let model = EchoModel::new(&psi, &delta).unwrap();
        prop_assert!((model.echo(t) - model.echo(t + 2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn cumulative_stats_match_definition(values in prop::collection::vec(0.0f64..1.0, 1..200)) {
        let (mean, var) = cumulative_stats(&values);
        let n = values.len();
        let m = values.iter().sum::<f64>() / n as f64;
        let v = values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
        prop_assert!((mean[n - 1] - m).abs() < 1e-12);
        prop_assert!((var[n - 1] - v).abs() < 1e-12);
        prop_assert!(var.iter().all(|x| *x >= 0.0));
    }
}
