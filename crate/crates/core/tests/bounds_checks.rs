mod common;

use ethavg::bounds::{
    check_convexity_chain, check_deff_sandwich, check_equilibration, check_tails, check_thm1, check_thm2,
    check_thm3, CheckName, CheckStatus, EquilibrationVariant, InitialState, Sampling, Thm3Options,
};
use ethavg::distinguish::{eigenstate_stats, Probe};
use ethavg::models::{
    build_eigenbasis_measurements, build_hamiltonian, build_random_coarse_measurements, gaussian_profile_vector,
    random_band_vector, ModelSpec,
};
use ethavg::qcore::{HermitianOperator, MeasurementSet, Povm, SubsystemOrder, SubsystemPartition};
use ethavg::rng::seeded;
use ethavg::thermal::{
    select_band_by_fraction, select_band_by_index, time_average, time_average_pure, TimeAveragedState,
};

fn uniform_on(sys: &ethavg::qcore::SpectralSystem, indices: impl Iterator<Item = usize>) -> TimeAveragedState {
    let idx: Vec<usize> = indices.collect();
    let mut w = vec![0.0; sys.dim()];
    for &n in &idx {
        w[n] = 1.0 / idx.len() as f64;
    }
    TimeAveragedState::from_weights(sys, w).unwrap()
}

#[test]
fn thm1_microcanonical_state_is_tight() {
    let sys = build_hamiltonian(&ModelSpec::gue(32, 1)).unwrap();
    let band = select_band_by_index(&sys, 8..=23).unwrap();
    let ms = build_random_coarse_measurements(32, 2, 3, 1).unwrap();
    let omega = uniform_on(&sys, band.indices());
    for c in check_thm1(&omega, &band, &sys, &Probe::Set(&ms)).unwrap() {
        assert!(c.lhs.abs() < 1e-12 && c.rhs.abs() < 1e-12 && c.passed());
    }
}

#[test]
fn thm1_quarter_deff_gives_three_dmean() {
    let sys = build_hamiltonian(&ModelSpec::gue(64, 2)).unwrap();
    let band = select_band_by_index(&sys, 16..=47).unwrap();
    let part = SubsystemPartition::leading(4, 64).unwrap();
    let probe = Probe::Subsystem(part);
    let omega = uniform_on(&sys, (16..48).step_by(4));
    let [rms, mean] = check_thm1(&omega, &band, &sys, &probe).unwrap();
    let stats = eigenstate_stats(&band, &sys, &probe).unwrap();
    assert!((mean.context.d_eff.unwrap() - 8.0).abs() < 1e-12);
    assert!((mean.rhs - (3.0 * stats.mean).sqrt()).abs() < 1e-12);
    assert!((rms.rhs - stats.rms * 3f64.sqrt()).abs() < 1e-12);
    assert!(rms.passed() && mean.passed());
}

#[test]
fn thm1_gue_random_pure_states() {
    for seed in 0..10u64 {
        let sys = build_hamiltonian(&ModelSpec::gue(256, seed)).unwrap();
        let band = select_band_by_fraction(&sys, 0.25, 0.75).unwrap();
        assert_eq!(band.d(), 128);
        let ms = build_random_coarse_measurements(256, 2, 2, seed).unwrap();
        let part = SubsystemPartition::leading(4, 256).unwrap();
        let mut rng = seeded(seed);
        let psi = random_band_vector(&band, &sys, &mut rng).unwrap();
        let omega = time_average_pure(&psi, &sys).unwrap();
        for probe in [Probe::Set(&ms), Probe::Subsystem(part)] {
            let [rms, mean] = check_thm1(&omega, &band, &sys, &probe).unwrap();
            assert!(rms.passed() && mean.passed(), "seed {seed}: {rms:?} {mean:?}");
            assert!(rms.rhs <= mean.rhs + 1e-12);
            for c in check_convexity_chain(&omega, &band, &sys, &probe).unwrap() {
                assert!(c.passed(), "{c:?}");
            }
        }
    }
}

#[test]
fn thm1_degenerate_uses_state_eigenbasis() {
    let sys = build_hamiltonian(&ModelSpec::degenerate_block(vec![2, 3, 2, 1, 4, 2, 2], 5)).unwrap();
    let band = select_band_by_index(&sys, 0..=sys.dim() - 1).unwrap();
    let ms = build_random_coarse_measurements(sys.dim(), 2, 2, 3).unwrap();
    let mut rng = seeded(12);
    for _ in 0..20 {
        let rho0 = common::random_density(sys.dim(), 2, &mut rng);
        let omega = time_average(&rho0, &sys).unwrap();
        for c in check_thm1(&omega, &band, &sys, &Probe::Set(&ms)).unwrap() {
            assert!(c.passed(), "{c:?}");
        }
        for c in check_deff_sandwich(&omega, &band, &sys).unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }
}

#[test]
fn thm1_rejects_out_of_band_states() {
    let sys = build_hamiltonian(&ModelSpec::gue(16, 2)).unwrap();
    let band = select_band_by_index(&sys, 4..=11).unwrap();
    let ms = build_random_coarse_measurements(16, 1, 2, 0).unwrap();
    let omega = uniform_on(&sys, 0..16);
    assert!(check_thm1(&omega, &band, &sys, &Probe::Set(&ms)).is_err());
}

#[test]
fn equilibration_stationary_and_time_invariant_cases() {
    let sys = build_hamiltonian(&ModelSpec::gue(24, 7)).unwrap();
    let band = select_band_by_index(&sys, 0..=23).unwrap();
    let coarse = build_random_coarse_measurements(24, 1, 2, 2).unwrap();
    let sampling = Sampling {
        n_times: 50,
        ..Sampling::default()
    };
    let eig = InitialState::Pure(sys.eigenvector(5));
    let c = check_equilibration(&eig, &sys, &Probe::Set(&coarse), &sampling, EquilibrationVariant::FiniteSet).unwrap();
    assert!(c.lhs.abs() < 1e-12 && c.passed());

    let projectors = build_eigenbasis_measurements(&band, &sys).unwrap();
    let mut rng = seeded(1);
    let psi = random_band_vector(&band, &sys, &mut rng).unwrap();
    let c = check_equilibration(
        &InitialState::Pure(psi),
        &sys,
        &Probe::Set(&projectors),
        &sampling,
        EquilibrationVariant::FiniteSet,
    )
    .unwrap();
    assert!(c.lhs.abs() < 1e-12 && c.passed());
}

#[test]
fn equilibration_inapplicable_cases() {
    let sys = common::diag_system(&[0.0, 1.0, 2.0, 3.0]);
    let ms = build_random_coarse_measurements(4, 1, 2, 2).unwrap();
    let psi = common::random_pure(4, &mut seeded(3)).0;
    let init = InitialState::Pure(psi);
    let c = check_equilibration(&init, &sys, &Probe::Set(&ms), &Sampling::default(), EquilibrationVariant::FiniteSet).unwrap();
    assert_eq!(c.status, CheckStatus::Inapplicable);

    let sys = build_hamiltonian(&ModelSpec::gue(4, 3)).unwrap();
    let part = SubsystemPartition::leading(2, 4).unwrap();
    let c = check_equilibration(&init, &sys, &Probe::Subsystem(part), &Sampling::default(), EquilibrationVariant::FiniteSet)
        .unwrap();
    assert_eq!(c.status, CheckStatus::Inapplicable);
    let c = check_equilibration(
        &init,
        &sys,
        &Probe::Subsystem(part),
        &Sampling::default(),
        EquilibrationVariant::SubsystemDimension,
    )
    .unwrap();
    assert_ne!(c.status, CheckStatus::Inapplicable);
}

#[test]
fn equilibration_spin_chain_two_outcomes() {
    let sys = build_hamiltonian(&ModelSpec::spin_chain(8)).unwrap();
    for seed in 0..3u64 {
        let ms = build_random_coarse_measurements(256, 1, 2, seed).unwrap();
        let psi = ethavg::models::haar_vector(256, &mut seeded(seed));
        let sampling = Sampling {
            n_times: 200,
            t_max: None,
            seed,
        };
        let c = check_equilibration(&InitialState::Pure(psi), &sys, &Probe::Set(&ms), &sampling, EquilibrationVariant::FiniteSet)
            .unwrap();
        assert!(c.passed(), "{c:?}");
    }
}

#[test]
fn thm2_eigenstate_set_closed_form() {
    let sys = common::diag_system(&(0..12).map(f64::from).collect::<Vec<_>>());
    let band = select_band_by_index(&sys, 0..=11).unwrap();
    let ms = build_eigenbasis_measurements(&band, &sys).unwrap();
    let c = check_thm2(&band, &sys, &Probe::Set(&ms)).unwrap();
    assert_eq!(c.name, CheckName::Thm2Finite);
    assert!((c.lhs - 11.0 / 12.0).abs() < 1e-12);
    // Witnesses k = 3 and k = 4 reach 1/4 and 1/6; the larger one counts.
    assert_eq!(c.context.k, Some(3));
    assert!((c.context.epsilon.unwrap() - 0.25).abs() < 1e-12);
    assert!((c.rhs - 6.0).abs() < 1e-12);
    assert!(c.passed());
}

#[test]
fn thm2_thermal_band_and_size_gates() {
    let sys = common::diag_system(&(0..8).map(f64::from).collect::<Vec<_>>());
    let part = SubsystemPartition::new(2, 4, SubsystemOrder::SubsystemFirst).unwrap();
    let band = select_band_by_index(&sys, 0..=3).unwrap();
    let c = check_thm2(&band, &sys, &Probe::Subsystem(part)).unwrap();
    assert_eq!(c.name, CheckName::Thm2Subsystem);
    assert!(c.lhs.abs() < 1e-15 && c.passed());

    let small = select_band_by_index(&sys, 0..=2).unwrap();
    assert!(check_thm2(&small, &sys, &Probe::Subsystem(part)).is_err());
    let five = select_band_by_index(&sys, 0..=4).unwrap();
    let c = check_thm2(&five, &sys, &Probe::Subsystem(part)).unwrap();
    assert_eq!(c.status, CheckStatus::Inapplicable);
}

#[test]
fn thm2_spin_chain_half_chain() {
    let sys = build_hamiltonian(&ModelSpec::spin_chain(8)).unwrap();
    let band = select_band_by_index(&sys, 96..=159).unwrap();
    let part = SubsystemPartition::leading(16, 256).unwrap();
    let c = check_thm2(&band, &sys, &Probe::Subsystem(part)).unwrap();
    assert!(c.passed(), "{c:?}");
}

#[test]
fn tails_without_tails_is_thm1_mean() {
    let sys = build_hamiltonian(&ModelSpec::gue(48, 3)).unwrap();
    let band = select_band_by_index(&sys, 12..=35).unwrap();
    let ms = build_random_coarse_measurements(48, 2, 2, 4).unwrap();
    let psi = random_band_vector(&band, &sys, &mut seeded(5)).unwrap();
    let omega = time_average_pure(&psi, &sys).unwrap();
    let probe = Probe::Set(&ms);
    let t = check_tails(&omega, &band, &sys, &probe).unwrap();
    let [_, mean] = check_thm1(&omega, &band, &sys, &probe).unwrap();
    assert!((t.lhs - mean.lhs).abs() < 1e-14);
    assert!((t.rhs - mean.rhs).abs() < 1e-12);
}

#[test]
fn tails_with_outside_eigenstate() {
    let sys = build_hamiltonian(&ModelSpec::gue(20, 8)).unwrap();
    let band = select_band_by_index(&sys, 5..=14).unwrap();
    let in_band = HermitianOperator::new(band.projector().matrix().clone()).unwrap();
    let out = HermitianOperator::identity(20);
    let out = HermitianOperator::new(out.matrix() - in_band.matrix()).unwrap();
    let ms = MeasurementSet::new(vec![Povm::new(vec![in_band, out]).unwrap()]).unwrap();
    let x = 0.07;
    let mut w = vec![0.0; 20];
    for n in band.indices() {
        w[n] = (1.0 - x) / band.d() as f64;
    }
    w[17] = x;
    let omega = TimeAveragedState::from_weights(&sys, w).unwrap();
    let c = check_tails(&omega, &band, &sys, &Probe::Set(&ms)).unwrap();
    assert!((c.lhs - x).abs() < 1e-12);
    assert!((c.rhs - x).abs() < 1e-12);
    assert!(c.passed());
}

#[test]
fn tails_gue_gaussian_profiles() {
    for seed in 0..8u64 {
        let sys = build_hamiltonian(&ModelSpec::gue(256, 100 + seed)).unwrap();
        let band = select_band_by_fraction(&sys, 0.25, 0.75).unwrap();
        let ms = build_random_coarse_measurements(256, 2, 2, seed).unwrap();
        let psi = gaussian_profile_vector(&sys, &band, 0.05, &mut seeded(seed)).unwrap();
        let omega = time_average_pure(&psi, &sys).unwrap();
        let c = check_tails(&omega, &band, &sys, &Probe::Set(&ms)).unwrap();
        assert!(c.passed(), "{c:?}");
    }
}

#[test]
fn thm3_collapses_to_thm2_without_degeneracy() {
    let sys = build_hamiltonian(&ModelSpec::gue(32, 6)).unwrap();
    let band = select_band_by_index(&sys, 4..=27).unwrap();
    let ms = build_random_coarse_measurements(32, 2, 2, 6).unwrap();
    let probe = Probe::Set(&ms);
    let a = check_thm2(&band, &sys, &probe).unwrap();
    let b = check_thm3(&band, &sys, &probe, &Thm3Options::default()).unwrap();
    assert_eq!(b.name, CheckName::Thm3Finite);
    assert_eq!((a.lhs, a.rhs, a.status), (b.lhs, b.rhs, b.status));
}

#[test]
fn thm3_block_measurements_pass() {
    let sys = build_hamiltonian(&ModelSpec::degenerate_block(vec![2; 8], 4)).unwrap();
    let band = select_band_by_index(&sys, 0..=15).unwrap();
    let ms = build_eigenbasis_measurements(&band, &sys).unwrap();
    let c = check_thm3(&band, &sys, &Probe::Set(&ms), &Thm3Options::default()).unwrap();
    assert!(c.passed(), "{c:?}");
    assert!(c.context.d_eff.unwrap() >= 16.0 / 8.0 - 1e-12);
}

#[test]
fn thm3_gate_on_large_degeneracy() {
    let sys = build_hamiltonian(&ModelSpec::degenerate_block(vec![8, 8], 4)).unwrap();
    let band = select_band_by_index(&sys, 0..=15).unwrap();
    let ms = build_eigenbasis_measurements(&band, &sys).unwrap();
    let c = check_thm3(&band, &sys, &Probe::Set(&ms), &Thm3Options::default()).unwrap();
    assert_eq!(c.status, CheckStatus::Inapplicable);
}
