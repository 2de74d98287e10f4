mod common;

use std::f64::consts::{FRAC_PI_2, TAU};

use ethavg::distinguish::{dist_set, dist_single, dmean_max_heuristic, eigenstate_stats, subsystem_distance, Probe};
use ethavg::models::{build_eigenbasis_measurements, build_hamiltonian, build_random_coarse_measurements, ModelSpec};
use ethavg::qcore::{
    partial_trace, trace_distance, CMatrix, CVector, DensityMatrix, HermitianOperator, MeasurementSet, Povm,
    SpectralSystem, SubsystemOrder, SubsystemPartition, C64,
};
use ethavg::rng::seeded;
use ethavg::thermal::{microcanonical, select_band_by_index, DegeneracyStructure};
use proptest::prelude::*;

#[test]
fn eigenstate_projector_povm_value() {
    let sys = common::diag_system(&[0.0, 1.0, 2.0, 3.0]);
    let band = select_band_by_index(&sys, 0..=3).unwrap();
    let ms = build_eigenbasis_measurements(&band, &sys).unwrap();
    let omega = microcanonical(&band);
    let rho = DensityMatrix::pure(&sys.eigenvector(2)).unwrap();
    assert!((dist_single(&rho, &omega, &ms.povms()[2]).unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn eigenbasis_set_stats_are_flat() {
    for d in [2usize, 5, 10, 16] {
        let sys = common::rotated_system(&(0..d).map(|n| n as f64 * 1.3).collect::<Vec<_>>(), d as u64);
        let band = select_band_by_index(&sys, 0..=d - 1).unwrap();
        let ms = build_eigenbasis_measurements(&band, &sys).unwrap();
        let s = eigenstate_stats(&band, &sys, &Probe::Set(&ms)).unwrap();
        let expected = 1.0 - 1.0 / d as f64;
        for v in [s.mean, s.rms, s.max] {
            assert!((v - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn single_state_band_is_thermal() {
    let sys = build_hamiltonian(&ModelSpec::gue(8, 1)).unwrap();
    let band = select_band_by_index(&sys, 3..=3).unwrap();
    let ms = build_random_coarse_measurements(8, 2, 3, 5).unwrap();
    let part = SubsystemPartition::leading(2, 8).unwrap();
    for probe in [Probe::Set(&ms), Probe::Subsystem(part)] {
        let s = eigenstate_stats(&band, &sys, &probe).unwrap();
        assert!(s.mean.abs() < 1e-12 && s.rms.abs() < 1e-12 && s.max.abs() < 1e-12);
    }
}

/// Positive-part projector of a Hermitian matrix.
fn positive_projector(x: &CMatrix) -> CMatrix {
    let eig = x.clone().symmetric_eigen();
    let n = x.nrows();
    let mut p = CMatrix::zeros(n, n);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 0.0 {
            let v = eig.eigenvectors.column(i);
            p += v * v.adjoint();
        }
    }
    p
}

#[test]
fn subsystem_distance_matches_helstrom_measurement() {
    let mut rng = seeded(31);
    let part = SubsystemPartition::new(2, 2, SubsystemOrder::SubsystemFirst).unwrap();
    for _ in 0..50 {
        let rho = common::random_density(4, 2, &mut rng);
        let sigma = common::random_density(4, 4, &mut rng);
        let rs = partial_trace(&rho, &part).unwrap();
        let ss = partial_trace(&sigma, &part).unwrap();
        let diff = rs.matrix() - ss.matrix();
        let p = positive_projector(&diff);
        let helstrom = (p.clone() * &diff).trace().re;
        let value = subsystem_distance(&rho, &sigma, &part).unwrap();
        assert!((value - helstrom).abs() < 1e-10);

        // The same value from the product POVM {P ⊗ 𝕀, (𝕀 − P) ⊗ 𝕀}.
        let id2 = CMatrix::identity(2, 2);
        let lift = p.kronecker(&id2);
        let comp = CMatrix::identity(4, 4) - &lift;
        let povm = Povm::new(vec![
            HermitianOperator::new(lift).unwrap(),
            HermitianOperator::new(comp).unwrap(),
        ])
        .unwrap();
        let ms = MeasurementSet::new(vec![povm]).unwrap();
        assert!((dist_set(&rho, &sigma, &ms).unwrap().value - value).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn measurement_sets_respect_data_processing(seed in any::<u64>(), dim in 2usize..7, n_povms in 1usize..4) {
        let mut rng = seeded(seed);
        let rho = common::random_density(dim, 1 + seed as usize % dim, &mut rng);
        let sigma = common::random_density(dim, dim, &mut rng);
        let ms = build_random_coarse_measurements(dim, n_povms, 2 + seed as usize % 3, seed).unwrap();
        let d = dist_set(&rho, &sigma, &ms).unwrap().value;
        prop_assert!(d <= trace_distance(&rho, &sigma).unwrap() + 1e-10);
        prop_assert!(d >= 0.0);

        // Adding a POVM never lowers the value.
        let extra = build_random_coarse_measurements(dim, 1, 3, seed ^ 0x5555).unwrap();
        let mut povms = ms.povms().to_vec();
        povms.extend(extra.povms().iter().cloned());
        let bigger = MeasurementSet::new(povms).unwrap();
        prop_assert!(dist_set(&rho, &sigma, &bigger).unwrap().value >= d);
    }

    #[test]
    fn time_averages_obey_the_convexity_chain(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let sys = build_hamiltonian(&ModelSpec::gue(12, seed)).unwrap();
        let band = select_band_by_index(&sys, 2..=9).unwrap();
        let omega_mc = microcanonical(&band);
        let ms = build_random_coarse_measurements(12, 2, 3, seed).unwrap();
        let part = SubsystemPartition::leading(3, 12).unwrap();
        let weights = ethavg::models::random_simplex_weights(band.d(), &mut rng);
        let mut full = vec![0.0; 12];
        for (n, w) in band.indices().zip(&weights) {
            full[n] = *w;
        }
        let omega = ethavg::thermal::TimeAveragedState::from_weights(&sys, full).unwrap();
        for probe in [Probe::Set(&ms), Probe::Subsystem(part)] {
            let per: Vec<f64> = band
                .indices()
                .map(|n| {
                    let rho = DensityMatrix::pure(&sys.eigenvector(n)).unwrap();
                    ethavg::distinguish::distance(&rho, &omega_mc, &probe).unwrap()
                })
                .collect();
            let lhs = ethavg::distinguish::distance(omega.state(), &omega_mc, &probe).unwrap();
            let avg: f64 = weights.iter().zip(&per).map(|(w, v)| w * v).sum();
            let max = per.iter().cloned().fold(0.0, f64::max);
            prop_assert!(lhs <= avg + 1e-10);
            prop_assert!(avg <= max + 1e-12);
        }
    }
}

#[test]
fn heuristic_without_degeneracy_is_the_mean() {
    let sys = build_hamiltonian(&ModelSpec::gue(16, 2)).unwrap();
    let band = select_band_by_index(&sys, 4..=11).unwrap();
    let deg = DegeneracyStructure::from_system(&sys);
    let ms = build_random_coarse_measurements(16, 2, 2, 1).unwrap();
    let probe = Probe::Set(&ms);
    let est = dmean_max_heuristic(&band, &sys, &deg, &probe, 3, 0).unwrap();
    let stats = eigenstate_stats(&band, &sys, &probe).unwrap();
    assert_eq!(est.value, stats.mean);
}

/// Spectrum {0, 1, 1, 2} in a Haar basis: one two-dimensional block.
fn one_block_system(seed: u64) -> SpectralSystem {
    common::rotated_system(&[0.0, 1.0, 1.0, 2.0], seed)
}

fn block_objective(sys: &SpectralSystem, omega: &DensityMatrix, part: &SubsystemPartition, theta: f64, phi: f64) -> f64 {
    let a = sys.eigenvector(1);
    let b = sys.eigenvector(2);
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    let u: CVector = &a * C64::new(c, 0.0) + &b * (e * s);
    let v: CVector = &b * C64::new(c, 0.0) - &a * (e.conj() * s);
    let du = subsystem_distance(&DensityMatrix::pure(&u).unwrap(), omega, part).unwrap();
    let dv = subsystem_distance(&DensityMatrix::pure(&v).unwrap(), omega, part).unwrap();
    du + dv
}

/// Exhaustive grid over (θ, φ) followed by two rounds of local zoom.
fn grid_maximum(sys: &SpectralSystem, omega: &DensityMatrix, part: &SubsystemPartition) -> f64 {
    let (nt, np) = (181, 361);
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..nt {
        for j in 0..np {
            let t = FRAC_PI_2 * i as f64 / (nt - 1) as f64;
            let p = TAU * j as f64 / (np - 1) as f64;
            let v = block_objective(sys, omega, part, t, p);
            if v > best.2 {
                best = (t, p, v);
            }
        }
    }
    let (mut ht, mut hp) = (FRAC_PI_2 / (nt - 1) as f64, TAU / (np - 1) as f64);
    for _ in 0..6 {
        let (t0, p0) = (best.0, best.1);
        for i in -20..=20 {
            for j in -20..=20 {
                let t = t0 + ht * i as f64 / 10.0;
                let p = p0 + hp * j as f64 / 10.0;
                let v = block_objective(sys, omega, part, t, p);
                if v > best.2 {
                    best = (t, p, v);
                }
            }
        }
        ht /= 10.0;
        hp /= 10.0;
    }
    best.2
}

#[test]
fn heuristic_matches_grid_on_a_single_block() {
    let part = SubsystemPartition::new(2, 2, SubsystemOrder::SubsystemFirst).unwrap();
    for seed in 0..4 {
        let sys = one_block_system(seed);
        let band = select_band_by_index(&sys, 0..=3).unwrap();
        let omega = microcanonical(&band);
        let deg = DegeneracyStructure::from_system(&sys);
        assert_eq!(deg.g(), 2);
        let probe = Probe::Subsystem(part);
        let est = dmean_max_heuristic(&band, &sys, &deg, &probe, 4, seed).unwrap();
        let fixed: f64 = [0usize, 3]
            .iter()
            .map(|&n| subsystem_distance(&DensityMatrix::pure(&sys.eigenvector(n)).unwrap(), &omega, &part).unwrap())
            .sum();
        let grid = (fixed + grid_maximum(&sys, &omega, &part)) / 4.0;
        assert!((est.value - grid).abs() < 1e-6, "seed {seed}: heuristic {} vs grid {grid}", est.value);
        assert!(est.value >= est.unrotated_mean);

        // The returned basis is orthonormal and reproduces the value.
        let b = &est.basis;
        assert!((b.adjoint() * b - CMatrix::identity(4, 4)).norm() < 1e-10);
        let again = ethavg::distinguish::stats_in_basis(&band, b, &probe).unwrap();
        assert!((again.mean - est.value).abs() < 1e-12);
    }
}
