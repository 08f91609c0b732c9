//! Cross-module scenarios: data processing under sampled channels, the
//! classical/quantum layer consistency, and serialized channels feeding
//! the checkers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermocoh::divergences::{renyi_divergence, AlphaGrid};
use thermocoh::io;
use thermocoh::purity::{trumping_necessary_check, ProbVector};
use thermocoh::states::{dephase, gibbs_state, Hamiltonian};
use thermocoh::thermalops::{
    covariance_defect, monotone_report, random_density, sample_thermal_operation, BathSpec,
    Verdict, DEFAULT_T_SAMPLES,
};
use thermocoh::tol;

#[test]
fn data_processing_inequality_under_sampled_channels() {
    let h = Hamiltonian::from_energies(&[0.0, 1.0, 2.0]).unwrap();
    let bath = BathSpec::matched_to(&h, 4, 0.8).unwrap();
    let grid = AlphaGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    for seed in 0..12 {
        let e = sample_thermal_operation(&h, &bath, seed).unwrap();
        let rho = random_density(3, &mut rng);
        let sigma = random_density(3, &mut rng);
        let rho_out = e.apply(&rho).unwrap();
        let sigma_out = e.apply(&sigma).unwrap();
        for alpha in grid.iter() {
            let before = renyi_divergence(&rho, &sigma, alpha)
                .unwrap()
                .finite()
                .unwrap();
            let after = renyi_divergence(&rho_out, &sigma_out, alpha)
                .unwrap()
                .finite()
                .unwrap();
            assert!(
                after <= before + 1e-8,
                "seed {seed} alpha {alpha}: {after} > {before}"
            );
        }
    }
}

#[test]
fn diagonal_channel_action_passes_trumping_necessary_conditions() {
    // A sampled thermal channel keeps block-diagonal states block-diagonal
    // (for nondegenerate H, diagonal) and its classical action is a
    // Gibbs-preserving stochastic map, so the grid conditions must PASS.
    let h = Hamiltonian::from_energies(&[0.0, 1.0]).unwrap();
    let tp = gibbs_state(&h, 1.0).unwrap();
    let bath = BathSpec::matched_to(&h, 4, 1.0).unwrap();
    let grid = AlphaGrid::default();
    let gamma =
        ProbVector::new((0..2).map(|k| tp.gibbs().matrix().get(k, k).re).collect()).unwrap();
    for seed in 0..20 {
        let e = sample_thermal_operation(&h, &bath, seed).unwrap();
        let p = ProbVector::new(vec![0.15, 0.85]).unwrap();
        let rho = thermocoh::states::DensityMatrix::new(
            thermocoh::linops::ComplexMatrix::from_real_diag(p.entries()),
        )
        .unwrap();
        let sigma = e.apply(&rho).unwrap();
        // Output off-diagonals vanish: [E, D_H] = 0.
        assert!(sigma.matrix().get(0, 1).norm() < 1e-10);
        let p_prime = ProbVector::new(
            (0..2)
                .map(|k| sigma.matrix().get(k, k).re.max(0.0))
                .collect(),
        )
        .unwrap();
        let verdict = trumping_necessary_check(&p, &p_prime, &gamma, &grid).unwrap();
        assert!(verdict.pass, "seed {seed}");
    }
}

#[test]
fn serialized_channel_feeds_the_checkers() {
    let dir = std::env::temp_dir().join(format!("thermocoh-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let h = Hamiltonian::from_energies(&[0.0, 1.0]).unwrap();
    let tp = gibbs_state(&h, 1.0).unwrap();
    let bath = BathSpec::matched_to(&h, 4, 1.0).unwrap();
    let e = sample_thermal_operation(&h, &bath, 2024).unwrap();

    let path = dir.join("channel.json");
    io::save_channel(&path, &h, &e).unwrap();
    let (h_back, e_back) = io::load_channel(&path).unwrap();

    let defect = covariance_defect(&e_back, &h_back, &DEFAULT_T_SAMPLES).unwrap();
    assert!(defect < 1e-8);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rho = random_density(2, &mut rng);
    let sigma = e_back.apply(&rho).unwrap();
    let report = monotone_report(&rho, &sigma, &tp, &AlphaGrid::default(), tol::VERDICT).unwrap();
    assert_eq!(report.verdict, Verdict::Consistent);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn dephasing_commutes_with_sampled_channels() {
    let h = Hamiltonian::from_energies(&[0.0, 1.0, 1.0, 2.0]).unwrap();
    let bath = BathSpec::matched_to(&h, 4, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for seed in 0..10 {
        let e = sample_thermal_operation(&h, &bath, seed).unwrap();
        let rho = random_density(4, &mut rng);
        let lhs = e.apply(&dephase(&rho, &h).unwrap()).unwrap();
        let rhs = dephase(&e.apply(&rho).unwrap(), &h).unwrap();
        let gap = thermocoh::linops::trace_norm_hermitian(&lhs.matrix().sub(rhs.matrix())).unwrap();
        assert!(gap < 1e-8, "seed {seed}: {gap:.3e}");
    }
}
