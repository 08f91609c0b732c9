//! Monte-Carlo sweeps over sampled channels and random input states.
//!
//! Trials run in parallel; each trial owns a generator derived from
//! (seed, trial index) and results are merged in trial order, so summaries
//! are independent of scheduling.

use super::checks::{
    covariance_defect, monotone_report, probe_states, work_locking_check, DEFAULT_T_SAMPLES,
};
use super::{sample_control_operation, sample_thermal_operation, BathSpec};
use crate::divergences::AlphaGrid;
use crate::error::Result;
use crate::linops::{trace_norm_hermitian, ComplexMatrix};
use crate::states::{dephase, gibbs_state, DensityMatrix, Hamiltonian};
use crate::tol;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Full-rank random state: GG†/Tr[GG†] with G complex Ginibre.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let gg = g.matmul(&g.adjoint());
    let t = gg.trace().re;
    DensityMatrix::new(gg.scale_real(1.0 / t)).expect("ginibre state")
}

/// Haar-ish random pure state from a normalized Gaussian ket.
pub fn random_pure(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let ket = ComplexMatrix::from_fn(dim, 1, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    DensityMatrix::pure(&ket).expect("gaussian ket")
}

/// Per-trial generator seed: splitmix64 over the (seed, index) pair.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Configuration of a second-law Monte-Carlo sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub system: Hamiltonian,
    pub beta: f64,
    /// Bath dimensions cycled across channel trials.
    pub bath_dims: Vec<usize>,
    pub channels: usize,
    pub states_per_channel: usize,
    pub seed: u64,
    pub grid: AlphaGrid,
    pub tolerance: f64,
    /// Skip the per-channel covariance evaluation (it dominates runtime
    /// when only the monotone laws are of interest).
    pub check_covariance: bool,
}

impl SweepConfig {
    pub fn new(system: Hamiltonian, beta: f64) -> Self {
        Self {
            system,
            beta,
            bath_dims: vec![super::DEFAULT_BATH_DIM],
            channels: 200,
            states_per_channel: 20,
            seed: 0,
            grid: AlphaGrid::default(),
            tolerance: tol::VERDICT,
            check_covariance: true,
        }
    }
}

/// Worst-case defects observed across a sweep.
#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub channels: usize,
    pub states_per_channel: usize,
    /// Max ‖E(γ) - γ‖₁.
    pub max_gibbs_defect: f64,
    /// Max covariance defect over channels (NaN-free; 0 when skipped).
    pub max_covariance_defect: f64,
    /// Max ‖E(D(ρ)) - D(E(ρ))‖₁ over channels and probe states.
    pub max_commutation_defect: f64,
    /// Largest finite ΔF_α across all trials.
    pub max_delta_f: f64,
    /// Largest finite ΔA_α across all trials.
    pub max_delta_a: f64,
    /// Trials whose verdict was not CONSISTENT.
    pub violations: usize,
    pub all_consistent: bool,
}

struct TrialOutcome {
    gibbs_defect: f64,
    covariance: f64,
    commutation: f64,
    max_delta_f: f64,
    max_delta_a: f64,
    violations: usize,
}

/// Sample `channels` thermal operations and push `states_per_channel`
/// random inputs through each, recording Gibbs preservation, covariance,
/// the dephasing commutation identity and both families of second laws.
pub fn second_law_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    let thermal = gibbs_state(&cfg.system, cfg.beta)?;
    let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.channels)
        .into_par_iter()
        .map(|i| {
            let bath_dim = cfg.bath_dims[i % cfg.bath_dims.len()];
            let bath = BathSpec::matched_to(&cfg.system, bath_dim, cfg.beta)?;
            let channel =
                sample_thermal_operation(&cfg.system, &bath, trial_seed(cfg.seed, i as u64))?;

            let gamma_out = channel.apply(thermal.gibbs())?;
            let gibbs_defect =
                trace_norm_hermitian(&gamma_out.matrix().sub(thermal.gibbs().matrix()))?;

            let covariance = if cfg.check_covariance {
                covariance_defect(&channel, &cfg.system, &DEFAULT_T_SAMPLES)?
            } else {
                0.0
            };

            let mut commutation = 0.0f64;
            for probe in probe_states(cfg.system.dim()) {
                let lhs = channel.apply(&dephase(&probe, &cfg.system)?)?;
                let rhs = dephase(&channel.apply(&probe)?, &cfg.system)?;
                commutation =
                    commutation.max(trace_norm_hermitian(&lhs.matrix().sub(rhs.matrix()))?);
            }

            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed ^ 0xa5a5, i as u64));
            let mut max_delta_f = f64::NEG_INFINITY;
            let mut max_delta_a = f64::NEG_INFINITY;
            let mut violations = 0usize;
            for j in 0..cfg.states_per_channel {
                // Mix of full-rank and pure inputs.
                let rho = if j % 4 == 3 {
                    random_pure(cfg.system.dim(), &mut rng)
                } else {
                    random_density(cfg.system.dim(), &mut rng)
                };
                let sigma = channel.apply(&rho)?;
                let report = monotone_report(&rho, &sigma, &thermal, &cfg.grid, cfg.tolerance)?;
                let (df, da) = report.max_finite_deltas();
                max_delta_f = max_delta_f.max(df);
                max_delta_a = max_delta_a.max(da);
                if report.verdict != super::Verdict::Consistent {
                    violations += 1;
                }
            }
            Ok(TrialOutcome {
                gibbs_defect,
                covariance,
                commutation,
                max_delta_f,
                max_delta_a,
                violations,
            })
        })
        .collect();

    let mut summary = SweepSummary {
        channels: cfg.channels,
        states_per_channel: cfg.states_per_channel,
        max_gibbs_defect: 0.0,
        max_covariance_defect: 0.0,
        max_commutation_defect: 0.0,
        max_delta_f: f64::NEG_INFINITY,
        max_delta_a: f64::NEG_INFINITY,
        violations: 0,
        all_consistent: true,
    };
    for outcome in outcomes {
        let o = outcome?;
        summary.max_gibbs_defect = summary.max_gibbs_defect.max(o.gibbs_defect);
        summary.max_covariance_defect = summary.max_covariance_defect.max(o.covariance);
        summary.max_commutation_defect = summary.max_commutation_defect.max(o.commutation);
        summary.max_delta_f = summary.max_delta_f.max(o.max_delta_f);
        summary.max_delta_a = summary.max_delta_a.max(o.max_delta_a);
        summary.violations += o.violations;
    }
    summary.all_consistent = summary.violations == 0;
    Ok(summary)
}

/// Work-locking sweep: max total-variation distance between the work
/// distributions of ρ and D(ρ) over sampled thermal channels, plus the
/// same maximum for unrestricted (non-covariant) control channels.
#[derive(Clone, Debug)]
pub struct WorkLockingSweep {
    pub max_locking_tv: f64,
    pub control_max_tv: f64,
}

pub fn work_locking_sweep(
    h_sys: &Hamiltonian,
    rho: &DensityMatrix,
    w: f64,
    beta: f64,
    bath_dim: usize,
    channels: usize,
    seed: u64,
) -> Result<WorkLockingSweep> {
    let (h_w, _, _) = crate::states::work_bit(w);
    let h_joint = Hamiltonian::new(super::joint_hamiltonian(h_sys, &h_w).matrix().clone())?;
    let bath = BathSpec::matched_to(&h_joint, bath_dim, beta)?;

    let thermal_tvs: Vec<Result<f64>> = (0..channels)
        .into_par_iter()
        .map(|i| {
            let e = sample_thermal_operation(&h_joint, &bath, trial_seed(seed, i as u64))?;
            work_locking_check(&e, rho, h_sys, &h_w)
        })
        .collect();
    let control_tvs: Vec<Result<f64>> = (0..channels)
        .into_par_iter()
        .map(|i| {
            let e = sample_control_operation(
                h_joint.dim(),
                &bath,
                trial_seed(seed ^ 0xc0ff_ee00, i as u64),
            )?;
            work_locking_check(&e, rho, h_sys, &h_w)
        })
        .collect();

    let mut out = WorkLockingSweep {
        max_locking_tv: 0.0,
        control_max_tv: 0.0,
    };
    for tv in thermal_tvs {
        out.max_locking_tv = out.max_locking_tv.max(tv?);
    }
    for tv in control_tvs {
        out.control_max_tv = out.control_max_tv.max(tv?);
    }
    Ok(out)
}
