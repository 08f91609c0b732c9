//! Constructive thermal-operation simulator.
//!
//! A thermal operation is E(ρ) = Tr_bath[U (ρ ⊗ γ_b) U†] with γ_b the Gibbs
//! state of the bath and [U, H_sys ⊗ 1 + 1 ⊗ H_bath] = 0. Sampling draws U
//! block-Haar inside each total-energy eigenspace, so energy conservation
//! holds by construction rather than by projection. Any finite bath
//! Hamiltonian is admissible, so the truncated ladder bath needs no
//! truncation-error accounting.
//!
//! Whether the sampled family comes close to every covariant
//! Gibbs-preserving channel is unknown; Monte-Carlo sweeps over it are a
//! sampling heuristic, not a characterization of the thermal-operation
//! set.

mod checks;
mod sweep;

pub use checks::{
    activation_demo, catalytic_covariance_check, counterexample_search, covariance_defect,
    equilibrium_work_bound, monotone_report, probe_states, simulate_nonsymmetric,
    work_bit_transform_check, work_distribution, work_locking_check, ActivationReport,
    CatalyticCheck, Counterexample, EquilibriumBound, MonotoneEntry, MonotoneReport,
    NonsymmetricSimulation, Verdict, WorkBitTransform, WorkDistribution, DEFAULT_EPSILON_GRID,
    DEFAULT_T_SAMPLES, DEFAULT_W_GRID_MAX, DEFAULT_W_GRID_STEPS,
};
pub use sweep::{
    random_density, random_pure, second_law_sweep, trial_seed, work_locking_sweep, SweepConfig,
    SweepSummary, WorkLockingSweep,
};

use crate::error::{Error, Result};
use crate::linops::{partial_trace, tensor_product, ComplexMatrix, HermitianOperator};
use crate::states::{gibbs_state, DensityMatrix, Hamiltonian, ThermalPair};
use crate::tol;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Default bath dimension when none is requested.
pub const DEFAULT_BATH_DIM: usize = 4;

/// Heat-bath description: a ladder Hamiltonian (or any other), its
/// dimension, and the inverse temperature shared with the system.
#[derive(Clone, Debug)]
pub struct BathSpec {
    hamiltonian: Hamiltonian,
    dimension: usize,
    beta: f64,
}

impl BathSpec {
    pub fn new(hamiltonian: Hamiltonian, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidInput(format!("bad bath beta {beta}")));
        }
        Ok(Self {
            dimension: hamiltonian.dim(),
            hamiltonian,
            beta,
        })
    }

    /// Equally spaced ladder diag(0, gap, 2·gap, ...).
    pub fn ladder(gap: f64, dimension: usize, beta: f64) -> Result<Self> {
        if !(gap > 0.0) || dimension == 0 {
            return Err(Error::InvalidInput(format!(
                "bath ladder wants gap > 0 and dimension ≥ 1, got gap {gap}, dim {dimension}"
            )));
        }
        let energies: Vec<f64> = (0..dimension).map(|k| k as f64 * gap).collect();
        Self::new(Hamiltonian::from_energies(&energies)?, beta)
    }

    /// Ladder bath whose gap matches the system's smallest nonzero gap,
    /// so joint energy eigenspaces are degenerate and the sampled dynamics
    /// non-unitary. Falls back to gap 1 for fully degenerate systems.
    pub fn matched_to(system: &Hamiltonian, dimension: usize, beta: f64) -> Result<Self> {
        let gap = system.min_positive_gap().unwrap_or(1.0);
        Self::ladder(gap, dimension, beta)
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Gibbs state of the bath.
    pub fn thermal(&self) -> Result<ThermalPair> {
        gibbs_state(&self.hamiltonian, self.beta)
    }
}

/// CPTP map in Stinespring form: attach the bath Gibbs state, conjugate by
/// the global unitary, trace out the bath (subsystem index 1).
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    system_dim: usize,
    bath: BathSpec,
    bath_state: DensityMatrix,
    global_unitary: ComplexMatrix,
    traced_subsystem: usize,
    kraus: Option<Vec<ComplexMatrix>>,
    seed: u64,
    trivial_blocks: bool,
    energy_conserving: bool,
}

impl QuantumChannel {
    /// Build a channel from an explicit global unitary, validating
    /// unitarity and energy conservation against the system Hamiltonian.
    pub fn from_parts(
        h_sys: &Hamiltonian,
        bath: BathSpec,
        global_unitary: ComplexMatrix,
        seed: u64,
    ) -> Result<Self> {
        let joint = h_sys.dim() * bath.dimension();
        if global_unitary.rows() != joint || global_unitary.cols() != joint {
            return Err(Error::DimensionMismatch(format!(
                "global unitary is {}x{}, joint space wants {joint}",
                global_unitary.rows(),
                global_unitary.cols()
            )));
        }
        let u_defect = global_unitary.unitarity_defect();
        if u_defect > tol::UNITARITY {
            return Err(Error::InvalidInput(format!(
                "global unitary defect {u_defect:.3e}"
            )));
        }
        let h_tot = joint_hamiltonian(h_sys, bath.hamiltonian());
        let comm = global_unitary.commutator_defect(h_tot.matrix());
        if comm > tol::COMMUTATION {
            return Err(Error::InvalidInput(format!(
                "global unitary does not conserve energy: [U, H_tot] defect {comm:.3e}"
            )));
        }
        let bath_state = bath.thermal()?.gibbs().clone();
        Ok(Self {
            system_dim: h_sys.dim(),
            bath,
            bath_state,
            global_unitary,
            traced_subsystem: 1,
            kraus: None,
            seed,
            trivial_blocks: false,
            energy_conserving: true,
        })
    }

    /// Control channel that skips the energy-conservation requirement.
    /// The bath is still attached in its Gibbs state; the map is CPTP but
    /// generally neither Gibbs-preserving nor covariant.
    pub fn non_thermal_control(
        system_dim: usize,
        bath: BathSpec,
        global_unitary: ComplexMatrix,
        seed: u64,
    ) -> Result<Self> {
        let joint = system_dim * bath.dimension();
        if global_unitary.rows() != joint || global_unitary.cols() != joint {
            return Err(Error::DimensionMismatch(format!(
                "global unitary is {}x{}, joint space wants {joint}",
                global_unitary.rows(),
                global_unitary.cols()
            )));
        }
        let u_defect = global_unitary.unitarity_defect();
        if u_defect > tol::UNITARITY {
            return Err(Error::InvalidInput(format!(
                "global unitary defect {u_defect:.3e}"
            )));
        }
        let bath_state = bath.thermal()?.gibbs().clone();
        Ok(Self {
            system_dim,
            bath,
            bath_state,
            global_unitary,
            traced_subsystem: 1,
            kraus: None,
            seed,
            trivial_blocks: false,
            energy_conserving: false,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn global_unitary(&self) -> &ComplexMatrix {
        &self.global_unitary
    }

    pub fn traced_subsystem(&self) -> usize {
        self.traced_subsystem
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// True when no total-energy eigenspace had dimension ≥ 2, so the
    /// sampled channel acts as a (random-phase) unitary.
    pub fn trivial_blocks(&self) -> bool {
        self.trivial_blocks
    }

    pub fn is_energy_conserving(&self) -> bool {
        self.energy_conserving
    }

    /// Stinespring evaluation E(ρ) = Tr_bath[U (ρ ⊗ γ_b) U†].
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.system_dim {
            return Err(Error::DimensionMismatch(format!(
                "apply_channel: state dim {} vs channel system dim {}",
                rho.dim(),
                self.system_dim
            )));
        }
        let joint = tensor_product(rho.matrix(), self.bath_state.matrix());
        let evolved = joint.conjugate_with(&self.global_unitary);
        let reduced = partial_trace(&evolved, &[self.system_dim, self.bath.dimension()], &[0])?;
        DensityMatrix::new(reduced)
    }

    /// Kraus operators K_{ij} = √g_j (1 ⊗ ⟨b_i|) U (1 ⊗ |b_j⟩) in the bath
    /// eigenbasis, with g the bath Gibbs weights.
    pub fn kraus_operators(&self) -> Result<Vec<ComplexMatrix>> {
        if let Some(kraus) = &self.kraus {
            return Ok(kraus.clone());
        }
        let ds = self.system_dim;
        let db = self.bath.dimension();
        let bath_eig = self.bath.hamiltonian().eig();
        let weights: Vec<f64> = (0..db)
            .map(|k| {
                let mut w = 0.0;
                for i in 0..db {
                    let amp = bath_eig.eigenvectors().get(i, k);
                    for j in 0..db {
                        w += (amp.conj()
                            * self.bath_state.matrix().get(i, j)
                            * bath_eig.eigenvectors().get(j, k))
                        .re;
                    }
                }
                w
            })
            .collect();
        let w_bath = tensor_product(&ComplexMatrix::identity(ds), bath_eig.eigenvectors());
        let u_hat = w_bath
            .adjoint()
            .matmul(&self.global_unitary)
            .matmul(&w_bath);
        let mut kraus = Vec::with_capacity(db * db);
        for i in 0..db {
            for j in 0..db {
                let g = weights[j].max(0.0).sqrt();
                kraus.push(ComplexMatrix::from_fn(ds, ds, |r, c| {
                    u_hat.get(r * db + i, c * db + j) * Complex64::new(g, 0.0)
                }));
            }
        }
        let mut completeness = ComplexMatrix::zeros(ds, ds);
        for k in &kraus {
            completeness = completeness.add(&k.adjoint().matmul(k));
        }
        let defect = completeness.max_abs_diff(&ComplexMatrix::identity(ds));
        if defect > tol::KRAUS_COMPLETENESS {
            return Err(Error::Numeric(format!(
                "kraus completeness defect {defect:.3e}"
            )));
        }
        Ok(kraus)
    }

    /// Cache the Kraus decomposition on the channel.
    pub fn with_kraus(mut self) -> Result<Self> {
        self.kraus = Some(self.kraus_operators()?);
        Ok(self)
    }

    pub fn kraus(&self) -> Option<&[ComplexMatrix]> {
        self.kraus.as_deref()
    }
}

/// H_sys ⊗ 1 + 1 ⊗ H_bath.
pub fn joint_hamiltonian(h_sys: &Hamiltonian, h_bath: &Hamiltonian) -> HermitianOperator {
    let m = tensor_product(h_sys.matrix(), &ComplexMatrix::identity(h_bath.dim())).add(
        &tensor_product(&ComplexMatrix::identity(h_sys.dim()), h_bath.matrix()),
    );
    HermitianOperator::new(m).expect("sum of hermitian tensor terms")
}

/// Haar-random unitary via QR of a complex Ginibre matrix, with the phase
/// convention fixed from the R diagonal.
pub(crate) fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut g = nalgebra::DMatrix::<nalgebra::Complex<f64>>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(i, j)] = nalgebra::Complex::new(re / 2f64.sqrt(), im / 2f64.sqrt());
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..dim {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / nalgebra::Complex::new(rkk.norm(), 0.0)
        } else {
            nalgebra::Complex::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| Complex64::new(q[(i, j)].re, q[(i, j)].im))
}

/// Sample a thermal operation: draw a Haar-random unitary inside each
/// degenerate eigenspace of the joint Hamiltonian. Deterministic in `seed`.
pub fn sample_thermal_operation(
    h_sys: &Hamiltonian,
    bath: &BathSpec,
    seed: u64,
) -> Result<QuantumChannel> {
    let h_tot = joint_hamiltonian(h_sys, bath.hamiltonian());
    let eig = crate::linops::hermitian_eig(&h_tot, tol::DEGENERACY_GAP)?;
    let d = eig.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut block_diag = ComplexMatrix::zeros(d, d);
    let mut nontrivial = false;
    for group in eig.degeneracy_groups() {
        let m = group.len();
        if m >= 2 {
            nontrivial = true;
        }
        let block = haar_unitary(m, &mut rng);
        for (bi, i) in group.clone().enumerate() {
            for (bj, j) in group.clone().enumerate() {
                block_diag.set(i, j, block.get(bi, bj));
            }
        }
    }
    let u = eig.from_eigenbasis(&block_diag);
    let mut channel = QuantumChannel::from_parts(h_sys, bath.clone(), u, seed)?;
    channel.trivial_blocks = !nontrivial;
    Ok(channel)
}

/// Haar-random unitary over the whole joint space, ignoring energy
/// conservation. Detection-power control for the symmetry checkers.
pub fn sample_control_operation(
    system_dim: usize,
    bath: &BathSpec,
    seed: u64,
) -> Result<QuantumChannel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_unitary(system_dim * bath.dimension(), &mut rng);
    QuantumChannel::non_thermal_control(system_dim, bath.clone(), u, seed)
}

/// Σ_k K_k ρ K_k†.
pub fn apply_kraus(kraus: &[ComplexMatrix], rho: &DensityMatrix) -> Result<DensityMatrix> {
    if kraus.is_empty() {
        return Err(Error::InvalidInput("empty kraus list".into()));
    }
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in kraus {
        if k.rows() != d || k.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "kraus operator {}x{} vs state dim {d}",
                k.rows(),
                k.cols()
            )));
        }
        out = out.add(&k.matmul(rho.matrix()).matmul(&k.adjoint()));
    }
    DensityMatrix::new(out)
}

/// Named fixtures from the structural proofs.
pub mod fixtures {
    use super::*;

    /// Kraus list of the map E(ρ) = Tr[ρ] |u_target⟩⟨u_target| that resets
    /// every input to one energy eigenstate. It commutes with time
    /// translation yet moves the Gibbs state, witnessing that symmetric
    /// operations strictly contain thermal ones.
    pub fn eigenstate_reset_kraus(h: &Hamiltonian, target: usize) -> Vec<ComplexMatrix> {
        let d = h.dim();
        assert!(target < d);
        let eig = h.eig();
        let target_ket = eig.eigenvector(target);
        (0..d)
            .map(|k| {
                let from = eig.eigenvector(k);
                ComplexMatrix::from_fn(d, d, |i, j| target_ket.get(i, 0) * from.get(j, 0).conj())
            })
            .collect()
    }
}
