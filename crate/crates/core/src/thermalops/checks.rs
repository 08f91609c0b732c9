//! Second-law, covariance and work-protocol checkers built on the
//! thermal-operation simulator.

use super::{joint_hamiltonian, QuantumChannel};
use crate::divergences::{free_coherence, free_energy, renyi_divergence, Alpha, AlphaGrid, Delta};
use crate::error::{Error, Result};
use crate::linops::{
    partial_trace, tensor_product, trace_distance, trace_norm_hermitian, ComplexMatrix,
};
use crate::states::{
    clock_hamiltonian, dephase, gibbs_state, work_bit, DensityMatrix, Hamiltonian, ThermalPair,
};
use crate::tol;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Time samples used by the covariance checkers.
pub const DEFAULT_T_SAMPLES: [f64; 4] = [0.1, 1.0, std::f64::consts::PI, 10.0];

/// Mixing weights scanned by the counterexample search (descending order
/// is applied internally).
pub const DEFAULT_EPSILON_GRID: [f64; 11] = [
    0.001, 0.0025, 0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0,
];

/// Default work grid for `work_bit_transform_check`: 0..=MAX in STEPS steps.
pub const DEFAULT_W_GRID_MAX: f64 = 10.0;
pub const DEFAULT_W_GRID_STEPS: usize = 101;

const PROBE_SEED: u64 = 0x7453_0b5e;

/// Fixed probe set for symmetry checks: four seeded full-rank states plus
/// the uniform superposition (maximally coherent) state.
pub fn probe_states(dim: usize) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut probes: Vec<DensityMatrix> = (0..4)
        .map(|_| super::random_density(dim, &mut rng))
        .collect();
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let uniform = ComplexMatrix::from_fn(dim, 1, |_, _| amp);
    probes.push(DensityMatrix::pure(&uniform).expect("uniform ket"));
    probes
}

pub(crate) fn covariance_defect_of_map(
    map: &dyn Fn(&DensityMatrix) -> Result<DensityMatrix>,
    h: &Hamiltonian,
    t_samples: &[f64],
    probes: &[DensityMatrix],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for rho in probes {
        let mapped = map(rho)?;
        for &t in t_samples {
            let u = h.evolution(t);
            let evolved = DensityMatrix::new(rho.matrix().conjugate_with(&u))?;
            let lhs = map(&evolved)?;
            let rhs = mapped.matrix().conjugate_with(&u);
            worst = worst.max(trace_norm_hermitian(&lhs.matrix().sub(&rhs))?);
        }
    }
    Ok(worst)
}

/// Max over probe states and time samples of
/// ‖E(e^{-iHt} ρ e^{iHt}) - e^{-iHt} E(ρ) e^{iHt}‖₁.
pub fn covariance_defect(
    channel: &QuantumChannel,
    h: &Hamiltonian,
    t_samples: &[f64],
) -> Result<f64> {
    let probes = probe_states(channel.system_dim());
    covariance_defect_of_map(&|rho| channel.apply(rho), h, t_samples, &probes)
}

/// Verdict of a monotone check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    FViolation,
    AViolation,
    Both,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Consistent => write!(f, "CONSISTENT"),
            Verdict::FViolation => write!(f, "F_VIOLATION"),
            Verdict::AViolation => write!(f, "A_VIOLATION"),
            Verdict::Both => write!(f, "BOTH"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MonotoneEntry {
    pub alpha: Alpha,
    pub delta_f: Delta,
    pub delta_a: Delta,
}

/// Per-α free-energy and free-coherence differences for a candidate
/// transformation ρ → σ, with a tolerance-aware verdict.
#[derive(Clone, Debug)]
pub struct MonotoneReport {
    pub entries: Vec<MonotoneEntry>,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl MonotoneReport {
    pub fn compute_verdict(entries: &[MonotoneEntry], tolerance: f64) -> Verdict {
        let f_bad = entries.iter().any(|e| e.delta_f.exceeds(tolerance));
        let a_bad = entries.iter().any(|e| e.delta_a.exceeds(tolerance));
        match (f_bad, a_bad) {
            (false, false) => Verdict::Consistent,
            (true, false) => Verdict::FViolation,
            (false, true) => Verdict::AViolation,
            (true, true) => Verdict::Both,
        }
    }

    /// α values whose ΔF (first) or ΔA (second) violate the tolerance.
    pub fn violating_alphas(&self) -> (Vec<Alpha>, Vec<Alpha>) {
        let f: Vec<Alpha> = self
            .entries
            .iter()
            .filter(|e| e.delta_f.exceeds(self.tolerance))
            .map(|e| e.alpha)
            .collect();
        let a: Vec<Alpha> = self
            .entries
            .iter()
            .filter(|e| e.delta_a.exceeds(self.tolerance))
            .map(|e| e.alpha)
            .collect();
        (f, a)
    }

    /// Largest finite ΔF and ΔA across the grid.
    pub fn max_finite_deltas(&self) -> (f64, f64) {
        let fold = |pick: fn(&MonotoneEntry) -> &Delta| {
            self.entries
                .iter()
                .filter_map(|e| pick(e).finite())
                .fold(f64::NEG_INFINITY, f64::max)
        };
        (fold(|e| &e.delta_f), fold(|e| &e.delta_a))
    }
}

/// ΔF_α = F_α(σ) - F_α(ρ) and ΔA_α = A_α(σ) - A_α(ρ) across the grid.
pub fn monotone_report(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    thermal: &ThermalPair,
    grid: &AlphaGrid,
    tolerance: f64,
) -> Result<MonotoneReport> {
    let h = thermal.hamiltonian();
    let mut entries = Vec::with_capacity(grid.len());
    for alpha in grid.iter() {
        let f_before = free_energy(rho, thermal, alpha)?;
        let f_after = free_energy(sigma, thermal, alpha)?;
        let a_before = free_coherence(rho, h, alpha)?;
        let a_after = free_coherence(sigma, h, alpha)?;
        entries.push(MonotoneEntry {
            alpha,
            delta_f: Delta::between(f_after, f_before),
            delta_a: Delta::between(a_after, a_before),
        });
    }
    let verdict = MonotoneReport::compute_verdict(&entries, tolerance);
    Ok(MonotoneReport {
        entries,
        tolerance,
        verdict,
    })
}

/// Result of the incompleteness search: a transformation passing every
/// free-energy condition while increasing every free coherence.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub epsilon: f64,
    pub report: MonotoneReport,
    /// S_∞(σ‖γ), the quantity that must not exceed S_0(ρ‖γ).
    pub s_inf_sigma: f64,
    /// S_0(ρ‖γ) for the initial excited eigenstate.
    pub s_zero_rho: f64,
}

/// Search the ε grid for σ = (1-ε)γ + ε|+⟩⟨+| with S_∞(σ‖γ) ≤ S_0(ρ‖γ)
/// (which forces every ΔF_α ≤ 0 by monotonicity in α) and A_α(σ) above
/// tolerance at every grid point. Scans ε from largest to smallest and
/// returns the first hit. ρ is the excited eigenstate.
pub fn counterexample_search(
    thermal: &ThermalPair,
    epsilon_grid: &[f64],
    grid: &AlphaGrid,
    tolerance: f64,
) -> Result<Option<Counterexample>> {
    let h = thermal.hamiltonian();
    if h.dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "counterexample_search wants a qubit, got dim {}",
            h.dim()
        )));
    }
    if h.min_positive_gap().is_none() {
        return Err(Error::InvalidInput(
            "counterexample_search wants a nondegenerate qubit hamiltonian".into(),
        ));
    }
    let excited = DensityMatrix::pure(&h.eig().eigenvector(1))?;
    let plus = {
        let v0 = h.eig().eigenvector(0);
        let v1 = h.eig().eigenvector(1);
        let ket = ComplexMatrix::from_fn(2, 1, |i, _| {
            (v0.get(i, 0) + v1.get(i, 0)) * Complex64::new(1.0 / 2f64.sqrt(), 0.0)
        });
        DensityMatrix::pure(&ket)?
    };
    let s_zero_rho =
        renyi_divergence(&excited, thermal.gibbs(), Alpha::Zero)?.expect_finite("S_0(ρ‖γ)")?;

    let mut descending: Vec<f64> = epsilon_grid.to_vec();
    descending.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for &eps in &descending {
        if !(eps > 0.0 && eps <= 1.0) {
            continue;
        }
        let sigma = thermal.gibbs().mix(&plus, 1.0 - eps)?;
        let s_inf_sigma = renyi_divergence(&sigma, thermal.gibbs(), Alpha::Infinity)?
            .expect_finite("S_∞(σ‖γ)")?;
        if s_inf_sigma > s_zero_rho {
            continue;
        }
        let coherent_everywhere = grid.iter().try_fold(true, |ok, alpha| {
            if !ok {
                return Ok::<bool, Error>(false);
            }
            let a = free_coherence(&sigma, h, alpha)?.expect_finite("A_α(σ)")?;
            Ok(a > tolerance)
        })?;
        if !coherent_everywhere {
            continue;
        }
        let report = monotone_report(&excited, &sigma, thermal, grid, tolerance)?;
        return Ok(Some(Counterexample {
            epsilon: eps,
            report,
            s_inf_sigma,
            s_zero_rho,
        }));
    }
    Ok(None)
}

/// Outcome of checking ρ ⊗ |w⟩⟨w| → σ ⊗ |0⟩⟨0| on the joint system+work
/// Hamiltonian.
#[derive(Clone, Debug)]
pub struct WorkBitTransform {
    /// Report at the requested w.
    pub report: MonotoneReport,
    /// Least grid w for which every ΔF_α ≤ tolerance, if any.
    pub minimal_feasible_w: Option<f64>,
    /// Whether all ΔA_α ≤ tolerance at the requested w.
    pub asymmetry_consistent: bool,
    /// Max spread of any ΔA_α across the searched w grid; the coherence
    /// side cannot be bought with work, so this stays at rounding level.
    pub delta_a_spread_over_w: f64,
}

fn work_bit_report(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    thermal: &ThermalPair,
    w: f64,
    grid: &AlphaGrid,
    tolerance: f64,
) -> Result<MonotoneReport> {
    let (h_w, ground, excited_w) = work_bit(w);
    let h_joint = Hamiltonian::new(
        joint_hamiltonian(thermal.hamiltonian(), &h_w)
            .matrix()
            .clone(),
    )?;
    let joint_thermal = gibbs_state(&h_joint, thermal.beta())?;
    let initial = rho.tensor(&excited_w);
    let fin = sigma.tensor(&ground);
    monotone_report(&initial, &fin, &joint_thermal, grid, tolerance)
}

/// Evaluate the work-assisted transformation ρ ⊗ |w⟩⟨w| → σ ⊗ |0⟩⟨0| and
/// grid-search the least w that satisfies every free-energy condition.
/// The reported minimum is the least value on the searched grid, not a
/// claim of optimality.
pub fn work_bit_transform_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    thermal: &ThermalPair,
    w: f64,
    grid: &AlphaGrid,
    tolerance: f64,
    w_grid: &[f64],
) -> Result<WorkBitTransform> {
    let report = work_bit_report(rho, sigma, thermal, w, grid, tolerance)?;
    let asymmetry_consistent = !report.entries.iter().any(|e| e.delta_a.exceeds(tolerance));

    let mut minimal_feasible_w = None;
    let mut ascending: Vec<f64> = w_grid.to_vec();
    ascending.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut a_lo = vec![f64::INFINITY; grid.len()];
    let mut a_hi = vec![f64::NEG_INFINITY; grid.len()];
    for &wc in &ascending {
        let r = work_bit_report(rho, sigma, thermal, wc, grid, tolerance)?;
        for (k, e) in r.entries.iter().enumerate() {
            if let Some(da) = e.delta_a.finite() {
                a_lo[k] = a_lo[k].min(da);
                a_hi[k] = a_hi[k].max(da);
            }
        }
        if minimal_feasible_w.is_none() && !r.entries.iter().any(|e| e.delta_f.exceeds(tolerance)) {
            minimal_feasible_w = Some(wc);
        }
    }
    let delta_a_spread_over_w = a_lo
        .iter()
        .zip(&a_hi)
        .map(|(lo, hi)| hi - lo)
        .fold(0.0f64, f64::max);
    Ok(WorkBitTransform {
        report,
        minimal_feasible_w,
        asymmetry_consistent,
        delta_a_spread_over_w,
    })
}

/// Distribution of measured work-register energies.
#[derive(Clone, Debug)]
pub struct WorkDistribution {
    /// (energy, probability), grouped by degenerate work levels, energies
    /// ascending.
    pub outcomes: Vec<(f64, f64)>,
    /// Trace distance between the joint output and the product of its
    /// marginals.
    pub correlation_defect: f64,
}

impl WorkDistribution {
    /// Total-variation distance ½ Σ |p - q| between aligned outcome lists.
    pub fn total_variation(&self, other: &WorkDistribution) -> Result<f64> {
        if self.outcomes.len() != other.outcomes.len() {
            return Err(Error::DimensionMismatch(
                "work distributions have different outcome counts".into(),
            ));
        }
        let mut tv = 0.0;
        for ((wa, pa), (wb, pb)) in self.outcomes.iter().zip(&other.outcomes) {
            if (wa - wb).abs() > 1e-9 {
                return Err(Error::InvalidInput(
                    "work distributions are over different energy lists".into(),
                ));
            }
            tv += (pa - pb).abs();
        }
        Ok(0.5 * tv)
    }
}

/// Work distribution extracted by E acting on system ⊗ work register with
/// the register prepared in the ground state and measured in the H_w
/// eigenbasis afterwards.
pub fn work_distribution(
    channel: &QuantumChannel,
    rho: &DensityMatrix,
    h_w: &Hamiltonian,
) -> Result<WorkDistribution> {
    let d_sys = rho.dim();
    let d_w = h_w.dim();
    if channel.system_dim() != d_sys * d_w {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dim {}, system ⊗ work wants {}",
            channel.system_dim(),
            d_sys * d_w
        )));
    }
    let ground = DensityMatrix::pure(&h_w.eig().eigenvector(0))?;
    let joint_in = rho.tensor(&ground);
    let joint_out = channel.apply(&joint_in)?;
    let tau_w = partial_trace(joint_out.matrix(), &[d_sys, d_w], &[1])?;
    let tau_s = partial_trace(joint_out.matrix(), &[d_sys, d_w], &[0])?;

    let mut outcomes = Vec::new();
    for group in h_w.eig().degeneracy_groups() {
        let energy = h_w.eig().eigenvalues()[group.start];
        let proj = h_w.eig().group_projector(group);
        let mut p = 0.0;
        for i in 0..d_w {
            for j in 0..d_w {
                p += (proj.get(i, j) * tau_w.get(j, i)).re;
            }
        }
        outcomes.push((energy, p.max(0.0)));
    }
    let product = tensor_product(&tau_s, &tau_w);
    let correlation_defect = trace_distance(joint_out.matrix(), &product)?;
    Ok(WorkDistribution {
        outcomes,
        correlation_defect,
    })
}

/// Total-variation distance between the work distributions obtained from
/// ρ and from D_H(ρ). Zero for every covariant channel: coherence cannot
/// show up in the extracted work statistics.
pub fn work_locking_check(
    channel: &QuantumChannel,
    rho: &DensityMatrix,
    h_sys: &Hamiltonian,
    h_w: &Hamiltonian,
) -> Result<f64> {
    let from_rho = work_distribution(channel, rho, h_w)?;
    let from_dephased = work_distribution(channel, &dephase(rho, h_sys)?, h_w)?;
    from_rho.total_variation(&from_dephased)
}

/// Outcome of the coherence-activation demonstration.
#[derive(Clone, Debug)]
pub struct ActivationReport {
    /// |F(D(ρ_i)) - F(γ_i)| per factor: the classical surplus each
    /// coherent thermal state carries alone.
    pub factor_classical_surplus: [f64; 2],
    /// ‖D_H̄(ρ₁ ⊗ ρ₂) - γ ⊗ γ‖₁.
    pub joint_dephased_vs_gibbs_norm: f64,
    /// F(σ₁₂) - F(γ ⊗ γ) in energy units: classical free energy unlocked
    /// by joint dephasing.
    pub activated_free_energy: f64,
}

/// Build ρ_i = ψ_c(H_i), confirm each alone has no classical surplus, then
/// dephase the pair under H̄ = H₁ ⊗ 1 + 1 ⊗ H₂ and report the activated
/// classical free energy.
pub fn activation_demo(h1: &Hamiltonian, h2: &Hamiltonian, beta: f64) -> Result<ActivationReport> {
    let t1 = gibbs_state(h1, beta)?;
    let t2 = gibbs_state(h2, beta)?;
    let rho1 = crate::states::coherent_thermal_state(h1, beta)?.state;
    let rho2 = crate::states::coherent_thermal_state(h2, beta)?.state;

    let mut factor_classical_surplus = [0.0; 2];
    for (k, (rho, tp, h)) in [(&rho1, &t1, h1), (&rho2, &t2, h2)].into_iter().enumerate() {
        let f_dephased =
            free_energy(&dephase(rho, h)?, tp, Alpha::One)?.expect_finite("F(D(ρ))")?;
        let f_gibbs = free_energy(tp.gibbs(), tp, Alpha::One)?.expect_finite("F(γ)")?;
        factor_classical_surplus[k] = (f_dephased - f_gibbs).abs();
    }

    let h_bar = Hamiltonian::new(joint_hamiltonian(h1, h2).matrix().clone())?;
    let joint_thermal = gibbs_state(&h_bar, beta)?;
    let joint = rho1.tensor(&rho2);
    let sigma12 = dephase(&joint, &h_bar)?;
    let product_gibbs = t1.gibbs().tensor(t2.gibbs());

    let joint_dephased_vs_gibbs_norm =
        trace_norm_hermitian(&sigma12.matrix().sub(product_gibbs.matrix()))?;
    let f_sigma = free_energy(&sigma12, &joint_thermal, Alpha::One)?.expect_finite("F(σ₁₂)")?;
    let f_product =
        free_energy(&product_gibbs, &joint_thermal, Alpha::One)?.expect_finite("F(γ⊗γ)")?;
    Ok(ActivationReport {
        factor_classical_surplus,
        joint_dephased_vs_gibbs_norm,
        activated_free_energy: f_sigma - f_product,
    })
}

/// Effective map output and its asymmetry when a reference state powers a
/// simulated operation.
#[derive(Clone, Debug)]
pub struct NonsymmetricSimulation {
    pub output: DensityMatrix,
    /// Covariance defect of Ẽ(·) = Tr₂[E(· ⊗ ρ₂)] with respect to H₁.
    pub covariance_defect: f64,
}

/// Ẽ(ρ₁) = Tr₂[E(ρ₁ ⊗ ρ₂)]: the reference ρ₂ lets a covariant joint
/// channel simulate a non-covariant effective map on system 1.
pub fn simulate_nonsymmetric(
    channel: &QuantumChannel,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    h1: &Hamiltonian,
    t_samples: &[f64],
) -> Result<NonsymmetricSimulation> {
    let (d1, d2) = (rho1.dim(), rho2.dim());
    if d2 < d1 {
        return Err(Error::InvalidInput(format!(
            "reference register dim {d2} must be at least the system dim {d1}"
        )));
    }
    if channel.system_dim() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dim {}, system ⊗ reference wants {}",
            channel.system_dim(),
            d1 * d2
        )));
    }
    let effective = |x: &DensityMatrix| -> Result<DensityMatrix> {
        let joint = channel.apply(&x.tensor(rho2))?;
        DensityMatrix::new(partial_trace(joint.matrix(), &[d1, d2], &[0])?)
    };
    let output = effective(rho1)?;
    let probes = probe_states(d1);
    let covariance_defect = covariance_defect_of_map(&effective, h1, t_samples, &probes)?;
    Ok(NonsymmetricSimulation {
        output,
        covariance_defect,
    })
}

/// Covariance of the effective map induced by a block-diagonal catalyst,
/// and how well the catalyst comes back.
#[derive(Clone, Debug)]
pub struct CatalyticCheck {
    /// Covariance defect of C(·) = Tr_cat E(· ⊗ ρ_cat) w.r.t. H_sys.
    pub covariance_defect: f64,
    /// Trace distance between the output catalyst marginal and the input
    /// catalyst. Covariance of the effective map holds regardless.
    pub catalyst_return_defect: f64,
}

pub fn catalytic_covariance_check(
    channel: &QuantumChannel,
    rho: &DensityMatrix,
    catalyst: &DensityMatrix,
    h_sys: &Hamiltonian,
    h_cat: &Hamiltonian,
    t_samples: &[f64],
) -> Result<CatalyticCheck> {
    if catalyst.dim() != h_cat.dim() {
        return Err(Error::DimensionMismatch(format!(
            "catalyst dim {} vs its hamiltonian dim {}",
            catalyst.dim(),
            h_cat.dim()
        )));
    }
    let comm = catalyst.matrix().commutator_defect(h_cat.matrix());
    if comm > tol::COMMUTATION {
        return Err(Error::InvalidInput(format!(
            "catalyst must be block-diagonal in energy: [ρ_c, H_c] defect {comm:.3e}"
        )));
    }
    let (ds, dc) = (h_sys.dim(), h_cat.dim());
    if channel.system_dim() != ds * dc {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dim {}, system ⊗ catalyst wants {}",
            channel.system_dim(),
            ds * dc
        )));
    }
    let effective = |x: &DensityMatrix| -> Result<DensityMatrix> {
        let joint = channel.apply(&x.tensor(catalyst))?;
        DensityMatrix::new(partial_trace(joint.matrix(), &[ds, dc], &[0])?)
    };
    let probes = probe_states(ds);
    let covariance_defect = covariance_defect_of_map(&effective, h_sys, t_samples, &probes)?;
    let joint_out = channel.apply(&rho.tensor(catalyst))?;
    let cat_out = partial_trace(joint_out.matrix(), &[ds, dc], &[1])?;
    let catalyst_return_defect = trace_distance(&cat_out, catalyst.matrix())?;
    Ok(CatalyticCheck {
        covariance_defect,
        catalyst_return_defect,
    })
}

/// Per-α feasibility thresholds for extracting w in
/// γ_{H₁} ⊗ |0⟩⟨0| → γ_{H₂} ⊗ |w⟩⟨w| on the clock + work construction.
#[derive(Clone, Debug)]
pub struct EquilibriumBound {
    pub w: f64,
    /// Per-α threshold: the w at which ΔF_α crosses zero.
    pub thresholds: Vec<(Alpha, f64)>,
    /// Spread (max - min) of the thresholds; the collapse claim says this
    /// is rounding-level.
    pub collapse_defect: f64,
    /// F(H₁) - F(H₂) from the log-partitions.
    pub closed_form_bound: f64,
    /// Max |threshold_α - closed_form_bound|.
    pub threshold_vs_closed_form: f64,
    pub feasible: bool,
}

/// Evaluate every grid ΔF_α for the equilibrium-to-equilibrium work
/// extraction and confirm that all conditions collapse to
/// w ≤ F(H₁) - F(H₂).
pub fn equilibrium_work_bound(
    thermal1: &ThermalPair,
    thermal2: &ThermalPair,
    w: f64,
    grid: &AlphaGrid,
) -> Result<EquilibriumBound> {
    if (thermal1.beta() - thermal2.beta()).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "equilibrium bound wants matching temperatures, got β {} vs {}",
            thermal1.beta(),
            thermal2.beta()
        )));
    }
    let h_clock = clock_hamiltonian(thermal1.hamiltonian(), thermal2.hamiltonian())?;
    let (h_w, ground_w, excited_w) = work_bit(w);
    let h_tot = Hamiltonian::new(joint_hamiltonian(&h_clock, &h_w).matrix().clone())?;
    let beta = thermal1.beta();
    let thermal_tot = gibbs_state(&h_tot, beta)?;

    let switch0 = DensityMatrix::pure(&ComplexMatrix::basis_ket(2, 0))?;
    let switch1 = DensityMatrix::pure(&ComplexMatrix::basis_ket(2, 1))?;
    let initial = thermal1.gibbs().tensor(&switch0).tensor(&ground_w);
    let fin = thermal2.gibbs().tensor(&switch1).tensor(&excited_w);

    let mut thresholds = Vec::with_capacity(grid.len());
    for alpha in grid.iter() {
        let f_before = free_energy(&initial, &thermal_tot, alpha)?.expect_finite("F_α initial")?;
        let f_after = free_energy(&fin, &thermal_tot, alpha)?.expect_finite("F_α final")?;
        // ΔF_α(w) = ΔF_α(0) + w, so the zero crossing sits at w - ΔF_α(w).
        thresholds.push((alpha, w - (f_after - f_before)));
    }
    let lo = thresholds
        .iter()
        .map(|(_, t)| *t)
        .fold(f64::INFINITY, f64::min);
    let hi = thresholds
        .iter()
        .map(|(_, t)| *t)
        .fold(f64::NEG_INFINITY, f64::max);
    let closed_form_bound =
        thermal1.hamiltonian_free_energy()? - thermal2.hamiltonian_free_energy()?;
    let threshold_vs_closed_form = thresholds
        .iter()
        .map(|(_, t)| (t - closed_form_bound).abs())
        .fold(0.0f64, f64::max);
    Ok(EquilibriumBound {
        w,
        collapse_defect: hi - lo,
        thresholds,
        closed_form_bound,
        threshold_vs_closed_form,
        feasible: w <= closed_form_bound + tol::VERDICT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::coherent_thermal_state;
    use crate::thermalops::{
        joint_hamiltonian, sample_control_operation, sample_thermal_operation, BathSpec,
        QuantumChannel,
    };

    fn qubit() -> Hamiltonian {
        Hamiltonian::from_energies(&[0.0, 1.0]).unwrap()
    }

    fn qubit_thermal(beta: f64) -> ThermalPair {
        gibbs_state(&qubit(), beta).unwrap()
    }

    #[test]
    fn sampled_channels_are_covariant() {
        let h = qubit();
        let bath = BathSpec::matched_to(&h, 4, 1.0).unwrap();
        for seed in 0..10 {
            let e = sample_thermal_operation(&h, &bath, seed).unwrap();
            let defect = covariance_defect(&e, &h, &DEFAULT_T_SAMPLES).unwrap();
            assert!(defect < 1e-8, "seed {seed}: {defect:.3e}");
        }
    }

    #[test]
    fn free_evolution_channel_has_zero_defect() {
        let h = qubit();
        let bath = BathSpec::matched_to(&h, 3, 1.0).unwrap();
        let h_tot =
            Hamiltonian::new(joint_hamiltonian(&h, bath.hamiltonian()).matrix().clone()).unwrap();
        let u = h_tot.evolution(0.83);
        let e = QuantumChannel::from_parts(&h, bath, u, 0).unwrap();
        let defect = covariance_defect(&e, &h, &DEFAULT_T_SAMPLES).unwrap();
        assert!(defect < 1e-12, "{defect:.3e}");
    }

    #[test]
    fn pauli_x_conjugation_is_detected() {
        // X flips the energy levels, so conjugation by X is not covariant.
        // At t = π the evolution is diag(1, -1) which commutes with X
        // conjugation; the other default t samples expose the asymmetry.
        let h = qubit();
        let bath = BathSpec::ladder(1.0, 1, 1.0).unwrap();
        let x = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let e = QuantumChannel::non_thermal_control(2, bath, x, 0).unwrap();
        let defect = covariance_defect(&e, &h, &DEFAULT_T_SAMPLES).unwrap();
        assert!(defect > 0.1, "{defect:.3e}");

        // And at t = π alone the defect collapses, as predicted.
        let at_pi = covariance_defect(&e, &h, &[std::f64::consts::PI]).unwrap();
        assert!(at_pi < 1e-9, "{at_pi:.3e}");
    }

    #[test]
    fn monotone_report_of_identity_is_consistent() {
        let tp = qubit_thermal(1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        let rho = crate::thermalops::random_density(2, &mut rng);
        let report = monotone_report(&rho, &rho, &tp, &AlphaGrid::default(), tol::VERDICT).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent);
        for e in &report.entries {
            assert!(e.delta_f.finite().unwrap().abs() < 1e-10);
            assert!(e.delta_a.finite().unwrap().abs() < 1e-10);
        }
        // Verdict is recomputable from the stored entries.
        assert_eq!(
            MonotoneReport::compute_verdict(&report.entries, report.tolerance),
            report.verdict
        );
    }

    #[test]
    fn monotone_report_of_sampled_channel_outputs() {
        let tp = qubit_thermal(1.0);
        let bath = BathSpec::matched_to(tp.hamiltonian(), 4, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(72);
        for seed in 0..10 {
            let e = sample_thermal_operation(tp.hamiltonian(), &bath, seed).unwrap();
            let rho = crate::thermalops::random_density(2, &mut rng);
            let sigma = e.apply(&rho).unwrap();
            let report =
                monotone_report(&rho, &sigma, &tp, &AlphaGrid::default(), tol::VERDICT).unwrap();
            assert_eq!(report.verdict, Verdict::Consistent, "seed {seed}");
        }
    }

    #[test]
    fn counterexample_passes_free_energy_but_violates_coherence() {
        let tp = qubit_thermal(1.0);
        let found = counterexample_search(
            &tp,
            &DEFAULT_EPSILON_GRID,
            &AlphaGrid::default(),
            tol::VERDICT,
        )
        .unwrap()
        .expect("counterexample must exist at beta = 1");
        assert!(found.epsilon > 0.0);
        assert!(found.s_inf_sigma <= found.s_zero_rho);
        assert_eq!(found.report.verdict, Verdict::AViolation);
        for e in &found.report.entries {
            assert!(!e.delta_f.exceeds(0.0), "ΔF at alpha {}", e.alpha);
            assert!(
                e.delta_a.finite().unwrap() > 1e-6,
                "ΔA at alpha {}",
                e.alpha
            );
        }
    }

    #[test]
    fn counterexample_exists_across_beta_range() {
        for beta in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let tp = qubit_thermal(beta);
            let found = counterexample_search(
                &tp,
                &DEFAULT_EPSILON_GRID,
                &AlphaGrid::default(),
                tol::VERDICT,
            )
            .unwrap();
            assert!(found.is_some(), "beta {beta}");
        }
    }

    #[test]
    fn counterexample_rejects_non_qubits() {
        let h = Hamiltonian::from_energies(&[0.0, 1.0, 2.0]).unwrap();
        let tp = gibbs_state(&h, 1.0).unwrap();
        let err = counterexample_search(
            &tp,
            &DEFAULT_EPSILON_GRID,
            &AlphaGrid::default(),
            tol::VERDICT,
        )
        .unwrap_err();
        assert!(err.is_input());
    }

    fn default_w_grid() -> Vec<f64> {
        (0..DEFAULT_W_GRID_STEPS)
            .map(|k| DEFAULT_W_GRID_MAX * k as f64 / (DEFAULT_W_GRID_STEPS - 1) as f64)
            .collect()
    }

    #[test]
    fn work_bit_transform_trivial_case() {
        let tp = qubit_thermal(1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        let rho = crate::thermalops::random_density(2, &mut rng);
        let check = work_bit_transform_check(
            &rho,
            &rho,
            &tp,
            0.0,
            &AlphaGrid::default(),
            tol::VERDICT,
            &[0.0],
        )
        .unwrap();
        assert_eq!(check.report.verdict, Verdict::Consistent);
        assert_eq!(check.minimal_feasible_w, Some(0.0));
        assert!(check.asymmetry_consistent);
    }

    #[test]
    fn enough_work_buys_any_diagonal_transformation() {
        // ρ thermal-ish, σ nearly pure: infeasible without work, feasible
        // with enough of it.
        let tp = qubit_thermal(1.0);
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.6, 0.4])).unwrap();
        let sigma = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.99, 0.01])).unwrap();
        let grid = AlphaGrid::default();
        let check = work_bit_transform_check(
            &rho,
            &sigma,
            &tp,
            0.0,
            &grid,
            tol::VERDICT,
            &default_w_grid(),
        )
        .unwrap();
        assert_eq!(check.report.verdict, Verdict::FViolation);
        let w_min = check.minimal_feasible_w.expect("some grid w suffices");
        assert!(w_min > 0.0);
        // Re-evaluating at the found w is feasible.
        let again =
            work_bit_transform_check(&rho, &sigma, &tp, w_min, &grid, tol::VERDICT, &[w_min])
                .unwrap();
        assert_eq!(again.report.verdict, Verdict::Consistent);
    }

    #[test]
    fn work_cannot_buy_coherence() {
        let tp = qubit_thermal(1.0);
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.9, 0.1])).unwrap();
        let sigma = coherent_thermal_state(tp.hamiltonian(), 1.0).unwrap().state;
        let check = work_bit_transform_check(
            &rho,
            &sigma,
            &tp,
            5.0,
            &AlphaGrid::default(),
            tol::VERDICT,
            &[0.0, 1.0, 5.0, 10.0],
        )
        .unwrap();
        assert!(!check.asymmetry_consistent);
        // The coherence deltas do not move with w.
        assert!(check.delta_a_spread_over_w < 1e-9);
        // Free energy alone can be satisfied by large w.
        assert!(check.minimal_feasible_w.is_some());
        assert_eq!(check.report.verdict, Verdict::AViolation);
    }

    #[test]
    fn work_distribution_of_identity_channel() {
        let h = qubit();
        let (h_w, _, _) = work_bit(1.0);
        let h_joint = Hamiltonian::new(joint_hamiltonian(&h, &h_w).matrix().clone()).unwrap();
        let bath = BathSpec::ladder(1.0, 1, 1.0).unwrap();
        let e = QuantumChannel::from_parts(&h_joint, bath, ComplexMatrix::identity(4), 0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(74);
        let rho = crate::thermalops::random_density(2, &mut rng);
        let dist = work_distribution(&e, &rho, &h_w).unwrap();
        assert!((dist.outcomes[0].1 - 1.0).abs() < 1e-12);
        assert!(dist.outcomes[1].1.abs() < 1e-12);
    }

    #[test]
    fn swap_channel_draws_gibbs_weights() {
        // Swapping two registers with identical Hamiltonians conserves
        // energy; feeding γ through leaves Gibbs weights on the register.
        let h = qubit();
        let tp = qubit_thermal(1.0);
        let (h_w, _, _) = work_bit(1.0);
        let h_joint = Hamiltonian::new(joint_hamiltonian(&h, &h_w).matrix().clone()).unwrap();
        let bath = BathSpec::ladder(1.0, 1, 1.0).unwrap();
        let mut swap = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap.set(i * 2 + j, j * 2 + i, Complex64::new(1.0, 0.0));
            }
        }
        let e = QuantumChannel::from_parts(&h_joint, bath, swap, 0).unwrap();
        let dist = work_distribution(&e, tp.gibbs(), &h_w).unwrap();
        let z = 1.0 + (-1.0f64).exp();
        assert!((dist.outcomes[0].1 - 1.0 / z).abs() < 1e-12);
        assert!((dist.outcomes[1].1 - (-1.0f64).exp() / z).abs() < 1e-12);
        let total: f64 = dist.outcomes.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-9);
        // Swap output is the product |0⟩⟨0| ⊗ γ: marginals carry it all.
        assert!(dist.correlation_defect < 1e-12);
    }

    #[test]
    fn sampled_channel_work_probabilities_normalize() {
        let h = qubit();
        let (h_w, _, _) = work_bit(1.0);
        let h_joint = Hamiltonian::new(joint_hamiltonian(&h, &h_w).matrix().clone()).unwrap();
        let bath = BathSpec::matched_to(&h_joint, 4, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(78);
        for seed in 0..20 {
            let e = sample_thermal_operation(&h_joint, &bath, seed).unwrap();
            let rho = crate::thermalops::random_density(2, &mut rng);
            let dist = work_distribution(&e, &rho, &h_w).unwrap();
            let total: f64 = dist.outcomes.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-9, "seed {seed}");
            for (_, p) in &dist.outcomes {
                assert!(*p >= -1e-12 && *p <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn work_locking_for_thermal_channels() {
        let h = qubit();
        let (h_w, _, _) = work_bit(1.0);
        let h_joint = Hamiltonian::new(joint_hamiltonian(&h, &h_w).matrix().clone()).unwrap();
        let bath = BathSpec::matched_to(&h_joint, 4, 1.0).unwrap();
        let psi = coherent_thermal_state(&h, 1.0).unwrap().state;
        for seed in 0..10 {
            let e = sample_thermal_operation(&h_joint, &bath, seed).unwrap();
            let tv = work_locking_check(&e, &psi, &h, &h_w).unwrap();
            assert!(tv < 1e-8, "seed {seed}: {tv:.3e}");
        }
        // Already-dephased input: identically zero.
        let diag = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.7, 0.3])).unwrap();
        let e = sample_thermal_operation(&h_joint, &bath, 0).unwrap();
        let tv = work_locking_check(&e, &diag, &h, &h_w).unwrap();
        assert!(tv < 1e-12);
    }

    #[test]
    fn unrestricted_channel_unlocks_coherence() {
        let h = qubit();
        let (h_w, _, _) = work_bit(1.0);
        let h_joint = Hamiltonian::new(joint_hamiltonian(&h, &h_w).matrix().clone()).unwrap();
        let bath = BathSpec::matched_to(&h_joint, 4, 1.0).unwrap();
        let psi = coherent_thermal_state(&h, 1.0).unwrap().state;
        let mut worst = 0.0f64;
        for seed in 0..40 {
            let e = sample_control_operation(4, &bath, seed).unwrap();
            worst = worst.max(work_locking_check(&e, &psi, &h, &h_w).unwrap());
        }
        assert!(worst > 0.05, "max TV {worst:.3e}");
    }

    #[test]
    fn activation_of_two_coherent_thermal_qubits() {
        let h = qubit();
        for beta in [1.0, 5.0] {
            let report = activation_demo(&h, &h, beta).unwrap();
            assert!(report.factor_classical_surplus[0] < 1e-9);
            assert!(report.factor_classical_surplus[1] < 1e-9);
            assert!(
                report.joint_dephased_vs_gibbs_norm > 0.01,
                "beta {beta}: {:.3e}",
                report.joint_dephased_vs_gibbs_norm
            );
            assert!(
                report.activated_free_energy > 0.0,
                "beta {beta}: {:.3e}",
                report.activated_free_energy
            );
        }
    }

    #[test]
    fn no_activation_from_a_thermal_partner() {
        // Dephasing ρ₁ ⊗ γ₂ produces exactly γ₁ ⊗ γ₂: nothing to extract.
        let h = qubit();
        let beta = 1.0;
        let tp = qubit_thermal(beta);
        let rho1 = coherent_thermal_state(&h, beta).unwrap().state;
        let h_bar = Hamiltonian::new(joint_hamiltonian(&h, &h).matrix().clone()).unwrap();
        let joint = rho1.tensor(tp.gibbs());
        let sigma12 = dephase(&joint, &h_bar).unwrap();
        let product = dephase(&rho1, &h).unwrap().tensor(tp.gibbs());
        assert!(sigma12.matrix().max_abs_diff(product.matrix()) < 1e-12);
    }

    #[test]
    fn reference_state_simulates_asymmetric_map() {
        let h1 = qubit();
        // Thermal reference: the effective map stays covariant.
        let h2 = Hamiltonian::from_energies(&[0.0, 1.0]).unwrap();
        let t2 = gibbs_state(&h2, 1.0).unwrap();
        let h_joint = Hamiltonian::new(joint_hamiltonian(&h1, &h2).matrix().clone()).unwrap();
        let bath = BathSpec::matched_to(&h_joint, 4, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(75);
        let rho1 = crate::thermalops::random_density(2, &mut rng);
        let e = sample_thermal_operation(&h_joint, &bath, 11).unwrap();
        let sim = simulate_nonsymmetric(&e, &rho1, t2.gibbs(), &h1, &DEFAULT_T_SAMPLES).unwrap();
        assert!(
            sim.covariance_defect < 1e-8,
            "{:.3e}",
            sim.covariance_defect
        );

        // Identity channel: output is the input.
        let bath1 = BathSpec::ladder(1.0, 1, 1.0).unwrap();
        let id =
            QuantumChannel::from_parts(&h_joint, bath1, ComplexMatrix::identity(4), 0).unwrap();
        let sim = simulate_nonsymmetric(&id, &rho1, t2.gibbs(), &h1, &[1.0]).unwrap();
        assert!(sim.output.matrix().max_abs_diff(rho1.matrix()) < 1e-10);
    }

    #[test]
    fn coherent_reference_breaks_effective_covariance() {
        // Coherent thermal state on a dim-8 ladder as the reference; report
        // the max effective-map defect found over 100 sampled channels.
        let h1 = qubit();
        let h2 = Hamiltonian::from_energies(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        let psi2 = coherent_thermal_state(&h2, 1.0).unwrap().state;
        let h_joint = Hamiltonian::new(joint_hamiltonian(&h1, &h2).matrix().clone()).unwrap();
        let bath = BathSpec::matched_to(&h_joint, 4, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(76);
        let rho1 = crate::thermalops::random_density(2, &mut rng);
        let mut max_defect = 0.0f64;
        for seed in 0..100 {
            let e = sample_thermal_operation(&h_joint, &bath, seed).unwrap();
            let sim = simulate_nonsymmetric(&e, &rho1, &psi2, &h1, &DEFAULT_T_SAMPLES).unwrap();
            max_defect = max_defect.max(sim.covariance_defect);
        }
        assert!(max_defect > 1e-3, "max defect {max_defect:.3e}");
    }

    #[test]
    fn catalytic_maps_stay_covariant() {
        let h = qubit();
        let h_cat = Hamiltonian::from_energies(&[0.0, 1.0]).unwrap();
        let h_joint = Hamiltonian::new(joint_hamiltonian(&h, &h_cat).matrix().clone()).unwrap();
        let bath = BathSpec::matched_to(&h_joint, 4, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let rho = crate::thermalops::random_density(2, &mut rng);

        // Thermal catalyst.
        let gamma_cat = gibbs_state(&h_cat, 1.0).unwrap().gibbs().clone();
        let e = sample_thermal_operation(&h_joint, &bath, 21).unwrap();
        let check =
            catalytic_covariance_check(&e, &rho, &gamma_cat, &h, &h_cat, &DEFAULT_T_SAMPLES)
                .unwrap();
        assert!(check.covariance_defect < 1e-8);

        // Non-thermal diagonal catalyst: still covariant, even when the
        // catalyst does not come back unchanged.
        let skew = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.15, 0.85])).unwrap();
        let mut saw_disturbed_catalyst = false;
        for seed in 0..100 {
            let e = sample_thermal_operation(&h_joint, &bath, seed).unwrap();
            let check = catalytic_covariance_check(&e, &rho, &skew, &h, &h_cat, &DEFAULT_T_SAMPLES)
                .unwrap();
            assert!(check.covariance_defect < 1e-8, "seed {seed}");
            if check.catalyst_return_defect > 1e-3 {
                saw_disturbed_catalyst = true;
            }
        }
        assert!(saw_disturbed_catalyst);

        // Coherent catalysts are rejected up front.
        let plus = {
            let inv = 1.0 / 2f64.sqrt();
            DensityMatrix::pure(&ComplexMatrix::ket(&[
                Complex64::new(inv, 0.0),
                Complex64::new(inv, 0.0),
            ]))
            .unwrap()
        };
        let err = catalytic_covariance_check(&e, &rho, &plus, &h, &h_cat, &DEFAULT_T_SAMPLES)
            .unwrap_err();
        assert!(err.is_input());
    }

    #[test]
    fn equilibrium_bound_equal_hamiltonians() {
        let tp = qubit_thermal(1.0);
        let bound = equilibrium_work_bound(&tp, &tp, 0.0, &AlphaGrid::default()).unwrap();
        assert!(bound.feasible);
        assert!(bound.closed_form_bound.abs() < 1e-12);
        assert!(bound.collapse_defect < 1e-9);
        for (_, t) in &bound.thresholds {
            assert!(t.abs() < 1e-9);
        }
    }

    #[test]
    fn equilibrium_bound_between_gapped_qubits() {
        // From the larger-gap Hamiltonian to the smaller-gap one at β = 1
        // the extractable work is kT·ln(Z₂/Z₁) = ln(1+e⁻¹) - ln(1+e⁻²),
        // about 0.1863: w = 0.1 is feasible, w = 0.25 is not.
        let h_big = Hamiltonian::from_energies(&[0.0, 2.0]).unwrap();
        let h_small = Hamiltonian::from_energies(&[0.0, 1.0]).unwrap();
        let t1 = gibbs_state(&h_big, 1.0).unwrap();
        let t2 = gibbs_state(&h_small, 1.0).unwrap();
        let expect = (1.0 + (-1.0f64).exp()).ln() - (1.0 + (-2.0f64).exp()).ln();
        assert!((expect - 0.186333).abs() < 1e-6);

        let grid = AlphaGrid::default();
        let feasible = equilibrium_work_bound(&t1, &t2, 0.1, &grid).unwrap();
        assert!(feasible.feasible);
        assert!((feasible.closed_form_bound - expect).abs() < 1e-12);
        assert!(feasible.collapse_defect < 1e-9);
        assert!(feasible.threshold_vs_closed_form < 1e-9);

        let infeasible = equilibrium_work_bound(&t1, &t2, 0.25, &grid).unwrap();
        assert!(!infeasible.feasible);

        // Reversed direction: pumping work in is required, none extractable.
        let reversed = equilibrium_work_bound(&t2, &t1, 0.1, &grid).unwrap();
        assert!(!reversed.feasible);
        assert!((reversed.closed_form_bound + expect).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_bound_rejects_mismatched_beta() {
        let t1 = qubit_thermal(1.0);
        let t2 = qubit_thermal(2.0);
        let err = equilibrium_work_bound(&t1, &t2, 0.0, &AlphaGrid::default()).unwrap_err();
        assert!(err.is_input());
    }
}
