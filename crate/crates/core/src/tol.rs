//! Default numeric tolerances, collected in one place.
//!
//! All entropic quantities are handled in nats and all tolerances are
//! absolute unless the name says otherwise.

/// Max entrywise |M - M†| accepted when certifying a Hermitian operator.
pub const HERMITICITY: f64 = 1e-10;

/// Max entrywise |V†V - I| accepted for an eigenbasis.
pub const ORTHONORMALITY: f64 = 1e-9;

/// Max entrywise |V diag(λ) V† - A| accepted for an eigendecomposition.
pub const RECONSTRUCTION: f64 = 1e-9;

/// Eigenvalue gap below which two levels belong to the same degenerate
/// eigenspace.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Relative support cutoff: eigenvalues below `SUPPORT_CUTOFF_REL * λ_max`
/// are treated as zero in fractional powers and support projectors.
pub const SUPPORT_CUTOFF_REL: f64 = 1e-12;

/// Trace overlaps below this are treated as exact support violations
/// (the value would otherwise be dominated by rounding noise).
pub const OVERLAP_FLOOR: f64 = 1e-12;

/// |Tr ρ - 1| accepted for a density matrix.
pub const TRACE: f64 = 1e-9;

/// Most negative eigenvalue accepted for a positive-semidefinite certificate.
pub const PSD: f64 = 1e-9;

/// Max entrywise commutator defect accepted where exact commutation is
/// required ([U, H_tot], [γ, H], block-diagonal catalysts).
pub const COMMUTATION: f64 = 1e-9;

/// Trace-distance threshold for the support-membership test
/// (ρ counts as inside supp σ when ‖Π_σ ρ Π_σ - ρ‖₁/2 is below this).
pub const SUPPORT_MEMBERSHIP: f64 = 1e-9;

/// Max entrywise |Σ K†K - I| accepted for a Kraus decomposition.
pub const KRAUS_COMPLETENESS: f64 = 1e-8;

/// Max entrywise |U†U - I| accepted for a global unitary.
pub const UNITARITY: f64 = 1e-9;

/// Residual accepted for the free-energy splitting identity
/// F = F_c + kT·A.
pub const SPLIT_RESIDUAL: f64 = 1e-9;

/// Default absolute tolerance on ΔF_α / ΔA_α monotone verdicts.
pub const VERDICT: f64 = 1e-8;

/// Iteration cap handed to the Hermitian eigensolver.
pub const EIG_MAX_ITER: usize = 50_000;
