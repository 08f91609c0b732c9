//! Quantum Rényi divergences (Petz family below α = 1, sandwiched family
//! above), the α = 0, 1, ∞ closed forms, generalized free energies F_α,
//! free coherences A_α, the free-energy splitting, and the classical
//! (probability-vector) divergences used by the embedding layer.

use crate::error::{Error, Result};
use crate::linops::{hermitian_eig, ComplexMatrix, EigenSystem};
use crate::states::{dephase, DensityMatrix, Hamiltonian, ThermalPair};
use crate::tol;
use std::fmt;
use std::str::FromStr;

/// Rényi order tag. Finite orders are positive and distinct from 1;
/// the three special orders carry dedicated closed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alpha {
    Zero,
    Finite(f64),
    One,
    Infinity,
}

impl Alpha {
    /// Normalizing constructor from a raw order value.
    pub fn from_value(a: f64) -> Result<Alpha> {
        if a.is_nan() || a < 0.0 {
            return Err(Error::InvalidInput(format!("invalid Rényi order {a}")));
        }
        Ok(if a == 0.0 {
            Alpha::Zero
        } else if a == 1.0 {
            Alpha::One
        } else if a.is_infinite() {
            Alpha::Infinity
        } else {
            Alpha::Finite(a)
        })
    }

    /// Numeric value, +∞ for the Infinity tag.
    pub fn value(&self) -> f64 {
        match self {
            Alpha::Zero => 0.0,
            Alpha::Finite(a) => *a,
            Alpha::One => 1.0,
            Alpha::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Zero => write!(f, "0"),
            Alpha::One => write!(f, "1"),
            Alpha::Infinity => write!(f, "inf"),
            Alpha::Finite(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Alpha> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "infinity" | "∞" => Ok(Alpha::Infinity),
            other => {
                let a: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("cannot parse alpha '{other}'")))?;
                Alpha::from_value(a)
            }
        }
    }
}

/// Ascending, duplicate-free list of Rényi orders.
#[derive(Clone, Debug)]
pub struct AlphaGrid(Vec<Alpha>);

impl AlphaGrid {
    pub fn new(mut values: Vec<Alpha>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty alpha grid".into()));
        }
        values.sort_by(|a, b| a.value().partial_cmp(&b.value()).unwrap());
        for w in values.windows(2) {
            if w[0].value() == w[1].value() {
                return Err(Error::InvalidInput(format!(
                    "duplicate alpha {} in grid",
                    w[0]
                )));
            }
        }
        Ok(Self(values))
    }

    pub fn parse(spec: &str) -> Result<Self> {
        let values = spec
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(Alpha::from_str)
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn values(&self) -> &[Alpha] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Alpha> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for AlphaGrid {
    /// 0, 0.25, 0.5, 0.75, 1, 1.5, 2, 3, 5, 10, ∞.
    fn default() -> Self {
        let mut v = vec![Alpha::Zero];
        for a in [0.25, 0.5, 0.75] {
            v.push(Alpha::Finite(a));
        }
        v.push(Alpha::One);
        for a in [1.5, 2.0, 3.0, 5.0, 10.0] {
            v.push(Alpha::Finite(a));
        }
        v.push(Alpha::Infinity);
        Self(v)
    }
}

/// A divergence value: finite, or +∞ from a support violation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(*x),
            ExtendedReal::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    pub fn expect_finite(&self, what: &str) -> Result<f64> {
        self.finite()
            .ok_or_else(|| Error::Numeric(format!("{what} is infinite")))
    }

    /// Map a finite value, passing +∞ through.
    pub fn map(self, f: impl FnOnce(f64) -> f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(x) => ExtendedReal::Finite(f(x)),
            ExtendedReal::Infinity => ExtendedReal::Infinity,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

/// Difference of two extended reals. ∞ - ∞ is kept as an explicit
/// indeterminate flag rather than silently resolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Delta {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Indeterminate,
}

impl Delta {
    pub fn between(after: ExtendedReal, before: ExtendedReal) -> Delta {
        match (after, before) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Delta::Finite(a - b),
            (ExtendedReal::Infinity, ExtendedReal::Finite(_)) => Delta::PlusInfinity,
            (ExtendedReal::Finite(_), ExtendedReal::Infinity) => Delta::MinusInfinity,
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => Delta::Indeterminate,
        }
    }

    /// Whether this difference violates a ≤ 0 law at absolute tolerance
    /// `tolerance`. Indeterminate (∞ - ∞) counts as a violation.
    pub fn exceeds(&self, tolerance: f64) -> bool {
        match self {
            Delta::Finite(x) => *x > tolerance,
            Delta::PlusInfinity | Delta::Indeterminate => true,
            Delta::MinusInfinity => false,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Delta::Finite(x) => Some(*x),
            _ => None,
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::Finite(x) => write!(f, "{x}"),
            Delta::PlusInfinity => write!(f, "inf"),
            Delta::MinusInfinity => write!(f, "-inf"),
            Delta::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

fn state_eig(rho: &DensityMatrix) -> Result<EigenSystem> {
    hermitian_eig(rho.op(), tol::DEGENERACY_GAP)
}

/// ⟨u_k| M |u_k⟩ for eigenvector column k.
fn eigvec_expectation(eig: &EigenSystem, k: usize, m: &ComplexMatrix) -> f64 {
    let d = eig.dim();
    let v = eig.eigenvectors();
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..d {
        let vi = v.get(i, k).conj();
        for j in 0..d {
            acc += vi * m.get(i, j) * v.get(j, k);
        }
    }
    acc.re
}

/// Weight of ρ outside the support of σ, 1 - Tr[Π_σ ρ].
fn support_leakage(rho: &DensityMatrix, sigma_eig: &EigenSystem) -> f64 {
    let cut = sigma_eig.support_cutoff();
    let mut inside = 0.0;
    for (k, &lam) in sigma_eig.eigenvalues().iter().enumerate() {
        if lam > cut {
            inside += eigvec_expectation(sigma_eig, k, rho.matrix());
        }
    }
    1.0 - inside
}

/// Support-membership test: ρ counts as inside supp σ when
/// ‖Π_σ ρ Π_σ - ρ‖₁/2 stays below the membership tolerance. The cheap
/// leakage bound decides all but borderline cases; those fall back to the
/// full trace-distance evaluation.
fn in_support(rho: &DensityMatrix, sigma_eig: &EigenSystem) -> Result<bool> {
    if sigma_eig.support_rank() == sigma_eig.dim() {
        return Ok(true);
    }
    let leakage = support_leakage(rho, sigma_eig).max(0.0);
    // ‖ρ - ΠρΠ‖₁ ≥ leakage and ≤ 2√leakage.
    if leakage <= 0.25 * tol::SUPPORT_MEMBERSHIP * tol::SUPPORT_MEMBERSHIP {
        return Ok(true);
    }
    if leakage > 2.0 * tol::SUPPORT_MEMBERSHIP {
        return Ok(false);
    }
    let proj = crate::linops::support_projector(sigma_eig);
    let sandwiched = proj.matmul(rho.matrix()).matmul(&proj);
    let dist = crate::linops::trace_distance(&sandwiched, rho.matrix())?;
    Ok(dist <= tol::SUPPORT_MEMBERSHIP)
}

/// Trace of the product of two Hermitian matrices, Σ_ij A_ij B_ji.
fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a.rows();
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc.re
}

fn check_dims(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("{what}: {a} vs {b}")));
    }
    Ok(())
}

/// Quantum Rényi divergence S_α(ρ‖σ) in nats.
///
/// Petz family on [0, 1), sandwiched family above 1, and dedicated closed
/// forms at α = 0, 1, ∞. Returns +∞ exactly when the branch's support
/// condition fails.
pub fn renyi_divergence(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: Alpha,
) -> Result<ExtendedReal> {
    check_dims(rho.dim(), sigma.dim(), "renyi_divergence")?;
    match alpha {
        Alpha::Zero => {
            let rho_eig = state_eig(rho)?;
            let cut = rho_eig.support_cutoff();
            let mut overlap = 0.0;
            for (k, &lam) in rho_eig.eigenvalues().iter().enumerate() {
                if lam > cut {
                    overlap += eigvec_expectation(&rho_eig, k, sigma.matrix());
                }
            }
            if overlap < tol::OVERLAP_FLOOR {
                Ok(ExtendedReal::Infinity)
            } else {
                Ok(ExtendedReal::Finite(-overlap.ln()))
            }
        }
        Alpha::Finite(a) if a < 1.0 => {
            let rho_eig = state_eig(rho)?;
            let sigma_eig = state_eig(sigma)?;
            let rcut = rho_eig.support_cutoff();
            let scut = sigma_eig.support_cutoff();
            let rho_a = rho_eig.apply_real(|x| if x <= rcut { 0.0 } else { x.powf(a) });
            let sigma_1a = sigma_eig.apply_real(|x| if x <= scut { 0.0 } else { x.powf(1.0 - a) });
            let t = trace_of_product(&rho_a, &sigma_1a);
            if t < tol::OVERLAP_FLOOR {
                Ok(ExtendedReal::Infinity)
            } else {
                Ok(ExtendedReal::Finite(t.ln() / (a - 1.0)))
            }
        }
        Alpha::One => relative_entropy(rho, sigma),
        Alpha::Finite(a) => {
            let sigma_eig = state_eig(sigma)?;
            if !in_support(rho, &sigma_eig)? {
                return Ok(ExtendedReal::Infinity);
            }
            let scut = sigma_eig.support_cutoff();
            let c = (1.0 - a) / (2.0 * a);
            let sigma_c = sigma_eig.apply_real(|x| if x <= scut { 0.0 } else { x.powf(c) });
            let m = sigma_c.matmul(rho.matrix()).matmul(&sigma_c).symmetrized();
            let m_eig = hermitian_eig(
                &crate::linops::HermitianOperator::with_tolerance(m, 1e-6)?,
                tol::DEGENERACY_GAP,
            )?;
            let t: f64 = m_eig
                .eigenvalues()
                .iter()
                .map(|&x| if x > 0.0 { x.powf(a) } else { 0.0 })
                .sum();
            if t < tol::OVERLAP_FLOOR {
                Ok(ExtendedReal::Infinity)
            } else {
                Ok(ExtendedReal::Finite(t.ln() / (a - 1.0)))
            }
        }
        Alpha::Infinity => {
            let sigma_eig = state_eig(sigma)?;
            if !in_support(rho, &sigma_eig)? {
                return Ok(ExtendedReal::Infinity);
            }
            let scut = sigma_eig.support_cutoff();
            let sigma_inv_sqrt =
                sigma_eig.apply_real(|x| if x <= scut { 0.0 } else { x.powf(-0.5) });
            let m = sigma_inv_sqrt
                .matmul(rho.matrix())
                .matmul(&sigma_inv_sqrt)
                .symmetrized();
            let m_eig = hermitian_eig(
                &crate::linops::HermitianOperator::with_tolerance(m, 1e-6)?,
                tol::DEGENERACY_GAP,
            )?;
            let top = m_eig
                .eigenvalues()
                .last()
                .copied()
                .unwrap_or(0.0)
                .max(tol::OVERLAP_FLOOR);
            Ok(ExtendedReal::Finite(top.ln()))
        }
    }
}

/// Quantum relative entropy S(ρ‖σ) = Tr[ρ(ln ρ - ln σ)] on the support of
/// σ; +∞ when supp ρ ⊄ supp σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
    check_dims(rho.dim(), sigma.dim(), "relative_entropy")?;
    let sigma_eig = state_eig(sigma)?;
    if !in_support(rho, &sigma_eig)? {
        return Ok(ExtendedReal::Infinity);
    }
    let rho_eig = state_eig(rho)?;
    let rcut = rho_eig.support_cutoff();
    let scut = sigma_eig.support_cutoff();
    let neg_entropy: f64 = rho_eig
        .eigenvalues()
        .iter()
        .filter(|&&x| x > rcut)
        .map(|&x| x * x.ln())
        .sum();
    let mut cross = 0.0;
    for (k, &mu) in sigma_eig.eigenvalues().iter().enumerate() {
        if mu > scut {
            cross += mu.ln() * eigvec_expectation(&sigma_eig, k, rho.matrix());
        }
    }
    Ok(ExtendedReal::Finite(neg_entropy - cross))
}

/// Generalized free energy F_α(ρ) = kT·S_α(ρ‖γ) - kT·ln Z_H, in energy
/// units. Requires β > 0.
pub fn free_energy(
    rho: &DensityMatrix,
    thermal: &ThermalPair,
    alpha: Alpha,
) -> Result<ExtendedReal> {
    check_dims(rho.dim(), thermal.hamiltonian().dim(), "free_energy")?;
    let kt = thermal.kt()?;
    let s = renyi_divergence(rho, thermal.gibbs(), alpha)?;
    Ok(s.map(|x| kt * (x - thermal.log_partition())))
}

/// Free coherence A_α(ρ) = S_α(ρ‖D_H(ρ)), a time-translation asymmetry
/// monotone. Always finite; a support violation here indicates a numeric
/// breakdown and is reported as an error.
pub fn free_coherence(rho: &DensityMatrix, h: &Hamiltonian, alpha: Alpha) -> Result<ExtendedReal> {
    check_dims(rho.dim(), h.dim(), "free_coherence")?;
    let dephased = dephase(rho, h)?;
    match renyi_divergence(rho, &dephased, alpha)? {
        ExtendedReal::Infinity => Err(Error::Numeric(
            "free coherence came out infinite; supp ρ must lie in supp D_H(ρ)".into(),
        )),
        finite => Ok(finite),
    }
}

/// The α = 1 free-energy splitting F = F_c + kT·A.
#[derive(Clone, Copy, Debug)]
pub struct FreeEnergySplit {
    /// F(ρ).
    pub free_energy: f64,
    /// F_c(ρ) = F(D_H(ρ)).
    pub classical: f64,
    /// kT·A(ρ).
    pub kt_times_coherence: f64,
    /// |F - F_c - kT·A|.
    pub residual: f64,
}

impl FreeEnergySplit {
    pub fn identity_holds(&self) -> bool {
        self.residual <= tol::SPLIT_RESIDUAL
    }
}

/// Split F(ρ) into its classical part and the coherence contribution.
pub fn free_energy_split(rho: &DensityMatrix, thermal: &ThermalPair) -> Result<FreeEnergySplit> {
    let h = thermal.hamiltonian();
    let f = free_energy(rho, thermal, Alpha::One)?.expect_finite("F(ρ)")?;
    let dephased = dephase(rho, h)?;
    let classical = free_energy(&dephased, thermal, Alpha::One)?.expect_finite("F_c(ρ)")?;
    let kt = thermal.kt()?;
    let a = free_coherence(rho, h, Alpha::One)?.expect_finite("A(ρ)")?;
    let kt_times_coherence = kt * a;
    let residual = (f - classical - kt_times_coherence).abs();
    Ok(FreeEnergySplit {
        free_energy: f,
        classical,
        kt_times_coherence,
        residual,
    })
}

/// Classical Rényi divergence between probability vectors, with the same
/// branch structure and support conventions as the quantum form
/// (0·ln 0 = 0; entries at or below the relative cutoff count as zero).
pub fn classical_renyi(p: &[f64], q: &[f64], alpha: Alpha) -> Result<ExtendedReal> {
    check_dims(p.len(), q.len(), "classical_renyi")?;
    let cut =
        |v: &[f64]| tol::SUPPORT_CUTOFF_REL * v.iter().cloned().fold(0.0f64, |m, x| m.max(x.abs()));
    let (pcut, qcut) = (cut(p), cut(q));
    let p_supported = |i: usize| p[i] > pcut;
    let q_supported = |i: usize| q[i] > qcut;
    let support_violated = (0..p.len()).any(|i| p_supported(i) && !q_supported(i));
    match alpha {
        Alpha::Zero => {
            let overlap: f64 = (0..p.len()).filter(|&i| p_supported(i)).map(|i| q[i]).sum();
            if overlap < tol::OVERLAP_FLOOR {
                Ok(ExtendedReal::Infinity)
            } else {
                Ok(ExtendedReal::Finite(-overlap.ln()))
            }
        }
        Alpha::Finite(a) if a < 1.0 => {
            let t: f64 = (0..p.len())
                .filter(|&i| p_supported(i) && q_supported(i))
                .map(|i| p[i].powf(a) * q[i].powf(1.0 - a))
                .sum();
            if t < tol::OVERLAP_FLOOR {
                Ok(ExtendedReal::Infinity)
            } else {
                Ok(ExtendedReal::Finite(t.ln() / (a - 1.0)))
            }
        }
        Alpha::One => {
            if support_violated {
                return Ok(ExtendedReal::Infinity);
            }
            let s: f64 = (0..p.len())
                .filter(|&i| p_supported(i))
                .map(|i| p[i] * (p[i] / q[i]).ln())
                .sum();
            Ok(ExtendedReal::Finite(s))
        }
        Alpha::Finite(a) => {
            if support_violated {
                return Ok(ExtendedReal::Infinity);
            }
            let t: f64 = (0..p.len())
                .filter(|&i| p_supported(i))
                .map(|i| p[i].powf(a) * q[i].powf(1.0 - a))
                .sum();
            Ok(ExtendedReal::Finite(t.ln() / (a - 1.0)))
        }
        Alpha::Infinity => {
            if support_violated {
                return Ok(ExtendedReal::Infinity);
            }
            let top = (0..p.len())
                .filter(|&i| p_supported(i))
                .map(|i| p[i] / q[i])
                .fold(0.0f64, f64::max)
                .max(tol::OVERLAP_FLOOR);
            Ok(ExtendedReal::Finite(top.ln()))
        }
    }
}
