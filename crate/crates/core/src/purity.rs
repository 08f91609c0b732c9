//! Classical (block-diagonal) layer: the canonical-to-microcanonical
//! embedding map Γ_d, its divergence-preserving duality, majorization, and
//! grid-sampled necessary conditions for trumping.

use crate::divergences::{classical_renyi, Alpha, AlphaGrid};
use crate::error::{Error, Result};
use crate::tol;

/// Scope caveat attached to every trumping verdict: the α grid samples an
/// infinite family of inequalities.
pub const TRUMPING_SCOPE: &str = "necessary on sampled grid, not sufficient";

/// Probability vector with normalization and nonnegativity certificates.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    entries: Vec<f64>,
    sum_defect: f64,
}

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        if let Some(&bad) = entries.iter().find(|&&x| x < -1e-12 || !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "probability entry {bad} out of range"
            )));
        }
        let sum: f64 = entries.iter().sum();
        let sum_defect = (sum - 1.0).abs();
        if sum_defect > tol::TRACE {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {sum}, defect {sum_defect:.3e}"
            )));
        }
        Ok(Self {
            entries,
            sum_defect,
        })
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            entries: vec![1.0 / dim as f64; dim],
            sum_defect: 0.0,
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum_defect(&self) -> f64 {
        self.sum_defect
    }
}

/// Block sizes d_1..d_n of an embedding, with N = Σ d_i.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingDims {
    d: Vec<usize>,
    total: usize,
}

impl EmbeddingDims {
    pub fn new(d: Vec<usize>) -> Result<Self> {
        if d.is_empty() || d.iter().any(|&x| x == 0) {
            return Err(Error::InvalidInput(format!(
                "embedding dims must all be ≥ 1, got {d:?}"
            )));
        }
        let total = d.iter().sum();
        Ok(Self { d, total })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.d
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// The rational distribution d_i/N this embedding represents.
    pub fn rational_gibbs(&self) -> ProbVector {
        let n = self.total as f64;
        ProbVector::new(self.d.iter().map(|&di| di as f64 / n).collect())
            .expect("d_i/N is normalized")
    }
}

/// Best common-denominator rational approximation d_i/N of `gamma` with
/// N ≤ max_denominator. Ties in the max-entry error resolve to smaller N.
pub fn rationalize_gibbs(
    gamma: &ProbVector,
    max_denominator: usize,
) -> Result<(EmbeddingDims, f64)> {
    let dim = gamma.len();
    if max_denominator < dim {
        return Err(Error::InvalidInput(format!(
            "max denominator {max_denominator} below dimension {dim}"
        )));
    }
    let mut best: Option<(EmbeddingDims, f64)> = None;
    for n in dim..=max_denominator {
        // Round each entry, force the total back to n by adjusting the
        // entries with the largest rounding slack.
        let mut d: Vec<usize> = gamma
            .entries()
            .iter()
            .map(|&g| (g * n as f64).round().max(1.0) as usize)
            .collect();
        let mut total: isize = d.iter().sum::<usize>() as isize;
        while total != n as isize {
            let step: isize = if total < n as isize { 1 } else { -1 };
            let mut pick = 0usize;
            let mut gain = f64::NEG_INFINITY;
            for (i, &di) in d.iter().enumerate() {
                let candidate = di as isize + step;
                if candidate < 1 {
                    continue;
                }
                let before = (gamma.entries()[i] - di as f64 / n as f64).abs();
                let after = (gamma.entries()[i] - candidate as f64 / n as f64).abs();
                if before - after > gain {
                    gain = before - after;
                    pick = i;
                }
            }
            d[pick] = (d[pick] as isize + step) as usize;
            total += step;
        }
        let err = d
            .iter()
            .zip(gamma.entries())
            .map(|(&di, &g)| (g - di as f64 / n as f64).abs())
            .fold(0.0f64, f64::max);
        if best.as_ref().map_or(true, |(_, e)| err < *e) {
            best = Some((EmbeddingDims::new(d)?, err));
        }
    }
    Ok(best.expect("scan covers at least one denominator"))
}

/// Γ_d(p): block i carries d_i copies of p_i/d_i.
pub fn embedding_map(p: &ProbVector, dims: &EmbeddingDims) -> Result<ProbVector> {
    if p.len() != dims.blocks().len() {
        return Err(Error::DimensionMismatch(format!(
            "embedding_map: vector length {} vs {} blocks",
            p.len(),
            dims.blocks().len()
        )));
    }
    let mut out = Vec::with_capacity(dims.total());
    for (&pi, &di) in p.entries().iter().zip(dims.blocks()) {
        out.extend(std::iter::repeat(pi / di as f64).take(di));
    }
    Ok(ProbVector {
        entries: out,
        sum_defect: p.sum_defect(),
    })
}

/// Max-over-grid defect of the duality S_α(p‖γ) = S_α(Γ_d(p)‖η), where γ
/// is the rational distribution of `dims` and η is uniform on N points.
/// The supplied gamma must match d_i/N to within the trace tolerance.
pub fn embedding_isometry_check(
    p: &ProbVector,
    gamma: &ProbVector,
    dims: &EmbeddingDims,
    grid: &AlphaGrid,
) -> Result<f64> {
    if gamma.len() != dims.blocks().len() {
        return Err(Error::DimensionMismatch(format!(
            "embedding_isometry_check: gamma length {} vs {} blocks",
            gamma.len(),
            dims.blocks().len()
        )));
    }
    let rational = dims.rational_gibbs();
    for (&g, &r) in gamma.entries().iter().zip(rational.entries()) {
        if (g - r).abs() > tol::TRACE {
            return Err(Error::InvalidInput(format!(
                "gamma entry {g} is not the rationalized value {r}; rationalize first"
            )));
        }
    }
    let embedded = embedding_map(p, dims)?;
    let eta = ProbVector::uniform(dims.total());
    let mut worst = 0.0f64;
    for alpha in grid.iter() {
        let lhs = classical_renyi(p.entries(), rational.entries(), alpha)?;
        let rhs = classical_renyi(embedded.entries(), eta.entries(), alpha)?;
        let defect = match (lhs.finite(), rhs.finite()) {
            (Some(a), Some(b)) => (a - b).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// True iff p majorizes q: all partial sums of the descending sort of p
/// dominate those of q (within 1e-10). Shorter vectors are zero-padded.
pub fn majorizes(p: &ProbVector, q: &ProbVector) -> bool {
    let n = p.len().max(q.len());
    let sorted_desc = |v: &ProbVector| {
        let mut s = v.entries().to_vec();
        s.resize(n, 0.0);
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    };
    let ps = sorted_desc(p);
    let qs = sorted_desc(q);
    let mut cp = 0.0;
    let mut cq = 0.0;
    for k in 0..n {
        cp += ps[k];
        cq += qs[k];
        if cp < cq - 1e-10 {
            return false;
        }
    }
    true
}

/// Trumping necessary-condition verdict over a sampled α grid.
#[derive(Clone, Debug)]
pub struct TrumpingVerdict {
    pub pass: bool,
    /// Per-α slack S_α(p‖γ) - S_α(p'‖γ); negative values are failures.
    /// +∞ on one side is resolved per the extended-real conventions.
    pub per_alpha: Vec<(Alpha, f64)>,
    /// Human-readable scope restriction.
    pub scope: &'static str,
}

/// PASS iff S_α(p‖γ) ≥ S_α(p'‖γ) - 1e-9 at every grid α. A PASS is only a
/// necessary condition for trumping: the grid samples the full family.
pub fn trumping_necessary_check(
    p: &ProbVector,
    p_prime: &ProbVector,
    gamma: &ProbVector,
    grid: &AlphaGrid,
) -> Result<TrumpingVerdict> {
    if p.len() != p_prime.len() || p.len() != gamma.len() {
        return Err(Error::DimensionMismatch(format!(
            "trumping check: lengths {}, {}, {}",
            p.len(),
            p_prime.len(),
            gamma.len()
        )));
    }
    let mut per_alpha = Vec::with_capacity(grid.len());
    let mut pass = true;
    for alpha in grid.iter() {
        let before = classical_renyi(p.entries(), gamma.entries(), alpha)?;
        let after = classical_renyi(p_prime.entries(), gamma.entries(), alpha)?;
        let slack = match (before.finite(), after.finite()) {
            (Some(b), Some(a)) => b - a,
            (None, _) => f64::INFINITY,
            (Some(_), None) => f64::NEG_INFINITY,
        };
        if slack < -1e-9 {
            pass = false;
        }
        per_alpha.push((alpha, slack));
    }
    Ok(TrumpingVerdict {
        pass,
        per_alpha,
        scope: TRUMPING_SCOPE,
    })
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn prob_vec(dim: usize) -> impl Strategy<Value = ProbVector> {
        proptest::collection::vec(1e-3f64..1.0, dim).prop_map(|raw| {
            let s: f64 = raw.iter().sum();
            ProbVector::new(raw.iter().map(|x| x / s).collect()).unwrap()
        })
    }

    /// Average of random permutations of p: a doubly stochastic image,
    /// hence majorized by p.
    fn randomly_mixed(p: &ProbVector, rng: &mut ChaCha8Rng, terms: usize) -> ProbVector {
        let n = p.len();
        let mut acc = vec![0.0f64; n];
        for _ in 0..terms {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(rng);
            for (slot, &from) in idx.iter().enumerate() {
                acc[slot] += p.entries()[from] / terms as f64;
            }
        }
        ProbVector::new(acc).unwrap()
    }

    proptest! {
        #[test]
        fn majorization_is_reflexive(p in prob_vec(4)) {
            prop_assert!(majorizes(&p, &p));
        }

        #[test]
        fn majorization_antisymmetry_up_to_permutation(p in prob_vec(4), q in prob_vec(4)) {
            if majorizes(&p, &q) && majorizes(&q, &p) {
                let mut ps = p.entries().to_vec();
                let mut qs = q.entries().to_vec();
                ps.sort_by(|a, b| b.partial_cmp(a).unwrap());
                qs.sort_by(|a, b| b.partial_cmp(a).unwrap());
                for (a, b) in ps.iter().zip(&qs) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn majorization_is_transitive(p in prob_vec(5), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = randomly_mixed(&p, &mut rng, 3);
            let r = randomly_mixed(&q, &mut rng, 3);
            prop_assert!(majorizes(&p, &q));
            prop_assert!(majorizes(&q, &r));
            prop_assert!(majorizes(&p, &r));
        }

        #[test]
        fn embedding_duality_holds_on_random_vectors(p in prob_vec(3), blocks in proptest::collection::vec(1usize..5, 3)) {
            let dims = EmbeddingDims::new(blocks).unwrap();
            let gamma = dims.rational_gibbs();
            let defect = embedding_isometry_check(&p, &gamma, &dims, &AlphaGrid::default()).unwrap();
            prop_assert!(defect < 1e-9, "defect {}", defect);
        }
    }
}
