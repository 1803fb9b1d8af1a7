//! Bound evaluation and lattice audits for the faded channel: pairwise-error
//! bounds (Monte Carlo and small-variance approximation), the probability of
//! a faded Hadamard lattice losing well-roundedness, and the diamond-packing
//! and local-diversity figures of merit.

use rayon::prelude::*;

use crate::channel::{moments_h2, rician_sample};
use crate::lattice::{
    canonical_sign, enumerate_short_vectors, Lattice, LatticeVector, MAX_ENUM_DIM,
};
use crate::numerics::integrate;
use crate::rng::SubstreamFamily;
use crate::rotations::{HadamardMatrix, RotationMatrix};
use crate::{Error, Result};

/// A pairwise-error-probability bound value over a truncated vector set.
#[derive(Debug, Clone)]
pub struct PepEstimate {
    pub value: f64,
    /// Monte Carlo standard error; zero for the deterministic approximation.
    pub stderr: f64,
    /// Squared-norm cutoff of the lattice sum.
    pub truncation_bound: f64,
    /// Number of vector representatives included (counts are up to sign).
    pub terms: usize,
}

/// Monte Carlo evaluation of the union bound
/// `1/2 sum_t E[exp(-|diag(h) t|^2 / (8 sigma^2))]`
/// over all nonzero lattice vectors with `|t|^2 <= bound`.
///
/// One fade realization per trial is shared across every vector (common
/// random numbers), so comparisons between lattices at the same substreams
/// have strongly reduced variance.
pub fn pep_bound_mc(
    lattice: &Lattice,
    k: f64,
    sigma2: f64,
    bound: f64,
    trials: u64,
    family: SubstreamFamily,
    first_index: u64,
) -> Result<PepEstimate> {
    if !(k >= 0.0) {
        return Err(Error::NegativeK(k));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::NonpositiveVariance(sigma2));
    }
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let report = enumerate_short_vectors(lattice, bound)?;
    let n = lattice.dim();
    // Per representative: t_k^2 / (8 sigma^2). Signs cancel in the exponent,
    // so each representative stands for both of +-t and the 1/2 drops out.
    let weights: Vec<Vec<f64>> = report
        .vectors
        .iter()
        .map(|v| v.point.iter().map(|t| t * t / (8.0 * sigma2)).collect())
        .collect();
    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = family.substream(first_index + trial);
            let h = rician_sample(k, n, &mut rng).expect("validated above");
            let hsq: Vec<f64> = h.iter().map(|x| x * x).collect();
            weights
                .iter()
                .map(|w| {
                    let exponent: f64 = w.iter().zip(&hsq).map(|(wi, hi)| wi * hi).sum();
                    (-exponent).exp()
                })
                .sum()
        })
        .collect();
    // Sequential reduction in trial order keeps the result independent of
    // the parallelism degree.
    let mean = per_trial.iter().sum::<f64>() / trials as f64;
    let var = per_trial.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / trials as f64;
    let stderr = (var / trials as f64).sqrt();
    Ok(PepEstimate {
        value: mean,
        stderr,
        truncation_bound: bound,
        terms: report.vectors.len(),
    })
}

/// Small-fade-variance approximation of the same bound:
/// `1/2 sum_t e^{-E[h^2] |t|^2 / (8 s2)} (1 + Var(h^2) |t|_4^4 / (2 (8 s2)^2))`.
pub fn pep_bound_approx(
    lattice: &Lattice,
    k: f64,
    sigma2: f64,
    bound: f64,
) -> Result<PepEstimate> {
    if !(sigma2 > 0.0) {
        return Err(Error::NonpositiveVariance(sigma2));
    }
    let (mean_h2, var_h2) = moments_h2(k)?;
    let report = enumerate_short_vectors(lattice, bound)?;
    let denom = 8.0 * sigma2;
    let value = report
        .vectors
        .iter()
        .map(|v| {
            let l4_4 = v.l4.powi(4);
            (-mean_h2 * v.norm_sq / denom).exp() * (1.0 + var_h2 * l4_4 / (2.0 * denom * denom))
        })
        .sum();
    Ok(PepEstimate {
        value,
        stderr: 0.0,
        truncation_bound: bound,
        terms: report.vectors.len(),
    })
}

/// Variance of the normalized faded norm,
/// `(Var(h^2)/E[h^2]^2) * |t|_4^4 / |t|_2^4`.
pub fn fade_variance_ratio(t: &[f64], k: f64) -> Result<f64> {
    let norm_sq: f64 = t.iter().map(|x| x * x).sum();
    if norm_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (mean_h2, var_h2) = moments_h2(k)?;
    let l4_4: f64 = t.iter().map(|x| x.powi(4)).sum();
    Ok(var_h2 / (mean_h2 * mean_h2) * l4_4 / (norm_sq * norm_sq))
}

/// The integer coordinates that can carry a minimal vector of a faded
/// Hadamard lattice: every `w` with `|w|^2 < n`, plus the rows of W,
/// up to sign and deduplicated.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    omegas: Vec<Vec<i64>>,
}

impl CandidateSet {
    pub fn omegas(&self) -> &[Vec<i64>] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Membership test up to sign.
    pub fn contains(&self, coords: &[i64]) -> bool {
        let canon = canonical_sign(coords);
        self.omegas.binary_search(&canon).is_ok()
    }
}

/// Builds the candidate set for one Hadamard matrix.
pub fn candidate_set(w: &HadamardMatrix) -> Result<CandidateSet> {
    let n = w.order();
    if n > MAX_ENUM_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let mut set = std::collections::BTreeSet::new();
    let mut coords = vec![0i64; n];
    collect_below_norm(&mut coords, 0, (n as i64) - 1, &mut set);
    for i in 0..n {
        set.insert(canonical_sign(&w.row(i)));
    }
    set.remove(&vec![0; n]);
    Ok(CandidateSet {
        omegas: set.into_iter().collect(),
    })
}

/// Recursively enumerates integer vectors with squared norm at most `budget`.
fn collect_below_norm(
    coords: &mut Vec<i64>,
    axis: usize,
    budget: i64,
    out: &mut std::collections::BTreeSet<Vec<i64>>,
) {
    if axis == coords.len() {
        out.insert(canonical_sign(coords));
        return;
    }
    let reach = (budget as f64).sqrt().floor() as i64;
    for v in -reach..=reach {
        coords[axis] = v;
        collect_below_norm(coords, axis + 1, budget - v * v, out);
    }
    coords[axis] = 0;
}

/// True iff the faded Hadamard lattice keeps its natural generators minimal:
/// every candidate `w` satisfies `|diag(h) W w|^2 >= sum_k h_k^2` (all
/// natural generators share that squared norm).
pub fn is_faded_wr(w: &HadamardMatrix, h: &[f64]) -> Result<bool> {
    let n = w.order();
    if h.len() != n {
        return Err(Error::LengthMismatch(h.len(), n));
    }
    let candidates = candidate_set(w)?;
    let table = candidate_norm_table(w, &candidates);
    Ok(faded_wr_with_table(&table, h))
}

/// Rows of squared entries of `W w` per candidate, the only data the
/// per-fade test needs.
fn candidate_norm_table(w: &HadamardMatrix, candidates: &CandidateSet) -> Vec<Vec<f64>> {
    let n = w.order();
    candidates
        .omegas()
        .iter()
        .map(|omega| {
            (0..n)
                .map(|i| {
                    let z: i64 = (0..n).map(|j| w.entries()[(i, j)] * omega[j]).sum();
                    (z * z) as f64
                })
                .collect()
        })
        .collect()
}

fn faded_wr_with_table(table: &[Vec<f64>], h: &[f64]) -> bool {
    let hsq: Vec<f64> = h.iter().map(|x| x * x).collect();
    let generator_norm: f64 = hsq.iter().sum();
    table.iter().all(|zsq| {
        let norm: f64 = zsq.iter().zip(&hsq).map(|(z, h)| z * h).sum();
        norm >= generator_norm
    })
}

/// Monte Carlo estimate of the probability that the faded lattice is NOT
/// well-rounded, with its binomial standard error.
pub fn nonwr_probability_mc(
    w: &HadamardMatrix,
    k: f64,
    trials: u64,
    family: SubstreamFamily,
    first_index: u64,
) -> Result<(f64, f64)> {
    if !(k >= 0.0) {
        return Err(Error::NegativeK(k));
    }
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let n = w.order();
    let candidates = candidate_set(w)?;
    let table = candidate_norm_table(w, &candidates);
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = family.substream(first_index + trial);
            let h = rician_sample(k, n, &mut rng).expect("validated above");
            u64::from(!faded_wr_with_table(&table, &h))
        })
        .sum();
    let p = failures as f64 / trials as f64;
    let stderr = (p * (1.0 - p) / trials as f64).sqrt();
    Ok((p, stderr))
}

/// Deterministic quadrature of the non-well-roundedness probability in two
/// dimensions.
///
/// The candidate conditions for the order-2 Hadamard matrix reduce to the
/// cone `h2^2 <= 3 h1^2` and `h1^2 <= 3 h2^2`; the complement probability is
/// one minus the density mass of that cone.
pub fn nonwr_probability_quad(w: &HadamardMatrix, k: f64) -> Result<f64> {
    if w.order() != 2 {
        return Err(Error::UnsupportedOrder(w.order()));
    }
    if !(k >= 0.0) {
        return Err(Error::NegativeK(k));
    }
    let sqrt3 = 3.0_f64.sqrt();
    let limit = (k.sqrt() + 16.0) / (1.0 + k).sqrt();
    let pdf = |h: f64| {
        crate::channel::rician_pdf(h, k).expect("nonnegative arguments")
    };
    let cone_mass = integrate(
        |h1| {
            if h1 <= 0.0 {
                return 0.0;
            }
            let lo = h1 / sqrt3;
            let hi = (sqrt3 * h1).min(limit);
            if hi <= lo {
                return 0.0;
            }
            pdf(h1) * integrate(&pdf, lo, hi, 1e-10)
        },
        0.0,
        limit,
        1e-9,
    );
    Ok(1.0 - cone_mass)
}

/// Result of a local-diversity audit: the smallest product
/// `diversity(t) * |t|^2` over the enumerated vectors and its witness.
#[derive(Debug, Clone)]
pub struct LocalDiversityReport {
    pub min_product: f64,
    pub witness: LatticeVector,
    pub vectors_checked: usize,
}

/// Checks `diversity(t) * |t|^2 >= n` for every nonzero `t` in the rotated
/// lattice with `|t|^2 <= bound`.
///
/// A violation is an error carrying the witness: it means either a bug or a
/// non-Hadamard rotation.
pub fn local_diversity_audit(u: &RotationMatrix, bound: f64) -> Result<LocalDiversityReport> {
    let n = u.dim();
    let threshold = n as f64 - 1e-6;
    let report = enumerate_short_vectors(&u.lattice(), bound)?;
    let mut min_product = f64::INFINITY;
    let mut witness: Option<&LatticeVector> = None;
    for v in &report.vectors {
        let product = v.diversity as f64 * v.norm_sq;
        if product < threshold {
            return Err(Error::ViolationFound {
                witness: v.point.clone(),
                diversity: v.diversity,
                norm_sq: v.norm_sq,
                threshold: n as f64,
            });
        }
        if product < min_product {
            min_product = product;
            witness = Some(v);
        }
    }
    let witness = witness.ok_or(Error::InvalidBound(bound, "no lattice vectors below bound"))?;
    Ok(LocalDiversityReport {
        min_product,
        witness: witness.clone(),
        vectors_checked: report.vectors.len(),
    })
}
