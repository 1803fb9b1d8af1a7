//! Exact finite lattice computations: generator handling, short-vector
//! enumeration, norms, well-roundedness, and diversity.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Hard cap on the dimension of exhaustive enumeration.
pub const MAX_ENUM_DIM: usize = 12;
/// Generators with |det| at or below this are rejected as singular.
pub const EPS_DET: f64 = 1e-12;
/// Relative slack when collecting vectors attaining the minimal norm.
pub const EPS_MIN_REL: f64 = 1e-9;
/// Components with absolute value above this count towards diversity.
pub const EPS_DIV: f64 = 1e-9;

/// A full-rank lattice `M Z^n` with cached inverse, Gram matrix and volume.
#[derive(Debug, Clone)]
pub struct Lattice {
    n: usize,
    generator: DMatrix<f64>,
    inverse: DMatrix<f64>,
    gram: DMatrix<f64>,
    volume: f64,
}

impl Lattice {
    /// Builds a lattice from a square generator whose columns are the basis.
    pub fn from_generator(generator: DMatrix<f64>) -> Result<Self> {
        if generator.nrows() != generator.ncols() || generator.nrows() == 0 {
            return Err(Error::LengthMismatch(generator.nrows(), generator.ncols()));
        }
        let det = generator.determinant();
        if det.abs() <= EPS_DET {
            return Err(Error::NonInvertibleGenerator(det.abs()));
        }
        let inverse = generator
            .clone()
            .try_inverse()
            .ok_or(Error::NonInvertibleGenerator(det.abs()))?;
        let gram = generator.transpose() * &generator;
        Ok(Self {
            n: generator.nrows(),
            volume: det.abs(),
            generator,
            inverse,
            gram,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// The same lattice scaled by `volume^{-1/n}` so that the result has volume 1.
    pub fn rescaled_to_unit_volume(&self) -> Lattice {
        let scale = self.volume.powf(-1.0 / self.n as f64);
        Lattice::from_generator(&self.generator * scale)
            .expect("rescaling preserves invertibility")
    }

    /// Maps integer coordinates to the ambient point `M w`.
    pub fn map(&self, coords: &[i64]) -> Vec<f64> {
        assert_eq!(coords.len(), self.n);
        let mut point = vec![0.0; self.n];
        for (j, &c) in coords.iter().enumerate() {
            if c != 0 {
                let col = self.generator.column(j);
                for (p, m) in point.iter_mut().zip(col.iter()) {
                    *p += c as f64 * m;
                }
            }
        }
        point
    }
}

/// A lattice vector together with its coordinates, norms and diversity.
#[derive(Debug, Clone)]
pub struct LatticeVector {
    /// Integer coefficients w with respect to the generator columns.
    pub coords: Vec<i64>,
    /// Ambient point t = M w.
    pub point: Vec<f64>,
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    /// Squared Euclidean norm of `point`.
    pub norm_sq: f64,
    /// Number of components of `point` exceeding [`EPS_DIV`] in magnitude.
    pub diversity: usize,
}

impl LatticeVector {
    fn new(coords: Vec<i64>, point: Vec<f64>) -> Self {
        let norm_sq: f64 = point.iter().map(|t| t * t).sum();
        let l1: f64 = point.iter().map(|t| t.abs()).sum();
        let l4: f64 = point.iter().map(|t| t.powi(4)).sum::<f64>().powf(0.25);
        let diversity = diversity(&point, EPS_DIV);
        Self {
            coords,
            point,
            l1,
            l2: norm_sq.sqrt(),
            l4,
            norm_sq,
            diversity,
        }
    }
}

/// Result of a short-vector enumeration, one representative per +-pair.
#[derive(Debug, Clone)]
pub struct ShortVectorReport {
    /// Squared-norm cutoff used for the search.
    pub bound: f64,
    /// All nonzero vectors with squared norm at most `bound`, up to sign,
    /// sorted by squared norm and then by coordinates.
    pub vectors: Vec<LatticeVector>,
    /// Minimum nonzero squared norm found (infinite when `vectors` is empty).
    pub min_norm_sq: f64,
    /// The vectors attaining `min_norm_sq` within [`EPS_MIN_REL`] relative.
    pub minimal_vectors: Vec<LatticeVector>,
}

/// Number of components of `v` with magnitude above `tol`.
pub fn diversity(v: &[f64], tol: f64) -> usize {
    v.iter().filter(|t| t.abs() > tol).count()
}

/// The sign representative produced by the enumeration: the highest-index
/// nonzero coordinate is positive.
pub fn canonical_sign(coords: &[i64]) -> Vec<i64> {
    match coords.iter().rev().find(|c| **c != 0) {
        Some(c) if *c < 0 => coords.iter().map(|c| -c).collect(),
        _ => coords.to_vec(),
    }
}

/// Enumerates every nonzero lattice vector with squared norm at most `bound`,
/// up to global sign.
///
/// Completeness comes from a coefficient box derived from the rows of the
/// generator inverse, tightened by partial-sum pruning on the Cholesky factor
/// of the Gram matrix; both prunes only discard coefficients that provably
/// exceed the bound.
pub fn enumerate_short_vectors(lattice: &Lattice, bound: f64) -> Result<ShortVectorReport> {
    if lattice.n > MAX_ENUM_DIM {
        return Err(Error::DimensionTooLarge(lattice.n));
    }
    if !(bound > 0.0) {
        return Err(Error::InvalidBound(bound, "must be positive"));
    }
    let mut vectors = enumerate_raw(lattice, bound);
    vectors.sort_by(|a, b| {
        a.norm_sq
            .partial_cmp(&b.norm_sq)
            .unwrap()
            .then_with(|| a.coords.cmp(&b.coords))
    });
    let min_norm_sq = vectors
        .first()
        .map(|v| v.norm_sq)
        .unwrap_or(f64::INFINITY);
    let minimal_vectors: Vec<LatticeVector> = vectors
        .iter()
        .take_while(|v| v.norm_sq <= min_norm_sq * (1.0 + EPS_MIN_REL))
        .cloned()
        .collect();
    Ok(ShortVectorReport {
        bound,
        vectors,
        min_norm_sq,
        minimal_vectors,
    })
}

/// Finds the minimal vectors; the returned report has `bound == min_norm_sq`.
pub fn minimal_vectors(lattice: &Lattice) -> Result<ShortVectorReport> {
    // The shortest generator column is an upper bound for the minimal norm,
    // so enumerating below it always contains the minimal vectors.
    let initial = (0..lattice.n)
        .map(|j| lattice.gram[(j, j)])
        .fold(f64::INFINITY, f64::min);
    let scan = enumerate_short_vectors(lattice, initial)?;
    let minimal = scan.minimal_vectors;
    Ok(ShortVectorReport {
        bound: scan.min_norm_sq,
        vectors: minimal.clone(),
        min_norm_sq: scan.min_norm_sq,
        minimal_vectors: minimal,
    })
}

/// True iff the minimal vectors span R^n (rank decided by SVD with a
/// 1e-9 relative singular-value threshold).
pub fn is_well_rounded(lattice: &Lattice) -> Result<bool> {
    let report = minimal_vectors(lattice)?;
    if report.minimal_vectors.len() < lattice.n {
        return Ok(false);
    }
    let m = DMatrix::from_fn(lattice.n, report.minimal_vectors.len(), |i, j| {
        report.minimal_vectors[j].point[i]
    });
    let sv = m.singular_values();
    let max = sv.max();
    let rank = sv.iter().filter(|s| **s > 1e-9 * max).count();
    Ok(rank == lattice.n)
}

/// Minimum L1 norm over nonzero vectors with squared L2 norm within
/// `search_bound`.
///
/// For `search_bound >= n` this is the exact minimal L1 norm of any lattice
/// containing a vector of L1 norm at most sqrt(n), in particular of every
/// unit-volume rotation of Z^n.
pub fn min_l1_norm(lattice: &Lattice, search_bound: f64) -> Result<f64> {
    if search_bound < lattice.n as f64 {
        return Err(Error::InvalidBound(
            search_bound,
            "must be at least the lattice dimension",
        ));
    }
    let report = enumerate_short_vectors(lattice, search_bound)?;
    Ok(report
        .vectors
        .iter()
        .map(|v| v.l1)
        .fold(f64::INFINITY, f64::min))
}

fn enumerate_raw(lattice: &Lattice, bound: f64) -> Vec<LatticeVector> {
    let n = lattice.n;
    let slack = 1e-9 * bound.max(1.0);
    let accept = bound + slack;
    let budget = bound + 2.0 * slack;

    // Box half-widths: |w_i| = |(M^-1 t)_i| <= ||row_i(M^-1)|| * sqrt(bound).
    let half: Vec<i64> = (0..n)
        .map(|i| (budget.sqrt() * lattice.inverse.row(i).norm()).ceil() as i64)
        .collect();

    let upper = nalgebra::Cholesky::new(lattice.gram.clone()).map(|c| c.l().transpose());
    let mut walker = Walker {
        lattice,
        upper,
        budget,
        accept,
        half,
        coords: vec![0; n],
        out: Vec::new(),
    };
    let zero_point = vec![0.0; n];
    walker.descend(n - 1, &zero_point, 0.0, true);
    walker.out
}

struct Walker<'a> {
    lattice: &'a Lattice,
    /// Upper-triangular Cholesky factor of the Gram matrix, when available.
    upper: Option<DMatrix<f64>>,
    budget: f64,
    accept: f64,
    half: Vec<i64>,
    coords: Vec<i64>,
    out: Vec<LatticeVector>,
}

impl Walker<'_> {
    /// Visits all coefficient choices at `level` (levels run n-1 down to 0),
    /// with `point` holding the partial sum over the already-fixed higher
    /// coordinates and `partial` its accumulated quadratic-form mass.
    fn descend(&mut self, level: usize, point: &[f64], partial: f64, higher_zero: bool) {
        let n = self.lattice.n;
        let (mut lo, mut hi) = (-self.half[level], self.half[level]);
        let mut shift = 0.0;
        let mut diag = 0.0;
        if let Some(upper) = &self.upper {
            // Interval from (R_ll v + s)^2 <= budget - partial.
            shift = (level + 1..n)
                .map(|j| upper[(level, j)] * self.coords[j] as f64)
                .sum();
            diag = upper[(level, level)];
            let room = self.budget - partial;
            if room < 0.0 {
                return;
            }
            let radius = room.sqrt();
            lo = lo.max((((-radius) - shift) / diag).ceil() as i64);
            hi = hi.min(((radius - shift) / diag).floor() as i64);
        }
        if higher_zero {
            // One representative per +-pair: highest nonzero coordinate positive.
            lo = lo.max(0);
        }
        let col = self.lattice.generator.column(level);
        let mut child = vec![0.0; n];
        for v in lo..=hi {
            for (c, (p, m)) in child.iter_mut().zip(point.iter().zip(col.iter())) {
                *c = p + v as f64 * m;
            }
            self.coords[level] = v;
            if level == 0 {
                if higher_zero && v == 0 {
                    continue;
                }
                let norm_sq: f64 = child.iter().map(|t| t * t).sum();
                if norm_sq <= self.accept {
                    self.out
                        .push(LatticeVector::new(self.coords.clone(), child.clone()));
                }
            } else {
                let next_partial = if self.upper.is_some() {
                    let term = diag * v as f64 + shift;
                    partial + term * term
                } else {
                    0.0
                };
                self.descend(level - 1, &child, next_partial, higher_zero && v == 0);
            }
        }
        self.coords[level] = 0;
    }
}
