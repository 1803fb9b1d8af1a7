//! Hadamard matrices, rotation matrices, builtin lattices, and the rotation
//! file format.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::lattice::Lattice;
use crate::{Error, Result};

/// Largest supported Hadamard order.
pub const MAX_HADAMARD_ORDER: usize = 4096;
/// Maximum entry of |R^T R - I| tolerated for a rotation matrix.
pub const EPS_ORTH: f64 = 1e-9;

/// A +-1 matrix with pairwise orthogonal columns (`W^T W = n I`, exactly).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    entries: DMatrix<i64>,
}

impl HadamardMatrix {
    /// Validates and wraps an integer matrix.
    pub fn new(entries: DMatrix<i64>) -> Result<Self> {
        if !is_hadamard(&entries) {
            return Err(Error::NotOrthogonal(f64::NAN));
        }
        Ok(Self { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<i64> {
        &self.entries
    }

    /// Row `i` as integer coordinates.
    pub fn row(&self, i: usize) -> Vec<i64> {
        self.entries.row(i).iter().copied().collect()
    }
}

/// Order 2^k Hadamard matrix from the inductive Kronecker construction.
pub fn sylvester(k: u32) -> Result<HadamardMatrix> {
    let order = 1usize
        .checked_shl(k)
        .filter(|o| *o <= MAX_HADAMARD_ORDER)
        .ok_or(Error::OrderTooLarge(usize::MAX))?;
    let mut w = DMatrix::from_element(1, 1, 1i64);
    while w.nrows() < order {
        let m = w.nrows();
        let mut next = DMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                let e = w[(i, j)];
                next[(i, j)] = e;
                next[(i, j + m)] = e;
                next[(i + m, j)] = e;
                next[(i + m, j + m)] = -e;
            }
        }
        w = next;
    }
    Ok(HadamardMatrix { entries: w })
}

/// Kronecker product of two Hadamard matrices; the result is again Hadamard.
pub fn kronecker(a: &HadamardMatrix, b: &HadamardMatrix) -> Result<HadamardMatrix> {
    let order = a.order() * b.order();
    if order > MAX_HADAMARD_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    HadamardMatrix::new(a.entries.kronecker(&b.entries))
}

/// True iff all entries are +-1 and the columns are orthogonal.
pub fn is_hadamard(m: &DMatrix<i64>) -> bool {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return false;
    }
    if m.iter().any(|e| e.abs() != 1) {
        return false;
    }
    for a in 0..n {
        for b in a + 1..n {
            let dot: i64 = (0..n).map(|i| m[(i, a)] * m[(i, b)]).sum();
            if dot != 0 {
                return false;
            }
        }
    }
    true
}

/// A square matrix with orthonormal columns. Reflections are accepted;
/// only `R^T R = I` is required.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    entries: DMatrix<f64>,
}

impl RotationMatrix {
    /// Validates orthogonality to within [`EPS_ORTH`].
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let dev = orthogonality_deviation(&entries);
        if !(dev <= EPS_ORTH) {
            return Err(Error::NotOrthogonal(dev));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// The unit-volume lattice `R Z^n`.
    pub fn lattice(&self) -> Lattice {
        Lattice::from_generator(self.entries.clone())
            .expect("orthogonal matrices are invertible")
    }
}

/// Largest entry of |R^T R - I|; NaN for non-square input.
pub fn orthogonality_deviation(m: &DMatrix<f64>) -> f64 {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return f64::NAN;
    }
    let gram = m.transpose() * m;
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev
}

/// The Hadamard rotation `W / sqrt(n)`.
pub fn to_rotation(w: &HadamardMatrix) -> RotationMatrix {
    let n = w.order() as f64;
    let entries = w.entries.map(|e| e as f64 / n.sqrt());
    RotationMatrix { entries }
}

/// Parses a rotation matrix file.
///
/// Format: first data line holds the dimension `n`, followed by `n` lines of
/// `n` whitespace-separated decimals. Lines starting with `#` and blank lines
/// are skipped.
pub fn load_rotation(path: &Path) -> Result<RotationMatrix> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::ParseError("empty file".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::ParseError(format!("line {line_no}: expected dimension, got `{header}`")))?;
    if n == 0 {
        return Err(Error::ParseError("dimension must be positive".into()));
    }
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::ParseError(format!("expected {n} matrix rows")))?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::ParseError(format!("line {line_no}: bad number `{tok}`"))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::ParseError(format!(
                "line {line_no}: expected {n} entries, got {}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::ParseError(format!(
            "line {line_no}: unexpected content after matrix"
        )));
    }
    RotationMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Writes a rotation in the file format read by [`load_rotation`],
/// 12 decimal places per entry.
pub fn save_rotation(rotation: &RotationMatrix, path: &Path) -> Result<()> {
    let n = rotation.dim();
    let mut text = format!("{n}\n");
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                text.push(' ');
            }
            let _ = write!(text, "{:.12}", rotation.entries[(i, j)]);
        }
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Builtin lattices: `identity`, `hadamard` (Sylvester, power-of-two
/// dimension) and `bcc` (dimension 3, volume 4, the paper-scale integer
/// generators; see [`Lattice::rescaled_to_unit_volume`] for the unit-volume
/// variant).
pub fn builtin_lattice(name: &str, n: usize) -> Result<Lattice> {
    match name {
        "identity" => {
            if n == 0 {
                return Err(Error::UnsupportedDimension {
                    name: name.into(),
                    dim: n,
                });
            }
            Lattice::from_generator(DMatrix::identity(n, n))
        }
        "hadamard" => {
            if !n.is_power_of_two() || n > MAX_HADAMARD_ORDER {
                return Err(Error::UnsupportedDimension {
                    name: name.into(),
                    dim: n,
                });
            }
            let w = sylvester(n.trailing_zeros())?;
            Ok(to_rotation(&w).lattice())
        }
        "bcc" => {
            if n != 3 {
                return Err(Error::UnsupportedDimension {
                    name: name.into(),
                    dim: n,
                });
            }
            let m = nalgebra::dmatrix![
                1.0, 1.0, -1.0;
                1.0, -1.0, -1.0;
                1.0, -1.0, 1.0
            ];
            Lattice::from_generator(m)
        }
        other => Err(Error::UnknownName(other.into())),
    }
}

/// Haar-distributed random rotation via QR of a Gaussian matrix.
pub fn random_rotation<R: Rng>(n: usize, rng: &mut R) -> RotationMatrix {
    assert!(n > 0);
    let gauss = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gauss.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Fix the sign ambiguity of QR so the distribution is Haar.
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    RotationMatrix::new(q).expect("QR produces an orthogonal factor")
}
