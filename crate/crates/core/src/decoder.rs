//! Constellation carving and exact maximum-likelihood decoding over the
//! faded constellation.

use rand::Rng;

use crate::channel::{apply_channel, gaussian_noise, sample_fade, ChannelParams, FadeRealization};
use crate::lattice::Lattice;
use crate::{Error, Result};

/// Memory guard: constellations are fully enumerated.
pub const MAX_POINTS: u128 = 1 << 20;

/// A finite code `S = M (S'' - (q-1)/2)` carved from a lattice, where `S''`
/// is the integer hypercube `{0, .., q-1}^n` in row-major label order.
#[derive(Debug, Clone)]
pub struct Constellation {
    lattice: Lattice,
    q: u32,
    labels: Vec<Vec<i64>>,
    points: Vec<Vec<f64>>,
}

impl Constellation {
    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Uncentered integer label of point `index`.
    pub fn label(&self, index: usize) -> &[i64] {
        &self.labels[index]
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.points[index]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

/// Enumerates the full constellation in row-major label order.
pub fn build_constellation(lattice: &Lattice, q: u32) -> Result<Constellation> {
    if q < 2 {
        return Err(Error::InvalidQ(q));
    }
    let n = lattice.dim();
    let total = (q as u128).pow(n as u32);
    if total > MAX_POINTS {
        return Err(Error::TooManyPoints(total));
    }
    let total = total as usize;
    let offset = (q as f64 - 1.0) / 2.0;
    let generator = lattice.generator();
    let mut labels = Vec::with_capacity(total);
    let mut points = Vec::with_capacity(total);
    let mut label = vec![0i64; n];
    for index in 0..total {
        let mut rem = index;
        for axis in (0..n).rev() {
            label[axis] = (rem % q as usize) as i64;
            rem /= q as usize;
        }
        let mut point = vec![0.0; n];
        for (axis, &digit) in label.iter().enumerate() {
            let coeff = digit as f64 - offset;
            let col = generator.column(axis);
            for (p, m) in point.iter_mut().zip(col.iter()) {
                *p += coeff * m;
            }
        }
        labels.push(label.clone());
        points.push(point);
    }
    Ok(Constellation {
        lattice: lattice.clone(),
        q,
        labels,
        points,
    })
}

/// Outcome of a decode: the winning point and its achieved distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeResult {
    pub index: usize,
    pub distance_sq: f64,
}

/// Exact ML decoding: exhaustive minimum of `|y - diag(h) t|^2` over all
/// constellation points. Ties break to the lowest index. The partial-sum
/// early exit cannot change the argmin.
pub fn ml_decode(y: &[f64], h: &FadeRealization, c: &Constellation) -> Result<DecodeResult> {
    let n = c.dim();
    if y.len() != n {
        return Err(Error::LengthMismatch(y.len(), n));
    }
    if h.len() != n {
        return Err(Error::LengthMismatch(h.len(), n));
    }
    let gains = h.gains();
    let mut best = DecodeResult {
        index: 0,
        distance_sq: f64::INFINITY,
    };
    for (index, point) in c.points.iter().enumerate() {
        let mut dist = 0.0;
        for i in 0..n {
            let d = y[i] - gains[i] * point[i];
            dist += d * d;
            if dist >= best.distance_sq {
                break;
            }
        }
        if dist < best.distance_sq {
            best = DecodeResult {
                index,
                distance_sq: dist,
            };
        }
    }
    Ok(best)
}

/// Runs one Monte Carlo decode trial and reports whether it was correct.
///
/// Draw order is fixed as (message, fade, noise) so a trial is a pure
/// function of its substream.
pub fn run_trial<R: Rng>(c: &Constellation, params: &ChannelParams, rng: &mut R) -> Result<bool> {
    let n = c.dim();
    if params.n != n {
        return Err(Error::LengthMismatch(params.n, n));
    }
    let sent = rng.random_range(0..c.len());
    let h = sample_fade(params.k, n, rng)?;
    let v = gaussian_noise(params.sigma2, n, rng)?;
    let y = apply_channel(c.point(sent), &h, &v)?;
    let decoded = ml_decode(&y, &h, c)?;
    Ok(decoded.index == sent)
}
