//! Rician fading and Gaussian noise: sampling, exact density and moment
//! evaluation, channel application, and VNR bookkeeping.
//!
//! Fading is normalized so that `E[h^2] = 1` for every Rician factor K. The
//! normalization is inferred from the AWGN limit, where the fade becomes
//! deterministically one; the density below integrates to satisfy it exactly.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{bessel_i0_scaled, integrate};
use crate::{Error, Result};

/// Channel configuration: Rician factor, per-dimension noise variance, and
/// block dimension.
#[derive(Debug, Clone, Copy)]
pub struct ChannelParams {
    pub k: f64,
    pub sigma2: f64,
    pub n: usize,
}

impl ChannelParams {
    pub fn new(k: f64, sigma2: f64, n: usize) -> Result<Self> {
        if !(k >= 0.0) {
            return Err(Error::NegativeK(k));
        }
        if !(sigma2 > 0.0) {
            return Err(Error::NonpositiveVariance(sigma2));
        }
        Ok(Self { k, sigma2, n })
    }
}

/// One realization of the per-coordinate fading gains, all positive.
#[derive(Debug, Clone)]
pub struct FadeRealization(Vec<f64>);

impl FadeRealization {
    pub fn new(gains: Vec<f64>) -> Self {
        Self(gains)
    }

    pub fn gains(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Draws `count` i.i.d. Rician fades with `E[h^2] = 1`.
///
/// Each draw is the magnitude of a Gaussian pair around the line-of-sight
/// mean: `h = sqrt((m + s g1)^2 + (s g2)^2)` with `m^2 = K/(1+K)` and
/// `s^2 = 1/(2(1+K))`. Agreement with [`rician_pdf`] is gate-checked by the
/// Kolmogorov-Smirnov tests rather than assumed.
pub fn rician_sample<R: Rng>(k: f64, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !(k >= 0.0) {
        return Err(Error::NegativeK(k));
    }
    let mean = (k / (1.0 + k)).sqrt();
    let spread = (0.5 / (1.0 + k)).sqrt();
    Ok((0..count)
        .map(|_| {
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            let a = mean + spread * g1;
            let b = spread * g2;
            (a * a + b * b).sqrt()
        })
        .collect())
}

/// Convenience wrapper drawing a block fade of dimension `n`.
pub fn sample_fade<R: Rng>(k: f64, n: usize, rng: &mut R) -> Result<FadeRealization> {
    Ok(FadeRealization::new(rician_sample(k, n, rng)?))
}

/// Rician density `rho(h) = 2h(1+K) e^{-K - h^2(1+K)} I0(2h sqrt(K^2+K))`.
///
/// Evaluated through the scaled Bessel function with the exponent folded to
/// `-(sqrt(K) - h sqrt(1+K))^2`, which cannot overflow for any K.
pub fn rician_pdf(h: f64, k: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::NegativeK(k));
    }
    if !(h >= 0.0) {
        return Err(Error::NegativeInput(h));
    }
    Ok(pdf_unchecked(h, k))
}

fn pdf_unchecked(h: f64, k: f64) -> f64 {
    let arg = 2.0 * h * (k * k + k).sqrt();
    let centered = k.sqrt() - h * (1.0 + k).sqrt();
    2.0 * h * (1.0 + k) * (-centered * centered).exp() * bessel_i0_scaled(arg)
}

/// Upper integration limit: the density mass beyond it is far below any
/// tolerance used here (the folded exponent is -256 at the cut).
fn integration_limit(k: f64) -> f64 {
    (k.sqrt() + 16.0) / (1.0 + k).sqrt()
}

/// Self-check utility: `int_0^inf h^power rho(h) dh` by adaptive quadrature.
pub fn density_moment(k: f64, power: u32, tol: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::NegativeK(k));
    }
    let limit = integration_limit(k);
    Ok(integrate(
        |h| h.powi(power as i32) * pdf_unchecked(h, k),
        0.0,
        limit,
        tol,
    ))
}

/// Mean and variance of `h^2`: `(1, (1+2K)/(1+K)^2)`.
///
/// The closed form is validated against [`density_moment`] in the test suite
/// before anything relies on it.
pub fn moments_h2(k: f64) -> Result<(f64, f64)> {
    if !(k >= 0.0) {
        return Err(Error::NegativeK(k));
    }
    let var = (1.0 + 2.0 * k) / ((1.0 + k) * (1.0 + k));
    Ok((1.0, var))
}

/// Draws `count` i.i.d. `N(0, sigma2)` noise samples.
pub fn gaussian_noise<R: Rng>(sigma2: f64, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !(sigma2 > 0.0) {
        return Err(Error::NonpositiveVariance(sigma2));
    }
    let sigma = sigma2.sqrt();
    Ok((0..count)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

/// The channel equation `y_i = h_i x_i + v_i`.
pub fn apply_channel(x: &[f64], h: &FadeRealization, v: &[f64]) -> Result<Vec<f64>> {
    if x.len() != h.len() {
        return Err(Error::LengthMismatch(x.len(), h.len()));
    }
    if x.len() != v.len() {
        return Err(Error::LengthMismatch(x.len(), v.len()));
    }
    Ok(x.iter()
        .zip(h.gains())
        .zip(v)
        .map(|((xi, hi), vi)| hi * xi + vi)
        .collect())
}

/// Noise variance for a target volume-to-noise ratio in dB:
/// `sigma^2 = Vol^{2/n} / (8 * 10^{vnr_db/10})`.
pub fn vnr_to_sigma2(vnr_db: f64, volume: f64, n: usize) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::NonpositiveVolume(volume));
    }
    let vnr = 10.0_f64.powf(vnr_db / 10.0);
    Ok(volume.powf(2.0 / n as f64) / (8.0 * vnr))
}

/// Tabulated CDF of the Rician fade, built by cumulative Simpson quadrature
/// of [`rician_pdf`] on a uniform grid.
#[derive(Debug, Clone)]
pub struct RicianCdf {
    step: f64,
    values: Vec<f64>,
}

impl RicianCdf {
    /// Builds a grid with `cells` panels over the effective support.
    pub fn build(k: f64, cells: usize) -> Result<Self> {
        if !(k >= 0.0) {
            return Err(Error::NegativeK(k));
        }
        let limit = integration_limit(k);
        let step = limit / cells as f64;
        let mut values = Vec::with_capacity(cells + 1);
        values.push(0.0);
        let mut acc = 0.0;
        let mut left = pdf_unchecked(0.0, k);
        for i in 0..cells {
            let a = i as f64 * step;
            let mid = pdf_unchecked(a + 0.5 * step, k);
            let right = pdf_unchecked(a + step, k);
            acc += step / 6.0 * (left + 4.0 * mid + right);
            values.push(acc);
            left = right;
        }
        // Normalize away the residual quadrature bias (~1e-10).
        let total = *values.last().unwrap();
        for v in &mut values {
            *v /= total;
        }
        Ok(Self { step, values })
    }

    /// CDF value by linear interpolation, clamped to [0, 1].
    pub fn eval(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        let pos = h / self.step;
        let idx = pos.floor() as usize;
        if idx + 1 >= self.values.len() {
            return 1.0;
        }
        let frac = pos - idx as f64;
        self.values[idx] * (1.0 - frac) + self.values[idx + 1] * frac
    }
}

/// Two-sided Kolmogorov-Smirnov statistic between samples and a CDF.
/// Sorts the sample slice in place.
pub fn ks_statistic(samples: &mut [f64], cdf: &RicianCdf) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, s) in samples.iter().enumerate() {
        let f = cdf.eval(*s);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        worst = worst.max(above).max(below);
    }
    worst
}
