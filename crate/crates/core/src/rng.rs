//! Deterministic substreams for reproducible parallel Monte Carlo.
//!
//! One 64-bit master seed governs a whole experiment. Each independent random
//! use (a trial, a fade draw, a random rotation) gets its own [`Substream`],
//! derived only from `(seed, stream, index)`. Results therefore never depend
//! on thread count or execution order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A self-contained RNG handle for one unit of randomized work.
pub type Substream = ChaCha8Rng;

/// Namespaces separating the random uses of a single master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamId {
    /// Decode trials inside an error-rate sweep.
    SweepTrial,
    /// Fade draws for non-well-roundedness estimation.
    NonWrTrial,
    /// Fade draws for the Monte Carlo PEP bound.
    PepTrial,
    /// Fade draws for audits and soundness checks.
    FadeAudit,
    /// Haar-random rotation sampling.
    RotationSample,
}

impl StreamId {
    fn tag(self) -> u64 {
        match self {
            StreamId::SweepTrial => 1,
            StreamId::NonWrTrial => 2,
            StreamId::PepTrial => 3,
            StreamId::FadeAudit => 4,
            StreamId::RotationSample => 5,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Substream `index` of the `(seed, stream)` family.
///
/// The ChaCha key is expanded from `(seed, stream)`; `index` selects the
/// cipher stream, so substreams of one family never overlap.
pub fn substream(seed: u64, stream: StreamId, index: u64) -> Substream {
    SubstreamFamily::new(seed, stream).substream(index)
}

/// All substreams of one `(seed, stream)` pair, addressable by index.
///
/// Cheap to copy into parallel workers; each worker derives its own
/// substream from its trial index.
#[derive(Debug, Clone, Copy)]
pub struct SubstreamFamily {
    key: [u8; 32],
}

impl SubstreamFamily {
    pub fn new(seed: u64, stream: StreamId) -> Self {
        let mut state = seed ^ stream.tag().wrapping_mul(0xA24B_AED4_963E_E407);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self { key }
    }

    pub fn substream(&self, index: u64) -> Substream {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}
