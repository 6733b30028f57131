//! Keyed random substreams.
//!
//! Every random decision draws from its own ChaCha stream whose key is a hash
//! of `(master_seed, segment, frame, purpose, extra)`, so results never depend
//! on the order or thread in which frames are produced.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// What a substream is used for. The discriminant is part of the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    SwarmPath,
    SwarmOffsets,
    DroneCount,
    DroneModels,
    Camera,
    Environment,
    Distractors,
    Birds,
    Background,
    AugmentSubset,
    AugmentParams,
    Noise,
    DetectionJitter,
}

impl Purpose {
    fn tag(self) -> u8 {
        self as u8
    }
}

/// Key of one substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamKey {
    pub master_seed: u64,
    pub segment: u64,
    pub frame: u64,
    pub purpose: Purpose,
    pub extra: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, segment: u64, frame: u64, purpose: Purpose) -> Self {
        Self {
            master_seed,
            segment,
            frame,
            purpose,
            extra: 0,
        }
    }

    pub fn with_extra(mut self, extra: u64) -> Self {
        self.extra = extra;
        self
    }

    pub fn seed_bytes(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"sdrforge.stream.v1");
        h.update(self.master_seed.to_le_bytes());
        h.update(self.segment.to_le_bytes());
        h.update(self.frame.to_le_bytes());
        h.update([self.purpose.tag()]);
        h.update(self.extra.to_le_bytes());
        h.finalize().into()
    }

    /// First 8 key bytes as an integer, for audit traces.
    pub fn fingerprint(&self) -> u64 {
        let b = self.seed_bytes();
        u64::from_le_bytes(b[..8].try_into().expect("8 bytes"))
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::from_seed(self.seed_bytes())
    }
}

/// Plain seeded generator for self-contained procedures.
pub fn seeded(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}
