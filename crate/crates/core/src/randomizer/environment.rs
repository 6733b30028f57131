use std::path::Path;
use std::sync::Arc;

use rand::Rng;

use super::swarm::SEGMENT_FRAME;
use super::RandomizerError;
use crate::rng::{Purpose, StreamKey};
use crate::scene::{load_hdri, HdriEnvironment};

/// Height of procedural `builtin:sky-<n>` maps.
pub const BUILTIN_SKY_HEIGHT: u32 = 256;

/// Loaded environment maps, in configuration order.
#[derive(Debug, Clone, Default)]
pub struct EnvironmentLibrary {
    entries: Vec<Arc<HdriEnvironment>>,
}

impl EnvironmentLibrary {
    pub fn new(entries: Vec<HdriEnvironment>) -> Self {
        Self {
            entries: entries.into_iter().map(Arc::new).collect(),
        }
    }

    /// Resolves each entry: `builtin:sky-<n>` is generated, anything else is a
    /// path resolved against `base_dir`.
    pub fn load(specs: &[String], base_dir: &Path) -> Result<Self, RandomizerError> {
        let entries = specs
            .iter()
            .map(|s| {
                if let Some(n) = s.strip_prefix("builtin:sky-") {
                    let seed: u64 = n
                        .parse()
                        .map_err(|_| RandomizerError::BadEnvironment(s.clone()))?;
                    Ok(HdriEnvironment::procedural_sky(seed, BUILTIN_SKY_HEIGHT))
                } else {
                    let p = base_dir.join(s);
                    load_hdri(&p).map_err(RandomizerError::from)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&HdriEnvironment> {
        self.entries.get(i).map(|a| a.as_ref())
    }
}

/// The environment of a segment: library index and yaw.
#[derive(Debug, Clone)]
pub struct EnvironmentChoice {
    pub index: usize,
    pub environment: HdriEnvironment,
}

/// Uniform choice over the library plus a uniform yaw in `[0, 2π)`, fixed for
/// the whole segment.
pub fn select_environment(
    master_seed: u64,
    segment_index: u64,
    library: &EnvironmentLibrary,
) -> Result<EnvironmentChoice, RandomizerError> {
    if library.is_empty() {
        return Err(RandomizerError::EmptyLibrary);
    }
    let mut rng = StreamKey::new(master_seed, segment_index, SEGMENT_FRAME, Purpose::Environment).rng();
    let index = rng.random_range(0..library.len());
    let yaw = rng.random_range(0.0..std::f64::consts::TAU);
    Ok(EnvironmentChoice {
        index,
        environment: library.entries[index].with_yaw(yaw),
    })
}
