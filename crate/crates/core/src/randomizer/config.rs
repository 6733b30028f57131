use std::fmt;

use serde::{Deserialize, Serialize};

/// Dataset style. Drones only and drones with birds keep realistic context;
/// the other three add deliberately unrealistic content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    DronesOnly,
    DronesBirds,
    GenericDistractors,
    RealisticDistractors,
    RandomBackgrounds,
}

impl Style {
    pub const ALL: [Style; 5] = [
        Style::DronesOnly,
        Style::DronesBirds,
        Style::GenericDistractors,
        Style::RealisticDistractors,
        Style::RandomBackgrounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Style::DronesOnly => "drones_only",
            Style::DronesBirds => "drones_birds",
            Style::GenericDistractors => "generic_distractors",
            Style::RealisticDistractors => "realistic_distractors",
            Style::RandomBackgrounds => "random_backgrounds",
        }
    }

    pub fn uses_hdri(self) -> bool {
        self != Style::RandomBackgrounds
    }

    pub fn has_birds(self) -> bool {
        self == Style::DronesBirds
    }

    pub fn has_distractors(self) -> bool {
        matches!(self, Style::GenericDistractors | Style::RealisticDistractors)
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_focal_range() -> [f64; 2] {
    [15.0, 300.0]
}
fn default_segment_length() -> usize {
    300
}
fn default_width() -> u32 {
    640
}
fn default_height() -> u32 {
    480
}
fn default_drones() -> [usize; 2] {
    [1, 5]
}

/// Parameters of one synthetic dataset. Parsed strictly: unknown keys are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    pub style: Style,
    /// Half-extent of the camera sampling cube around the swarm, meters.
    pub camera_bound: f64,
    /// Focal length range in millimeters, sampled uniformly.
    #[serde(default = "default_focal_range")]
    pub focal_range: [f64; 2],
    pub dataset_size: usize,
    #[serde(default = "default_segment_length")]
    pub segment_length: usize,
    /// Falls back to the command line or `SDRFORGE_SEED` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default = "default_width")]
    pub image_width: u32,
    #[serde(default = "default_height")]
    pub image_height: u32,
    /// Inclusive drone count range per segment.
    #[serde(default = "default_drones")]
    pub drones_per_scene: [usize; 2],
    /// Equirectangular maps: file paths (relative to the config file) or
    /// `builtin:sky-<n>` for a procedural sky.
    #[serde(default)]
    pub hdri_library: Vec<String>,
}

/// Configuration problem, located by its JSON key path.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl GenerationConfig {
    /// Default drones-only configuration at bound `b` meters.
    pub fn drones_only(camera_bound: f64, dataset_size: usize) -> Self {
        Self {
            style: Style::DronesOnly,
            camera_bound,
            focal_range: default_focal_range(),
            dataset_size,
            segment_length: default_segment_length(),
            master_seed: None,
            image_width: default_width(),
            image_height: default_height(),
            drones_per_scene: default_drones(),
            hdri_library: (0..4).map(|i| format!("builtin:sky-{i}")).collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let path = if path == "." { "$".to_string() } else { path };
            ConfigError::new(path, format!("{inner}"))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.camera_bound > 0.0 && self.camera_bound.is_finite()) {
            return Err(ConfigError::new("camera_bound", "must be a finite value > 0"));
        }
        let [lo, hi] = self.focal_range;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(ConfigError::new("focal_range", "must satisfy 0 < min < max"));
        }
        if self.dataset_size < 1 {
            return Err(ConfigError::new("dataset_size", "must be >= 1"));
        }
        if self.segment_length < 1 {
            return Err(ConfigError::new("segment_length", "must be >= 1"));
        }
        if self.image_width < 1 || self.image_height < 1 {
            return Err(ConfigError::new("image_width", "image dimensions must be >= 1"));
        }
        let [dmin, dmax] = self.drones_per_scene;
        if dmin < 1 || dmin > dmax {
            return Err(ConfigError::new("drones_per_scene", "must satisfy 1 <= min <= max"));
        }
        // Instance ids are stored in 16-bit buffers.
        if dmax > 1000 {
            return Err(ConfigError::new("drones_per_scene", "max must be <= 1000"));
        }
        if self.style.uses_hdri() && self.hdri_library.is_empty() {
            return Err(ConfigError::new("hdri_library", format!("style {} needs at least one environment", self.style)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"style":"drones_only","camera_bound":40,"dataset_size":10,"hdri_library":["builtin:sky-0"]}"#;

    #[test]
    fn defaults_fill_in() {
        let c = GenerationConfig::from_json_str(MINIMAL).unwrap();
        assert_eq!(c.segment_length, 300);
        assert_eq!(c.focal_range, [15.0, 300.0]);
        assert_eq!((c.image_width, c.image_height), (640, 480));
        assert_eq!(c.master_seed, None);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = r#"{"style":"drones_only","camera_bound":40,"dataset_size":10,"hdri_library":["x"],"bogus_key":1}"#;
        let e = GenerationConfig::from_json_str(text).unwrap_err();
        assert!(e.message.contains("bogus_key"), "{e}");
    }

    #[test]
    fn invalid_values_name_their_key() {
        let e = GenerationConfig::from_json_str(&MINIMAL.replace("40", "-1")).unwrap_err();
        assert_eq!(e.path, "camera_bound");
        let e = GenerationConfig::from_json_str(
            r#"{"style":"drones_only","camera_bound":40,"dataset_size":10,"hdri_library":["x"],"focal_range":[300,15]}"#,
        )
        .unwrap_err();
        assert_eq!(e.path, "focal_range");
        let e = GenerationConfig::from_json_str(r#"{"style":"drones_only","camera_bound":40,"dataset_size":10}"#).unwrap_err();
        assert_eq!(e.path, "hdri_library");
    }

    #[test]
    fn type_errors_carry_path() {
        let e = GenerationConfig::from_json_str(
            r#"{"style":"drones_only","camera_bound":40,"dataset_size":10,"drones_per_scene":[1,"x"]}"#,
        )
        .unwrap_err();
        assert_eq!(e.path, "drones_per_scene[1]");
    }

    #[test]
    fn random_backgrounds_need_no_library() {
        let c = GenerationConfig::from_json_str(r#"{"style":"random_backgrounds","camera_bound":40,"dataset_size":1}"#);
        assert!(c.is_ok());
    }

    #[test]
    fn json_round_trip() {
        let mut c = GenerationConfig::drones_only(80.0, 50);
        c.master_seed = Some(u64::MAX);
        assert_eq!(GenerationConfig::from_json_str(&c.to_json_pretty()).unwrap(), c);
    }
}
