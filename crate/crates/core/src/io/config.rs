use std::fmt;
use std::str::FromStr;

use crate::error::{Result, TpcError};
use crate::propagation::AttentionScaling;

/// Where silhouettes come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskSource {
    /// Mask files when present, keypoint hull otherwise.
    #[default]
    File,
    /// Always the keypoint hull.
    Hull,
}

impl fmt::Display for MaskSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaskSource::File => "file",
            MaskSource::Hull => "hull",
        })
    }
}

impl FromStr for MaskSource {
    type Err = TpcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "file" => Ok(MaskSource::File),
            "hull" => Ok(MaskSource::Hull),
            other => Err(TpcError::InvalidConfig(format!(
                "mask source must be `file` or `hull`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Keypoints with confidence at or above this are visible.
    pub visibility_threshold: f64,
    pub groups_m: usize,
    pub denoise_t: usize,
    pub seed: u64,
    pub attention_scaling: AttentionScaling,
    pub mask_source: MaskSource,
    /// Side of the toy encoder's patch grid.
    pub patch_grid: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            visibility_threshold: 0.3,
            groups_m: 30,
            denoise_t: 25,
            seed: 0,
            attention_scaling: AttentionScaling::Dim,
            mask_source: MaskSource::File,
            patch_grid: 8,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.visibility_threshold) {
            return Err(TpcError::InvalidConfig(format!(
                "visibility threshold {} outside [0, 1]",
                self.visibility_threshold
            )));
        }
        if self.groups_m < 1 {
            return Err(TpcError::InvalidConfig(
                "group count must be at least 1".into(),
            ));
        }
        if self.denoise_t < 1 {
            return Err(TpcError::InvalidConfig(
                "denoising steps must be at least 1".into(),
            ));
        }
        if self.patch_grid < 1 {
            return Err(TpcError::InvalidConfig(
                "patch grid must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = PipelineConfig::default();
        c.validate().unwrap();
        assert_eq!(c.groups_m, 30);
        assert_eq!(c.visibility_threshold, 0.3);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            PipelineConfig {
                visibility_threshold: 1.5,
                ..Default::default()
            },
            PipelineConfig {
                groups_m: 0,
                ..Default::default()
            },
            PipelineConfig {
                denoise_t: 0,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(TpcError::InvalidConfig(_))));
        }
    }

    #[test]
    fn mask_source_names() {
        assert_eq!("hull".parse::<MaskSource>().unwrap(), MaskSource::Hull);
        assert!("sam".parse::<MaskSource>().is_err());
    }
}
