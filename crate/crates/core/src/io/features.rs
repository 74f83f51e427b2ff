//! Feature sequence document: a `tpc-features 1` header, the three
//! dimensions, then for every frame a `frame i` line followed by one line of
//! `dim` values per patch. Values use the shortest round-tripping decimal.

use std::fmt::Write as _;
use std::path::Path;

use super::text::{fmt_f64, Lines};
use crate::error::{Result, TpcError};
use crate::propagation::FeatureSequence;

pub const FEATURES_FORMAT: &str = "tpc-features";
pub const FEATURES_VERSION: u32 = 1;

pub fn features_to_text(features: &FeatureSequence) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FEATURES_FORMAT} {FEATURES_VERSION}");
    let _ = writeln!(out, "frames {}", features.frames());
    let _ = writeln!(out, "patches {}", features.patches());
    let _ = writeln!(out, "dim {}", features.dim());
    for i in 0..features.frames() {
        let _ = writeln!(out, "frame {}", i + 1);
        for row in features.frame(i).chunks(features.dim()) {
            let values: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            let _ = writeln!(out, "{}", values.join(" "));
        }
    }
    out
}

pub fn parse_features(text: &str, path: &Path) -> Result<FeatureSequence> {
    let mut lines = Lines::new(text, path);
    lines.expect_header(FEATURES_FORMAT, FEATURES_VERSION)?;
    let frames: usize = lines.keyed("frames")?;
    let patches: usize = lines.keyed("patches")?;
    let dim: usize = lines.keyed("dim")?;
    let mut data = Vec::with_capacity(frames * patches * dim);
    for i in 1..=frames {
        let index: usize = lines.keyed("frame")?;
        if index != i {
            return Err(lines.error(lines.last_line(), format!("expected frame {i}")));
        }
        for _ in 0..patches {
            let (line, fields) = lines.next_fields().ok_or_else(|| {
                lines.error(lines.last_line() + 1, "unexpected end of file".into())
            })?;
            if fields.len() != dim {
                return Err(
                    lines.error(line, format!("expected {dim} values, got {}", fields.len()))
                );
            }
            for j in 0..dim {
                data.push(lines.field::<f64>(line, &fields, j)?);
            }
        }
    }
    if let Some((line, _)) = lines.next_fields() {
        return Err(lines.error(line, "trailing content".into()));
    }
    FeatureSequence::new(frames, patches, dim, data)
}

pub fn save_features(features: &FeatureSequence, path: &Path) -> Result<()> {
    std::fs::write(path, features_to_text(features)).map_err(|e| TpcError::io(path, e))
}

pub fn load_features(path: &Path) -> Result<FeatureSequence> {
    let text = std::fs::read_to_string(path).map_err(|e| TpcError::io(path, e))?;
    parse_features(&text, path)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #[test]
        fn round_trip(frames in 1usize..5, patches in 1usize..5, dim in 1usize..4, seed in prop::collection::vec(-1e6..1e6f64, 64)) {
            let data: Vec<f64> = (0..frames * patches * dim).map(|i| seed[i % 64] / (i + 1) as f64).collect();
            let f = FeatureSequence::new(frames, patches, dim, data).unwrap();
            let back = parse_features(&features_to_text(&f), Path::new("f")).unwrap();
            prop_assert_eq!(back, f);
        }
    }

    #[test]
    fn wrong_row_width() {
        let f = FeatureSequence::new(1, 1, 2, vec![1.0, 2.0]).unwrap();
        let text = features_to_text(&f).replace("1e0 2e0", "1e0");
        assert!(matches!(
            parse_features(&text, Path::new("f")),
            Err(TpcError::Parse { .. })
        ));
    }
}
