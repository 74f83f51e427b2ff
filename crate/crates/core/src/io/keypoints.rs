//! Normalized keypoint document.
//!
//! ```text
//! tpc-keypoints 1
//! width 256
//! height 256
//! source openpose-coco17
//! frames 2
//! frame 1
//! 0 1.28000000e2 7.40000000e1 1.00000000e0
//! ...                      (17 slot lines: slot x y confidence)
//! frame 2
//! ...
//! ```
//!
//! Numbers are single precision written with 9 significant digits, which is
//! enough for every value to read back bit-identical. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::text::{fmt_f32, Lines};
use crate::error::{Result, TpcError};
use crate::shape::{KeypointSet, Point2, NUM_KEYPOINTS};

pub const KEYPOINT_FORMAT: &str = "tpc-keypoints";
pub const KEYPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeypointRecord {
    pub x: f32,
    pub y: f32,
    pub confidence: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeypointDocument {
    pub width: u32,
    pub height: u32,
    pub source: String,
    pub frames: Vec<[KeypointRecord; NUM_KEYPOINTS]>,
}

impl KeypointDocument {
    /// Visible slots get confidence 1, hidden ones 0.
    pub fn from_sets(sets: &[KeypointSet], width: u32, height: u32, source: &str) -> Self {
        let frames = sets
            .iter()
            .map(|kps| {
                std::array::from_fn(|i| {
                    let p = kps.point(i);
                    KeypointRecord {
                        x: p.x as f32,
                        y: p.y as f32,
                        confidence: if kps.is_visible(i) { 1.0 } else { 0.0 },
                    }
                })
            })
            .collect();
        Self {
            width,
            height,
            source: source.to_owned(),
            frames,
        }
    }

    /// A slot is visible when its confidence reaches `threshold`.
    pub fn to_sets(&self, threshold: f64) -> Result<Vec<KeypointSet>> {
        self.frames
            .iter()
            .enumerate()
            .map(|(i, records)| {
                let points = records.map(|r| Point2::new(r.x as f64, r.y as f64));
                let visible = records.map(|r| r.confidence as f64 >= threshold);
                KeypointSet::new(points, visible).map_err(|e| e.in_frame(i + 1))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{KEYPOINT_FORMAT} {KEYPOINT_VERSION}");
        let _ = writeln!(out, "width {}", self.width);
        let _ = writeln!(out, "height {}", self.height);
        let _ = writeln!(out, "source {}", self.source);
        let _ = writeln!(out, "frames {}", self.frames.len());
        for (i, frame) in self.frames.iter().enumerate() {
            let _ = writeln!(out, "frame {}", i + 1);
            for (slot, r) in frame.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{slot} {} {} {}",
                    fmt_f32(r.x),
                    fmt_f32(r.y),
                    fmt_f32(r.confidence)
                );
            }
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = Lines::new(text, path);
        lines.expect_header(KEYPOINT_FORMAT, KEYPOINT_VERSION)?;
        let width = lines.keyed("width")?;
        let height = lines.keyed("height")?;
        let source = lines.keyed_str("source")?;
        let count: usize = lines.keyed("frames")?;

        let mut frames = Vec::with_capacity(count);
        let mut current: Option<(usize, Vec<KeypointRecord>)> = None;
        let schema = |frame: usize, message: String| TpcError::Schema {
            path: path.to_path_buf(),
            frame,
            message,
        };
        let finish = |frame: usize, records: Vec<KeypointRecord>| {
            <[KeypointRecord; NUM_KEYPOINTS]>::try_from(records).map_err(|r| {
                schema(
                    frame,
                    format!("expected {NUM_KEYPOINTS} keypoints, found {}", r.len()),
                )
            })
        };

        while let Some((line_no, fields)) = lines.next_fields() {
            if fields[0] == "frame" {
                let index: usize = lines.field(line_no, &fields, 1)?;
                if let Some((prev, records)) = current.take() {
                    frames.push(finish(prev, records)?);
                }
                if index != frames.len() + 1 {
                    return Err(lines.error(
                        line_no,
                        format!(
                            "frame {index} out of sequence, expected {}",
                            frames.len() + 1
                        ),
                    ));
                }
                current = Some((index, Vec::with_capacity(NUM_KEYPOINTS)));
                continue;
            }
            let Some((frame, records)) = current.as_mut() else {
                return Err(lines.error(line_no, "keypoint line before any frame".into()));
            };
            if fields.len() != 4 {
                return Err(lines.error(line_no, "expected `slot x y confidence`".into()));
            }
            let slot: usize = lines.field(line_no, &fields, 0)?;
            if slot != records.len() {
                return Err(schema(
                    *frame,
                    format!("slot {slot} where slot {} was expected", records.len()),
                ));
            }
            let x: f32 = lines.field(line_no, &fields, 1)?;
            let y: f32 = lines.field(line_no, &fields, 2)?;
            let confidence: f32 = lines.field(line_no, &fields, 3)?;
            if !(0.0..=1.0).contains(&confidence) {
                return Err(lines.error(line_no, format!("confidence {confidence} outside [0, 1]")));
            }
            records.push(KeypointRecord { x, y, confidence });
        }
        if let Some((prev, records)) = current.take() {
            frames.push(finish(prev, records)?);
        }
        if frames.len() != count {
            return Err(lines.error(
                lines.last_line(),
                format!("header declares {count} frames, found {}", frames.len()),
            ));
        }
        Ok(Self {
            width,
            height,
            source,
            frames,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| TpcError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| TpcError::io(path, e))
    }
}

/// Reads a keypoint document and applies the visibility threshold.
pub fn load_keypoints(path: &Path, threshold: f64) -> Result<Vec<KeypointSet>> {
    KeypointDocument::load(path)?.to_sets(threshold)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn doc(frames: usize) -> KeypointDocument {
        let frame = std::array::from_fn(|i| KeypointRecord {
            x: 10.0 + i as f32 * 1.5,
            y: 20.25 - i as f32,
            confidence: 1.0,
        });
        KeypointDocument {
            width: 64,
            height: 48,
            source: "test".into(),
            frames: vec![frame; frames],
        }
    }

    fn parse(text: &str) -> Result<KeypointDocument> {
        KeypointDocument::parse(text, Path::new("mem.kp"))
    }

    #[test]
    fn one_fully_visible_frame() {
        let sets = parse(&doc(1).to_text()).unwrap().to_sets(0.3).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].visible_count(), NUM_KEYPOINTS);
        assert_eq!(sets[0].point(3), Point2::new(14.5, 17.25));
    }

    #[test]
    fn low_confidence_arms_are_hidden() {
        let mut d = doc(1);
        for slot in 9..13 {
            d.frames[0][slot].confidence = 0.0;
        }
        let sets = parse(&d.to_text()).unwrap().to_sets(0.3).unwrap();
        assert!((9..13).all(|s| !sets[0].is_visible(s)));
        assert_eq!(sets[0].visible_count(), 13);
    }

    #[test]
    fn short_frame_is_a_schema_error() {
        let text = doc(2).to_text();
        // drop the last slot line of frame 2
        let trimmed: Vec<&str> = text.lines().collect();
        let text = trimmed[..trimmed.len() - 1].join("\n");
        match parse(&text) {
            Err(TpcError::Schema { frame, .. }) => assert_eq!(frame, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = doc(1).to_text().replacen("1.00000000e0", "abc", 1);
        match parse(&text) {
            Err(TpcError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        assert!(parse("tpc-keypoints 2\n").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn rejects_out_of_range_confidence() {
        let text = doc(1).to_text().replacen("1.00000000e0", "1.5", 1);
        assert!(matches!(parse(&text), Err(TpcError::Parse { .. })));
    }

    #[test]
    fn frames_must_be_contiguous() {
        let text = doc(2).to_text().replace("frame 2", "frame 3");
        assert!(matches!(parse(&text), Err(TpcError::Parse { .. })));
    }

    // NaN payloads are not preserved through text
    fn not_nan() -> impl Strategy<Value = f32> {
        any::<f32>().prop_filter("nan", |v| !v.is_nan())
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            values in prop::collection::vec((not_nan(), not_nan(), 0.0f32..=1.0), NUM_KEYPOINTS),
            frames in 1usize..4,
        ) {
            let frame: [KeypointRecord; NUM_KEYPOINTS] = std::array::from_fn(|i| KeypointRecord {
                x: values[i].0,
                y: values[i].1,
                confidence: values[i].2,
            });
            let d = KeypointDocument { width: 1, height: 1, source: "p".into(), frames: vec![frame; frames] };
            let back = parse(&d.to_text()).unwrap();
            prop_assert_eq!(back.frames.len(), frames);
            for (a, b) in d.frames.iter().flatten().zip(back.frames.iter().flatten()) {
                prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
                prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
                prop_assert_eq!(a.confidence.to_bits(), b.confidence.to_bits());
            }
        }
    }
}
