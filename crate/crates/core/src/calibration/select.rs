use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::mask::mask_iou;
use super::raster::{RasterImage, ShapeMask};
use super::warp::{warp_image, warp_mask};
use crate::error::{Result, TpcError};
use crate::shape::{
    common_slots, pairs_for_slots, solve_procrustes, BodyGroup, KeypointSet, ProcrustesTransform,
    MIN_PAIRS,
};

/// Which optional groups ride along with the mandatory torso.
///
/// Encoded as inclusion bits `face = 1`, `arms = 2`, `legs = 4`; the integer
/// order of the bits is the final tie-break between equally good candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSelection(u8);

impl GroupSelection {
    pub const FACE: u8 = 1;
    pub const ARMS: u8 = 2;
    pub const LEGS: u8 = 4;

    pub fn all() -> impl Iterator<Item = GroupSelection> {
        (0..8).map(GroupSelection)
    }

    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits < 8).then_some(GroupSelection(bits))
    }

    pub fn full() -> Self {
        GroupSelection(7)
    }

    pub fn torso_only() -> Self {
        GroupSelection(0)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, group: BodyGroup) -> bool {
        match group {
            BodyGroup::Torso => true,
            BodyGroup::Face => self.0 & Self::FACE != 0,
            BodyGroup::Arms => self.0 & Self::ARMS != 0,
            BodyGroup::Legs => self.0 & Self::LEGS != 0,
        }
    }

    /// Groups in canonical order (face, torso, arms, legs).
    pub fn groups(self) -> Vec<BodyGroup> {
        BodyGroup::ALL
            .into_iter()
            .filter(|&g| self.contains(g))
            .collect()
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut bits = 0;
        let mut torso = false;
        for name in s.split('+') {
            match name {
                "face" => bits |= Self::FACE,
                "arms" => bits |= Self::ARMS,
                "legs" => bits |= Self::LEGS,
                "torso" => torso = true,
                _ => return None,
            }
        }
        torso.then_some(GroupSelection(bits))
    }
}

impl fmt::Display for GroupSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.groups().iter().map(|g| g.name()).collect();
        f.write_str(&names.join("+"))
    }
}

/// A feasible keypoint subset: its groups and the commonly visible slots
/// they contribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetCandidate {
    pub groups: GroupSelection,
    pub slots: Vec<usize>,
}

/// Every feasible candidate for the pair, in bit order.
///
/// A candidate is feasible when each of its groups (torso included) has at
/// least one commonly visible slot and the union has at least three. Groups
/// with nothing visible would only duplicate a smaller candidate.
pub fn enumerate_candidates(reference: &KeypointSet, target: &KeypointSet) -> Vec<SubsetCandidate> {
    let common = common_slots(reference, target);
    GroupSelection::all()
        .filter_map(|groups| {
            let mut slots = Vec::new();
            for group in groups.groups() {
                let before = slots.len();
                slots.extend(common.iter().copied().filter(|s| group.slots().contains(s)));
                if slots.len() == before {
                    return None;
                }
            }
            slots.sort_unstable();
            (slots.len() >= MIN_PAIRS).then_some(SubsetCandidate { groups, slots })
        })
        .collect()
}

/// The reference image calibrated to one target pose.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedFrame {
    /// 1-based position in the pose sequence.
    pub frame_index: usize,
    pub image: RasterImage,
    /// Reference silhouette warped by `transform`.
    pub mask: ShapeMask,
    pub transform: ProcrustesTransform,
    pub chosen_subset: SubsetCandidate,
    pub score: f64,
    pub candidate_scores: BTreeMap<GroupSelection, f64>,
}

/// Ranking key: higher score, then more slots, then lower inclusion bits.
fn beats(score: f64, cand: &SubsetCandidate, best_score: f64, best: &SubsetCandidate) -> bool {
    if score != best_score {
        return score > best_score;
    }
    if cand.slots.len() != best.slots.len() {
        return cand.slots.len() > best.slots.len();
    }
    cand.groups < best.groups
}

/// Calibrates the reference to one target pose by trying every feasible
/// group subset and keeping the one whose warped silhouette overlaps the
/// target silhouette best.
///
/// The output canvas takes the target mask's dimensions. The returned image
/// is the plain warp; screening happens in [`calibrate_sequence`].
pub fn select_subset(
    ref_kps: &KeypointSet,
    tgt_kps: &KeypointSet,
    ref_img: &RasterImage,
    ref_mask: &ShapeMask,
    tgt_mask: &ShapeMask,
) -> Result<CalibratedFrame> {
    if ref_mask.dims() != ref_img.dims() {
        return Err(TpcError::DimensionMismatch(format!(
            "reference mask {:?} vs reference image {:?}",
            ref_mask.dims(),
            ref_img.dims()
        )));
    }
    let (width, height) = tgt_mask.dims();

    let mut candidate_scores = BTreeMap::new();
    let mut best: Option<(f64, SubsetCandidate, ProcrustesTransform, ShapeMask)> = None;
    for cand in enumerate_candidates(ref_kps, tgt_kps) {
        let pairs = pairs_for_slots(ref_kps, tgt_kps, &cand.slots)?;
        let transform = match solve_procrustes(&pairs) {
            Ok(t) => t,
            Err(TpcError::DegenerateShape(_)) => continue,
            Err(e) => return Err(e),
        };
        let warped = warp_mask(ref_mask, &transform, width, height);
        let score = mask_iou(&warped, tgt_mask)?;
        candidate_scores.insert(cand.groups, score);
        let better = match &best {
            None => true,
            Some((bs, bc, _, _)) => beats(score, &cand, *bs, bc),
        };
        if better {
            best = Some((score, cand, transform, warped));
        }
    }

    let (score, chosen_subset, transform, mask) = best.ok_or(TpcError::NoFeasibleCandidate)?;
    Ok(CalibratedFrame {
        frame_index: 1,
        image: warp_image(ref_img, &transform, width, height),
        mask,
        transform,
        chosen_subset,
        score,
        candidate_scores,
    })
}

/// One target pose with its silhouette.
#[derive(Debug, Clone)]
pub struct PoseFrame {
    pub keypoints: KeypointSet,
    pub mask: ShapeMask,
}

/// Calibrates the reference against every pose independently.
///
/// Output images are RGBA with everything outside the warped reference
/// silhouette cleared. Frames are processed in parallel on the current rayon
/// pool; the first failing frame (in sequence order) aborts the run.
pub fn calibrate_sequence(
    ref_img: &RasterImage,
    ref_kps: &KeypointSet,
    ref_mask: &ShapeMask,
    poses: &[PoseFrame],
) -> Result<Vec<CalibratedFrame>> {
    let rgba = ref_img.to_rgba();
    let results: Vec<Result<CalibratedFrame>> = poses
        .par_iter()
        .enumerate()
        .map(|(i, pose)| {
            let index = i + 1;
            let mut frame = select_subset(ref_kps, &pose.keypoints, &rgba, ref_mask, &pose.mask)
                .map_err(|e| e.in_frame(index))?;
            frame.frame_index = index;
            frame
                .image
                .screen(&frame.mask)
                .map_err(|e| e.in_frame(index))?;
            Ok(frame)
        })
        .collect();
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{Point2, NUM_KEYPOINTS};

    fn kps() -> KeypointSet {
        let pts: [Point2; NUM_KEYPOINTS] =
            std::array::from_fn(|i| Point2::new(10.0 + 3.0 * i as f64, 5.0 + (i * i % 11) as f64));
        KeypointSet::fully_visible(pts).unwrap()
    }

    #[test]
    fn eight_candidates_when_fully_visible() {
        let c = enumerate_candidates(&kps(), &kps());
        assert_eq!(c.len(), 8);
        assert_eq!(c[7].slots, (0..17).collect::<Vec<_>>());
        assert_eq!(c[0].slots, vec![5, 6, 7, 8]);
    }

    #[test]
    fn invisible_groups_are_not_candidates() {
        let tgt = kps().with_hidden((0..5).chain(9..17));
        let c = enumerate_candidates(&kps(), &tgt);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].groups, GroupSelection::torso_only());
    }

    #[test]
    fn missing_torso_means_no_candidate() {
        let tgt = kps().with_hidden(5..9);
        assert!(enumerate_candidates(&kps(), &tgt).is_empty());
    }

    #[test]
    fn group_selection_names() {
        assert_eq!(GroupSelection::full().to_string(), "face+torso+arms+legs");
        assert_eq!(GroupSelection::torso_only().to_string(), "torso");
        for g in GroupSelection::all() {
            assert_eq!(GroupSelection::parse(&g.to_string()), Some(g));
        }
        assert_eq!(GroupSelection::parse("face+arms"), None);
    }

    #[test]
    fn tie_break_prefers_more_slots_then_lower_bits() {
        let a = SubsetCandidate {
            groups: GroupSelection(1),
            slots: vec![0, 1, 2, 5],
        };
        let b = SubsetCandidate {
            groups: GroupSelection(2),
            slots: vec![5, 6, 9, 10],
        };
        let big = SubsetCandidate {
            groups: GroupSelection(3),
            slots: vec![0, 1, 5, 6, 9],
        };
        assert!(beats(0.5, &big, 0.5, &a));
        assert!(beats(0.5, &a, 0.5, &b));
        assert!(!beats(0.5, &b, 0.5, &a));
        assert!(beats(0.6, &b, 0.5, &big));
    }
}
