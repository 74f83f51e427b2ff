use std::fmt;

use crate::error::{Result, TpcError};

/// Number of canonical keypoint slots.
pub const NUM_KEYPOINTS: usize = 17;

pub const NOSE: usize = 0;
pub const LEFT_HIP: usize = 7;
pub const RIGHT_HIP: usize = 8;

/// Human-readable names of the canonical slots, in slot order.
pub const SLOT_NAMES: [&str; NUM_KEYPOINTS] = [
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_hip",
    "right_hip",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

/// Anatomical keypoint groups. Together they partition the 17 slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BodyGroup {
    Face,
    Torso,
    Arms,
    Legs,
}

impl BodyGroup {
    pub const ALL: [BodyGroup; 4] = [
        BodyGroup::Face,
        BodyGroup::Torso,
        BodyGroup::Arms,
        BodyGroup::Legs,
    ];

    pub fn slots(self) -> std::ops::Range<usize> {
        match self {
            BodyGroup::Face => 0..5,
            BodyGroup::Torso => 5..9,
            BodyGroup::Arms => 9..13,
            BodyGroup::Legs => 13..17,
        }
    }

    pub fn of_slot(slot: usize) -> Option<BodyGroup> {
        BodyGroup::ALL
            .into_iter()
            .find(|g| g.slots().contains(&slot))
    }

    pub fn name(self) -> &'static str {
        match self {
            BodyGroup::Face => "face",
            BodyGroup::Torso => "torso",
            BodyGroup::Arms => "arms",
            BodyGroup::Legs => "legs",
        }
    }
}

impl fmt::Display for BodyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// 17 canonical body and face keypoints with per-slot visibility.
///
/// Coordinates of invisible slots are carried along but never used; they may
/// hold anything, including non-finite placeholders from an extractor.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointSet {
    points: [Point2; NUM_KEYPOINTS],
    visible: [bool; NUM_KEYPOINTS],
}

impl KeypointSet {
    pub fn new(points: [Point2; NUM_KEYPOINTS], visible: [bool; NUM_KEYPOINTS]) -> Result<Self> {
        if let Some(slot) = (0..NUM_KEYPOINTS).find(|&i| visible[i] && !points[i].is_finite()) {
            return Err(TpcError::InvalidInput(format!(
                "visible keypoint {} ({}) is not finite",
                slot, SLOT_NAMES[slot]
            )));
        }
        Ok(Self { points, visible })
    }

    pub fn fully_visible(points: [Point2; NUM_KEYPOINTS]) -> Result<Self> {
        Self::new(points, [true; NUM_KEYPOINTS])
    }

    pub fn points(&self) -> &[Point2; NUM_KEYPOINTS] {
        &self.points
    }

    pub fn visibility(&self) -> &[bool; NUM_KEYPOINTS] {
        &self.visible
    }

    pub fn point(&self, slot: usize) -> Point2 {
        self.points[slot]
    }

    pub fn is_visible(&self, slot: usize) -> bool {
        self.visible[slot]
    }

    pub fn visible_count(&self) -> usize {
        self.visible.iter().filter(|&&v| v).count()
    }

    pub fn visible_points(&self) -> impl Iterator<Item = Point2> + '_ {
        (0..NUM_KEYPOINTS)
            .filter(|&i| self.visible[i])
            .map(|i| self.points[i])
    }

    /// Copy with the given slots hidden.
    pub fn with_hidden(&self, slots: impl IntoIterator<Item = usize>) -> Self {
        let mut out = self.clone();
        for slot in slots {
            out.visible[slot] = false;
        }
        out
    }

    /// Copy with every point (visible or not) passed through `f`.
    pub fn map_points(&self, mut f: impl FnMut(Point2) -> Point2) -> Result<Self> {
        let mut points = self.points;
        for p in points.iter_mut() {
            *p = f(*p);
        }
        Self::new(points, self.visible)
    }

    /// Hip midpoint, if both hips are visible.
    pub fn pelvis(&self) -> Option<Point2> {
        (self.visible[LEFT_HIP] && self.visible[RIGHT_HIP])
            .then(|| self.points[LEFT_HIP].midpoint(self.points[RIGHT_HIP]))
    }

    /// Axis-aligned bounding box `(min, max)` of the visible points.
    pub fn bounding_box(&self) -> Option<(Point2, Point2)> {
        let mut it = self.visible_points();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| {
            (
                Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }
}
