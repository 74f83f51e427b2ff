use crate::error::{Result, TpcError};

/// Contiguous frame groups: `M - 1` groups of `floor(L / M)` frames and a
/// last group that absorbs the remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPartition {
    frames: usize,
    /// 1-based inclusive frame ranges.
    bounds: Vec<(usize, usize)>,
}

pub fn group_partition(frames: usize, groups: usize) -> Result<GroupPartition> {
    if groups < 1 || groups > frames {
        return Err(TpcError::InvalidGroupCount { frames, groups });
    }
    let size = frames / groups;
    let bounds = (0..groups)
        .map(|i| {
            let start = i * size + 1;
            let end = if i + 1 == groups {
                frames
            } else {
                start + size - 1
            };
            (start, end)
        })
        .collect();
    Ok(GroupPartition { frames, bounds })
}

impl GroupPartition {
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn bounds(&self) -> &[(usize, usize)] {
        &self.bounds
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.bounds.iter().map(|(s, e)| e - s + 1)
    }

    /// 0-based frame indices of group `g`.
    pub fn members(&self, g: usize) -> std::ops::Range<usize> {
        let (s, e) = self.bounds[g];
        s - 1..e
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn default_sized_sequence() {
        let p = group_partition(120, 30).unwrap();
        assert_eq!(p.len(), 30);
        assert!(p.sizes().all(|s| s == 4));
    }

    #[test]
    fn singletons() {
        let p = group_partition(5, 5).unwrap();
        assert_eq!(p.bounds(), &[(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]);
    }

    #[test]
    fn remainder_goes_to_last_group() {
        let p = group_partition(7, 3).unwrap();
        assert_eq!(p.bounds(), &[(1, 2), (3, 4), (5, 7)]);
    }

    #[test]
    fn invalid_counts() {
        assert!(matches!(
            group_partition(4, 5),
            Err(TpcError::InvalidGroupCount {
                frames: 4,
                groups: 5
            })
        ));
        assert!(group_partition(4, 0).is_err());
    }

    proptest! {
        #[test]
        fn covers_all_frames(frames in 1usize..300, g in 1usize..300) {
            prop_assume!(g <= frames);
            let p = group_partition(frames, g).unwrap();
            prop_assert_eq!(p.len(), g);
            prop_assert_eq!(p.bounds()[0].0, 1);
            prop_assert_eq!(p.bounds()[g - 1].1, frames);
            for w in p.bounds().windows(2) {
                prop_assert_eq!(w[0].1 + 1, w[1].0);
            }
            let m = frames / g;
            let sizes: Vec<_> = p.sizes().collect();
            prop_assert!(sizes[..g - 1].iter().all(|&s| s == m));
            prop_assert_eq!(sizes[g - 1], frames - m * (g - 1));
        }
    }
}
