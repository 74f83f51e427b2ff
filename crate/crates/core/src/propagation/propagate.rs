//! Group-wise feature propagation across denoising steps.
//!
//! Picks come from ChaCha8 (`rand_chacha`): the generator is seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and switched to stream
//! `(t << 32) | group`, where `t` is the denoising step (counting down from
//! `T` to 1) and `group` the 0-based group index. One draw of
//! `random_range(1..=size)` on that stream is the in-group offset. Every
//! pick therefore depends only on `(seed, t, group, size)`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::FeatureSequence;
use super::partition::{group_partition, GroupPartition};
use crate::error::{Result, TpcError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PickSampler {
    seed: u64,
}

impl PickSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// 1-based offset for one group at one step.
    pub fn pick(&self, step: u64, group: usize, size: usize) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((step << 32) | group as u64);
        rng.random_range(1..=size)
    }

    /// Offsets for every group of the partition at step `t`.
    pub fn picks(&self, partition: &GroupPartition, step: u64) -> Vec<usize> {
        partition
            .sizes()
            .enumerate()
            .map(|(g, size)| self.pick(step, g, size))
            .collect()
    }
}

/// Replaces every frame of each group with the group's picked frame.
///
/// `picks[g]` is the 1-based offset within group `g`. Sources are always
/// read from `features`, never from a previous step's output.
pub fn propagate_step(
    features: &FeatureSequence,
    partition: &GroupPartition,
    picks: &[usize],
) -> Result<FeatureSequence> {
    if partition.frames() != features.frames() {
        return Err(TpcError::DimensionMismatch(format!(
            "partition covers {} frames, features have {}",
            partition.frames(),
            features.frames()
        )));
    }
    if picks.len() != partition.len() {
        return Err(TpcError::DimensionMismatch(format!(
            "{} picks for {} groups",
            picks.len(),
            partition.len()
        )));
    }
    let mut out = features.clone();
    for (g, &pick) in picks.iter().enumerate() {
        let members = partition.members(g);
        if pick < 1 || pick > members.len() {
            return Err(TpcError::InvalidInput(format!(
                "pick {pick} outside group {} of size {}",
                g + 1,
                members.len()
            )));
        }
        let source = features.frame(members.start + pick - 1);
        for i in members {
            out.frame_mut(i).copy_from_slice(source);
        }
    }
    Ok(out)
}

/// Every pick made during a propagation run, in execution order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationSchedule {
    pub frames: usize,
    pub groups: usize,
    pub steps: usize,
    pub seed: u64,
    /// `picks[k]` holds the per-group offsets of denoising step `steps - k`.
    pub picks: Vec<Vec<usize>>,
}

impl PropagationSchedule {
    pub fn partition(&self) -> Result<GroupPartition> {
        group_partition(self.frames, self.groups)
    }

    /// Denoising step label of execution row `k`.
    pub fn step_label(&self, k: usize) -> usize {
        self.steps - k
    }

    pub fn validate(&self) -> Result<()> {
        let partition = self.partition()?;
        if self.steps < 1 || self.picks.len() != self.steps {
            return Err(TpcError::InvalidInput(format!(
                "schedule declares {} steps but has {} rows",
                self.steps,
                self.picks.len()
            )));
        }
        for (k, row) in self.picks.iter().enumerate() {
            if row.len() != partition.len() {
                return Err(TpcError::InvalidInput(format!(
                    "step {} has {} picks for {} groups",
                    self.step_label(k),
                    row.len(),
                    partition.len()
                )));
            }
            for (&pick, size) in row.iter().zip(partition.sizes()) {
                if pick < 1 || pick > size {
                    return Err(TpcError::InvalidInput(format!(
                        "step {}: pick {pick} outside a group of size {size}",
                        self.step_label(k)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Runs `steps` denoising steps (t = steps down to 1), each an independent
/// propagation of the original features with fresh picks.
pub fn run_propagation(
    features: &FeatureSequence,
    groups: usize,
    steps: usize,
    seed: u64,
) -> Result<(Vec<FeatureSequence>, PropagationSchedule)> {
    if steps < 1 {
        return Err(TpcError::InvalidConfig(
            "denoising steps must be at least 1".into(),
        ));
    }
    let partition = group_partition(features.frames(), groups)?;
    let sampler = PickSampler::new(seed);
    let picks: Vec<Vec<usize>> = (1..=steps as u64)
        .rev()
        .map(|t| sampler.picks(&partition, t))
        .collect();
    let schedule = PropagationSchedule {
        frames: features.frames(),
        groups,
        steps,
        seed,
        picks,
    };
    let outputs = replay(features, &schedule)?;
    Ok((outputs, schedule))
}

/// Re-applies a recorded schedule.
pub fn replay(
    features: &FeatureSequence,
    schedule: &PropagationSchedule,
) -> Result<Vec<FeatureSequence>> {
    schedule.validate()?;
    let partition = schedule.partition()?;
    schedule
        .picks
        .iter()
        .map(|row| propagate_step(features, &partition, row))
        .collect()
}
