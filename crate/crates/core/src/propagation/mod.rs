//! Temporal propagation of calibrated features and the conditioning
//! contracts of the host cross-attention.

mod attention;
mod encoder;
mod features;
mod partition;
mod propagate;

pub use attention::{assemble_condition, attention_weights, cross_attention, AttentionScaling};
pub use encoder::{encode_sequence, toy_patch_encode};
pub use features::FeatureSequence;
pub use partition::{group_partition, GroupPartition};
pub use propagate::{propagate_step, replay, run_propagation, PickSampler, PropagationSchedule};
