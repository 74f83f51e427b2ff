//! Test-time Procrustes calibration of a reference human image against a
//! sequence of target poses.
//!
//! The crate aligns the reference to every pose with a similarity transform
//! chosen over anatomical keypoint subsets ([`calibration`]), propagates the
//! encoded calibrated frames across denoising steps ([`propagation`]), and
//! reports scale/rotation misalignment ([`diagnostics`]). [`io`] and
//! [`pipeline`] provide the file formats and the end-to-end run used by the
//! `tpc` binary.

pub mod calibration;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod propagation;
pub mod shape;
pub mod synth;

pub use error::{ErrorClass, Result, TpcError};
