//! Coverage beams for rotating millimeter-wave receivers.
//!
//! A headset that rotates sees its access point sweep a path across the
//! array's field of view. This crate predicts that path in UV space, splits a
//! planar array into interleaved sub-arrays, steers one sub-beam per
//! sub-array along the path and phase-aligns them into a single wide beam.
//! The `metrics` and `harness` modules evaluate such beams over random
//! trajectories.

pub mod array;
pub mod beam;
pub mod channel;
pub mod error;
pub mod metrics;
pub mod rotation;
pub mod harness;

pub use error::{Error, Result};
