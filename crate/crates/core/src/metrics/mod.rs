//! Beam quality metrics, random trajectory endpoints, smoothing and
//! head-motion statistics.

pub mod gainmap;
pub mod motion;
pub mod path;
pub mod sampling;
pub mod savgol;
pub mod stats;

pub use gainmap::{cell_center, gain_map, isotropic_map, GainMap, DEFAULT_RESOLUTION};
pub use motion::{read_trace, sliding_motion_stats, MotionStats, TraceSample};
pub use path::{
    default_delta_grid, gain_concentration, gain_variation, point_segment_distance,
    shift_trajectory, trajectory_gain_profile, DistanceField, NormalSide, ProfilePoint,
    PROFILE_STEP,
};
pub use sampling::{random_axis, random_rotation, sample_endpoints, truncated_rotation_angle};
pub use savgol::savgol_smooth;
pub use stats::{percentile_nearest_rank, Aggregate, BinAccumulator, MetricSeries};
