//! Coverage beams that follow a predicted access-point path.

mod layout;
mod synth;
mod trajectory;

pub use layout::{assign, assign_loose, assign_tight, BeamSpec, BeamType};
pub use synth::{
    beam_from_plan, covrage_beam, subbeam_phase, sync_subbeams, synthesize, BeamConfig,
    BeamDescription, BeamOutput, SubbeamRecord,
};
pub use trajectory::{
    classify_trajectory, place_subbeams, sample_trajectory, slope_class, Classification,
    Orientation, SlopeClass, TrajectoryPlan, DEFAULT_SAMPLE_SPACING, INITIAL_PARAM_STEP,
    SPACING_TOLERANCE,
};
