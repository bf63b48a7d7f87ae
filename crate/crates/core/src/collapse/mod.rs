//! Control-parameter trajectories: analytic collapse and crossing points,
//! parallel scans with branch tracking, and numerical collapse detection.

mod analytic;
mod detect;
mod scan;

pub use analytic::{
    collapse_points, crossing_points, hyperbola_levels, verify_crossing, Branch, CollapsePoint, Crossing,
    CrossingCheck,
};
pub use detect::{
    detect_collapses, dispersion, fold_pattern, locate_pole_crossings, verify_collapse, Candidate,
    CandidateKind, CollapseCheck, DetectOptions,
};
pub use scan::{scan_trajectory, Line, SampleData, ScanSample, ScanTable, TrajectorySpec, SINGULAR_MARGIN};
