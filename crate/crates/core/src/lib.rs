//! Two-radar FMCW target localization.
//!
//! Two single-channel FMCW radars sit on the x axis, `d` meters apart. Each
//! radar's beat signal is turned into a range profile, thresholded with
//! cell-averaging CFAR and pruned to one range per target. Ranges from the
//! two radars are intersected pairwise to give 2D candidate points, and a
//! constant-velocity Kalman tracker with global-nearest-neighbor association
//! and M-of-N track confirmation keeps the real targets while dropping
//! ghost intersections.
//!
//! The processing chain, in order:
//!
//! | stage        | module           | output                |
//! |--------------|------------------|-----------------------|
//! | simulate     | [`radar`]        | [`radar::Frame`]      |
//! | range FFT    | [`range`]        | [`range::RangeProfile`] |
//! | detect       | [`detection`]    | [`detection::Detection`] |
//! | localize     | [`localization`] | [`localization::CandidatePoint`] |
//! | track        | [`tracking`]     | [`tracking::TrackSnapshot`] |
//!
//! [`pipeline`] strings the stages together and [`io`] defines the text
//! files exchanged between them.

pub mod config;
pub mod detection;
pub mod error;
pub mod io;
pub mod localization;
pub mod pipeline;
pub mod radar;
pub mod range;
pub mod selftest;
pub mod svg;
pub mod tracking;

pub use config::{load_config, PipelineConfig};
pub use detection::{ca_cfar, detect, prune, CfarParams, Detection};
pub use error::{Error, Result};
pub use localization::{bilaterate, pair_detections, CandidatePoint, Infeasible};
pub use radar::{synthesize_frame, Frame, GeometryConfig, RadarConfig, RadarId, Target};
pub use range::{range_profile, RangeProfile, WindowKind};
pub use tracking::{Track, TrackSnapshot, TrackStatus, Tracker, TrackerParams};
