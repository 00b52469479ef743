//! Multi-target tracking over bilateration candidates.
//!
//! Each frame runs predict, GNN association, update and M-of-N lifecycle
//! management. Candidates that never accumulate `confirm_m` hits within
//! `confirm_n` frames (typically ghosts) never reach confirmed status.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};
use crate::localization::CandidatePoint;

pub mod assignment;
pub mod kalman;

pub use assignment::{gnn_associate, solve_gated, Association};
pub use kalman::{kf_predict, kf_update, mahalanobis_sq};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerParams {
    process_noise_intensity: f64,
    measurement_noise_std_x_m: f64,
    measurement_noise_std_y_m: f64,
    gate_threshold: f64,
    confirm_m: usize,
    confirm_n: usize,
    delete_misses: usize,
    initial_velocity_std_m_s: f64,
}

impl TrackerParams {
    pub const DEFAULT_PROCESS_NOISE_INTENSITY: f64 = 1.0;
    pub const DEFAULT_MEASUREMENT_NOISE_STD_M: f64 = 0.05;
    /// 99% point of the chi-square distribution with 2 degrees of freedom.
    pub const DEFAULT_GATE_THRESHOLD: f64 = 9.21;
    pub const DEFAULT_CONFIRM_M: usize = 3;
    pub const DEFAULT_CONFIRM_N: usize = 5;
    pub const DEFAULT_DELETE_MISSES: usize = 5;
    pub const DEFAULT_INITIAL_VELOCITY_STD_M_S: f64 = 2.0;

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        process_noise_intensity: f64,
        measurement_noise_std_x_m: f64,
        measurement_noise_std_y_m: f64,
        gate_threshold: f64,
        confirm_m: usize,
        confirm_n: usize,
        delete_misses: usize,
        initial_velocity_std_m_s: f64,
    ) -> Result<Self> {
        let positive = |v: f64, key: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(key, "must be > 0"))
            }
        };
        positive(process_noise_intensity, "tracker.process_noise_intensity")?;
        positive(measurement_noise_std_x_m, "tracker.measurement_noise_std_x_m")?;
        positive(measurement_noise_std_y_m, "tracker.measurement_noise_std_y_m")?;
        if gate_threshold.is_nan() || gate_threshold <= 0.0 {
            return Err(Error::invalid("tracker.gate_threshold", "must be > 0"));
        }
        positive(initial_velocity_std_m_s, "tracker.initial_velocity_std_m_s")?;
        if confirm_m < 1 {
            return Err(Error::invalid("tracker.confirm_m", "must be >= 1"));
        }
        if confirm_n < confirm_m {
            return Err(Error::invalid("tracker.confirm_n", "must be >= tracker.confirm_m"));
        }
        if delete_misses < 1 {
            return Err(Error::invalid("tracker.delete_misses", "must be >= 1"));
        }
        Ok(Self {
            process_noise_intensity,
            measurement_noise_std_x_m,
            measurement_noise_std_y_m,
            gate_threshold,
            confirm_m,
            confirm_n,
            delete_misses,
            initial_velocity_std_m_s,
        })
    }

    pub fn process_noise_intensity(&self) -> f64 {
        self.process_noise_intensity
    }

    pub fn measurement_noise_std_x_m(&self) -> f64 {
        self.measurement_noise_std_x_m
    }

    pub fn measurement_noise_std_y_m(&self) -> f64 {
        self.measurement_noise_std_y_m
    }

    pub fn gate_threshold(&self) -> f64 {
        self.gate_threshold
    }

    pub fn confirm_m(&self) -> usize {
        self.confirm_m
    }

    pub fn confirm_n(&self) -> usize {
        self.confirm_n
    }

    pub fn delete_misses(&self) -> usize {
        self.delete_misses
    }

    pub fn initial_velocity_std_m_s(&self) -> f64 {
        self.initial_velocity_std_m_s
    }
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            process_noise_intensity: Self::DEFAULT_PROCESS_NOISE_INTENSITY,
            measurement_noise_std_x_m: Self::DEFAULT_MEASUREMENT_NOISE_STD_M,
            measurement_noise_std_y_m: Self::DEFAULT_MEASUREMENT_NOISE_STD_M,
            gate_threshold: Self::DEFAULT_GATE_THRESHOLD,
            confirm_m: Self::DEFAULT_CONFIRM_M,
            confirm_n: Self::DEFAULT_CONFIRM_N,
            delete_misses: Self::DEFAULT_DELETE_MISSES,
            initial_velocity_std_m_s: Self::DEFAULT_INITIAL_VELOCITY_STD_M_S,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Dead,
}

impl fmt::Display for TrackStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrackStatus::Tentative => "tentative",
            TrackStatus::Confirmed => "confirmed",
            TrackStatus::Dead => "dead",
        })
    }
}

impl FromStr for TrackStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "tentative" => Ok(TrackStatus::Tentative),
            "confirmed" => Ok(TrackStatus::Confirmed),
            "dead" => Ok(TrackStatus::Dead),
            other => Err(format!("unknown track status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub track_id: u64,
    /// `(x, y, vx, vy)` in meters and meters per second.
    pub state: Vector4<f64>,
    pub covariance: Matrix4<f64>,
    pub status: TrackStatus,
    /// Most recent association outcomes, newest last, at most `confirm_n` long.
    pub hit_history: VecDeque<bool>,
    pub consecutive_misses: usize,
}

impl Track {
    pub fn new(
        track_id: u64,
        state: Vector4<f64>,
        covariance: Matrix4<f64>,
        status: TrackStatus,
    ) -> Self {
        Self {
            track_id,
            state,
            covariance,
            status,
            hit_history: VecDeque::new(),
            consecutive_misses: 0,
        }
    }

    /// A tentative track at a measurement, at rest, with the birth counted as a hit.
    pub fn spawn(track_id: u64, z: &CandidatePoint, params: &TrackerParams) -> Self {
        let mut t = Self::new(
            track_id,
            Vector4::new(z.x_m, z.y_m, 0.0, 0.0),
            kalman::initial_covariance(params),
            TrackStatus::Tentative,
        );
        t.hit_history.push_back(true);
        t
    }

    pub fn position(&self) -> (f64, f64) {
        (self.state[0], self.state[1])
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.state[2], self.state[3])
    }

    pub fn hits(&self) -> usize {
        self.hit_history.iter().filter(|&&h| h).count()
    }

    /// Symmetric with every eigenvalue above `min_eigenvalue`.
    pub fn covariance_is_spd(&self, min_eigenvalue: f64) -> bool {
        let p = &self.covariance;
        let scale = p.amax().max(1.0);
        if (p - p.transpose()).amax() > 1e-9 * scale {
            return false;
        }
        SymmetricEigen::new(*p)
            .eigenvalues
            .iter()
            .all(|&l| l > min_eigenvalue)
    }

    fn record(&mut self, hit: bool, window: usize) {
        self.hit_history.push_back(hit);
        while self.hit_history.len() > window {
            self.hit_history.pop_front();
        }
        if hit {
            self.consecutive_misses = 0;
        } else {
            self.consecutive_misses += 1;
        }
    }

    pub fn snapshot(&self) -> TrackSnapshot {
        TrackSnapshot {
            track_id: self.track_id,
            status: self.status,
            x_m: self.state[0],
            y_m: self.state[1],
            vx_m_s: self.state[2],
            vy_m_s: self.state[3],
        }
    }
}

/// Immutable view of a track after a tracker step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSnapshot {
    pub track_id: u64,
    pub status: TrackStatus,
    pub x_m: f64,
    pub y_m: f64,
    pub vx_m_s: f64,
    pub vy_m_s: f64,
}

/// Applies hits, misses, confirmation, deletion and births for one frame.
///
/// `tracks` are the tracks the association was computed against. Dead tracks
/// are dropped from the result; new tentative tracks are appended in
/// measurement order with ids drawn from `next_id`.
pub fn manage_lifecycle(
    tracks: Vec<Track>,
    association: &Association,
    measurements: &[CandidatePoint],
    params: &TrackerParams,
    next_id: &mut u64,
) -> Vec<Track> {
    let mut assigned = vec![false; tracks.len()];
    for &(t, _) in &association.pairs {
        assigned[t] = true;
    }

    let mut out: Vec<Track> = tracks
        .into_iter()
        .zip(assigned)
        .filter_map(|(mut track, hit)| {
            track.record(hit, params.confirm_n);
            if track.status == TrackStatus::Tentative && track.hits() >= params.confirm_m {
                track.status = TrackStatus::Confirmed;
            }
            if track.consecutive_misses >= params.delete_misses {
                track.status = TrackStatus::Dead;
            }
            (track.status != TrackStatus::Dead).then_some(track)
        })
        .collect();

    for &m in &association.unassigned_measurements {
        let mut track = Track::spawn(*next_id, &measurements[m], params);
        *next_id += 1;
        if params.confirm_m <= 1 {
            track.status = TrackStatus::Confirmed;
        }
        out.push(track);
    }
    out
}

/// Per-step diagnostics from [`Tracker::step`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    /// Snapshots of every live track after the step, in track order.
    pub tracks: Vec<TrackSnapshot>,
    pub associated: usize,
    pub births: usize,
    pub deaths: usize,
}

impl StepReport {
    pub fn confirmed(&self) -> impl Iterator<Item = &TrackSnapshot> {
        self.tracks
            .iter()
            .filter(|t| t.status == TrackStatus::Confirmed)
    }
}

/// Tracker state machine; advance with [`Tracker::step`] once per frame, in order.
#[derive(Debug, Clone)]
pub struct Tracker {
    params: TrackerParams,
    tracks: Vec<Track>,
    next_id: u64,
}

impl Tracker {
    pub fn new(params: TrackerParams) -> Self {
        Self {
            params,
            tracks: Vec::new(),
            next_id: 1,
        }
    }

    pub fn params(&self) -> &TrackerParams {
        &self.params
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn step(&mut self, measurements: &[CandidatePoint], dt_s: f64) -> Result<StepReport> {
        if !(dt_s > 0.0 && dt_s.is_finite()) {
            return Err(Error::NonPositiveDt(dt_s));
        }
        let params = self.params;
        let predicted = self
            .tracks
            .iter()
            .map(|t| kf_predict(t, dt_s, &params))
            .collect::<Result<Vec<_>>>()?;

        let association = gnn_associate(&predicted, measurements, &params)?;
        let mut updated = predicted;
        for &(t, m) in &association.pairs {
            let z = &measurements[m];
            let (track, _) = kf_update(&updated[t], (z.x_m, z.y_m), &params)?;
            updated[t] = track;
        }

        let before = updated.len();
        let births = association.unassigned_measurements.len();
        self.tracks = manage_lifecycle(
            updated,
            &association,
            measurements,
            &params,
            &mut self.next_id,
        );
        Ok(StepReport {
            tracks: self.tracks.iter().map(Track::snapshot).collect(),
            associated: association.pairs.len(),
            births,
            deaths: before + births - self.tracks.len(),
        })
    }
}

/// Functional form of [`Tracker::step`]: returns the advanced tracker and
/// the confirmed snapshots.
pub fn tracker_step(
    mut tracker: Tracker,
    measurements: &[CandidatePoint],
    dt_s: f64,
) -> Result<(Tracker, Vec<TrackSnapshot>)> {
    let report = tracker.step(measurements, dt_s)?;
    let confirmed = report.confirmed().copied().collect();
    Ok((tracker, confirmed))
}
