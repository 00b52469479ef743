//! Stage orchestration: simulate, detect, localize, track.
//!
//! Each stage quantizes its output to the six-decimal file form before
//! handing it on, so running the stages one at a time through files
//! reproduces [`run`] exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::config::PipelineConfig;
use crate::detection::{detect, Detection};
use crate::error::{Error, Result};
use crate::io::{self, TrackRow};
use crate::localization::{pair_detections, CandidatePoint};
use crate::radar::{synthesize_frame, Frame, RadarId, Target};
use crate::range::{range_profile, RangeProfile};
use crate::svg;
use crate::tracking::{TrackStatus, Tracker};

pub const FRAMES_FILE: &str = "frames.csv";
pub const DETECTIONS_FILE: &str = "detections.csv";
pub const CANDIDATES_FILE: &str = "candidates.csv";
pub const TRACKS_FILE: &str = "tracks.csv";
pub const MAP_FILE: &str = "map.svg";
pub const PROFILES_FILE: &str = "range_profiles.svg";

/// Frames for both radars over `config.frames` frame indices, quantized to
/// the frames-file precision. Ordered by frame, radar 1 before radar 2.
pub fn simulate(config: &PipelineConfig, targets: &[Target]) -> Result<Vec<Frame>> {
    let sim = config.simulation();
    let mut frames = Vec::with_capacity(2 * config.frames);
    for k in 0..config.frames as u64 {
        for radar in RadarId::BOTH {
            let pos = config.geometry.radar_position(radar);
            let frame = synthesize_frame(targets, radar, pos, &config.radar, &sim, k)
                .map_err(|e| e.at_frame(k))?;
            frames.push(io::quantize_frame(&frame));
        }
    }
    Ok(frames)
}

/// Range profile and detections for every frame, in input order.
pub fn detect_frames(
    config: &PipelineConfig,
    frames: &[Frame],
) -> Result<(Vec<RangeProfile>, Vec<Detection>)> {
    let mut profiles = Vec::with_capacity(frames.len());
    let mut detections = Vec::new();
    for frame in frames {
        let run = || -> Result<(RangeProfile, Vec<Detection>)> {
            frame.check_len(&config.radar)?;
            let profile = range_profile(frame, config.window_kind);
            let dets = detect(&profile, &config.cfar, &config.geometry, &config.radar)?;
            Ok((profile, dets))
        };
        let (profile, dets) = run().map_err(|e| e.at_frame(frame.frame_index))?;
        detections.extend(dets.iter().map(io::quantize_detection));
        profiles.push(profile);
    }
    Ok((profiles, detections))
}

/// Localization output with pairing diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Localized {
    pub candidates: Vec<CandidatePoint>,
    pub gated_pairs: usize,
    pub infeasible_pairs: usize,
}

/// Pairs radar-1 and radar-2 detections frame by frame, in frame order.
pub fn localize(config: &PipelineConfig, detections: &[Detection]) -> Localized {
    let mut by_frame: BTreeMap<u64, (Vec<Detection>, Vec<Detection>)> = BTreeMap::new();
    for d in detections {
        let entry = by_frame.entry(d.frame_index).or_default();
        match d.radar_id {
            RadarId::One => entry.0.push(*d),
            RadarId::Two => entry.1.push(*d),
        }
    }
    let mut out = Localized::default();
    for (d1, d2) in by_frame.values() {
        let p = pair_detections(d1, d2, &config.geometry, config.pairing_slack_m);
        out.candidates
            .extend(p.candidates.iter().map(io::quantize_candidate));
        out.gated_pairs += p.gated;
        out.infeasible_pairs += p.infeasible;
    }
    out
}

/// Runs the tracker over frames `0..frame_count` and returns a row for
/// every live track after every frame. Filter with [`confirmed_rows`].
pub fn track(
    config: &PipelineConfig,
    candidates: &[CandidatePoint],
    frame_count: u64,
) -> Result<Vec<TrackRow>> {
    let mut by_frame: BTreeMap<u64, Vec<CandidatePoint>> = BTreeMap::new();
    for c in candidates {
        by_frame.entry(c.frame_index).or_default().push(*c);
    }
    let last = by_frame.keys().next_back().map_or(0, |k| k + 1);
    let frame_count = frame_count.max(last);

    let mut tracker = Tracker::new(config.tracker);
    let mut rows = Vec::new();
    for k in 0..frame_count {
        let meas = by_frame.get(&k).map(Vec::as_slice).unwrap_or(&[]);
        let report = tracker
            .step(meas, config.frame_period_s)
            .map_err(|e| e.at_frame(k))?;
        rows.extend(report.tracks.into_iter().map(|track| TrackRow {
            frame_index: k,
            track,
        }));
    }
    Ok(rows)
}

/// Rows that belong in the tracks file.
pub fn confirmed_rows(rows: &[TrackRow], include_tentative: bool) -> Vec<TrackRow> {
    rows.iter()
        .filter(|r| {
            r.track.status == TrackStatus::Confirmed
                || (include_tentative && r.track.status == TrackStatus::Tentative)
        })
        .copied()
        .collect()
}

/// Number of frame indices spanned by a frame list.
pub fn frame_span(frames: &[Frame]) -> u64 {
    frames.iter().map(|f| f.frame_index + 1).max().unwrap_or(0)
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOutput {
    pub profiles: Vec<RangeProfile>,
    pub detections: Vec<Detection>,
    pub localized: Localized,
    /// Every live track after every frame, tentative included.
    pub track_rows: Vec<TrackRow>,
}

impl PipelineOutput {
    pub fn confirmed_track_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self
            .track_rows
            .iter()
            .filter(|r| r.track.status == TrackStatus::Confirmed)
            .map(|r| r.track.track_id)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// The full chain over already-simulated (or recorded) frames.
pub fn run(config: &PipelineConfig, frames: &[Frame]) -> Result<PipelineOutput> {
    let frames: Vec<Frame> = frames.iter().map(io::quantize_frame).collect();
    let (profiles, detections) = detect_frames(config, &frames)?;
    let localized = localize(config, &detections);
    let track_rows = track(config, &localized.candidates, frame_span(&frames))?;
    Ok(PipelineOutput {
        profiles,
        detections,
        localized,
        track_rows,
    })
}

pub fn run_scene(config: &PipelineConfig, targets: &[Target]) -> Result<PipelineOutput> {
    run(config, &simulate(config, targets)?)
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut buf = Vec::new();
    body(&mut buf)?;
    let path = dir.join(name);
    std::fs::write(&path, buf)?;
    Ok(path)
}

pub fn write_frames_file(dir: &Path, frames: &[Frame]) -> Result<PathBuf> {
    write_file(dir, FRAMES_FILE, |w| io::write_frames(w, frames))
}

pub fn write_detections_file(dir: &Path, detections: &[Detection]) -> Result<PathBuf> {
    write_file(dir, DETECTIONS_FILE, |w| io::write_detections(w, detections))
}

pub fn write_candidates_file(dir: &Path, candidates: &[CandidatePoint]) -> Result<PathBuf> {
    write_file(dir, CANDIDATES_FILE, |w| io::write_candidates(w, candidates))
}

pub fn write_tracks_file(dir: &Path, rows: &[TrackRow], include_tentative: bool) -> Result<PathBuf> {
    let rows = confirmed_rows(rows, include_tentative);
    write_file(dir, TRACKS_FILE, |w| io::write_tracks(w, &rows))
}

pub fn write_map_file(dir: &Path, config: &PipelineConfig, rows: &[TrackRow]) -> Result<PathBuf> {
    let confirmed = confirmed_rows(rows, false);
    let doc = svg::track_map(config, &confirmed);
    write_file(dir, MAP_FILE, |w| std::io::Write::write_all(w, doc.as_bytes()))
}

/// Writes every pipeline output into `dir`.
pub fn write_outputs(
    dir: &Path,
    config: &PipelineConfig,
    output: &PipelineOutput,
    include_tentative: bool,
) -> Result<()> {
    write_detections_file(dir, &output.detections)?;
    write_candidates_file(dir, &output.localized.candidates)?;
    write_tracks_file(dir, &output.track_rows, include_tentative)?;
    write_map_file(dir, config, &output.track_rows)?;
    let first: Vec<&RangeProfile> = output
        .profiles
        .iter()
        .filter(|p| p.frame_index == 0)
        .collect();
    let doc = svg::range_profiles(config, &first, &output.detections);
    write_file(dir, PROFILES_FILE, |w| std::io::Write::write_all(w, doc.as_bytes()))?;
    Ok(())
}

/// Reads frames or simulates them from a scene, whichever input is given.
pub fn load_frames(
    config: &PipelineConfig,
    scene: Option<&Path>,
    frames: Option<&Path>,
) -> Result<Vec<Frame>> {
    match (scene, frames) {
        (_, Some(path)) => io::read_frames(path),
        (Some(path), None) => simulate(config, &io::read_scene(path)?),
        (None, None) => Err(Error::invalid("--scene/--frames", "one input is required")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scene_runs_clean() {
        let config = PipelineConfig {
            noise_power: 0.0,
            frames: 5,
            ..PipelineConfig::default()
        };
        let out = run_scene(&config, &[]).unwrap();
        assert!(out.detections.is_empty());
        assert!(out.localized.candidates.is_empty());
        assert!(out.track_rows.is_empty());
        assert_eq!(out.profiles.len(), 10);
    }

    #[test]
    fn stage_errors_carry_frame_index() {
        let config = PipelineConfig {
            frames: 20,
            ..PipelineConfig::default()
        };
        // crosses the 5.498 m unambiguous range at t = 0.5 s
        let t = Target {
            id: 9,
            x_m: 0.0,
            y_m: 5.0,
            vx_m_s: 0.0,
            vy_m_s: 1.0,
            rcs_dbsm: 20.0,
        };
        let err = simulate(&config, &[t]).unwrap_err();
        assert!(matches!(err, Error::Frame { frame: 10, .. }), "{err:?}");
    }

    #[test]
    fn tracker_steps_through_empty_frames() {
        let config = PipelineConfig::default();
        let c = CandidatePoint {
            frame_index: 0,
            x_m: 0.0,
            y_m: 1.0,
            r1_m: 1.0,
            r2_m: 1.0,
            intensity: 1.0,
        };
        let rows = track(&config, &[c], 3).unwrap();
        // born at frame 0, coasting through 1 and 2
        assert_eq!(rows.iter().map(|r| r.frame_index).collect::<Vec<_>>(), vec![0, 1, 2]);
    }
}
