//! Text formats read and written by the CLI.
//!
//! Every real is printed with six decimals. Stages that hand data to each
//! other in memory go through [`q6`] so that a stage-by-stage run over files
//! and a single in-process run see identical numbers.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::detection::Detection;
use crate::error::{Error, Result};
use crate::localization::CandidatePoint;
use crate::radar::{Frame, RadarId, Target};
use crate::tracking::{TrackSnapshot, TrackStatus};

pub const DETECTIONS_HEADER: &str = "frame,radar,bin,refined_bin,range_m,intensity";
pub const CANDIDATES_HEADER: &str = "frame,x_m,y_m,r1_m,r2_m,intensity";
pub const TRACKS_HEADER: &str = "frame,track_id,status,x_m,y_m,vx_m_s,vy_m_s";

/// Rounds through the six-decimal text form.
pub fn q6(x: f64) -> f64 {
    format!("{x:.6}").parse().expect("formatted float parses")
}

struct Fields<'a> {
    path: &'a Path,
    line: usize,
    parts: Vec<&'a str>,
}

impl<'a> Fields<'a> {
    fn new(path: &'a Path, line: usize, text: &'a str, expected: Option<usize>) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if let Some(n) = expected {
            if parts.len() != n {
                return Err(Error::parse(
                    path,
                    line,
                    format!("expected {n} fields, found {}", parts.len()),
                ));
            }
        }
        Ok(Self { path, line, parts })
    }

    fn get<T: FromStr>(&self, i: usize, name: &str) -> Result<T> {
        let raw = self.parts[i];
        raw.parse()
            .map_err(|_| Error::parse(self.path, self.line, format!("bad {name} `{raw}`")))
    }

    fn radar(&self, i: usize) -> Result<RadarId> {
        let n: u8 = self.get(i, "radar id")?;
        RadarId::from_number(n)
            .ok_or_else(|| Error::parse(self.path, self.line, format!("radar id must be 1 or 2, got {n}")))
    }
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Like [`records`] but also requires and skips the given header line.
fn body<'a>(text: &'a str, header: &str, path: &Path) -> Result<Vec<(usize, &'a str)>> {
    let mut it = records(text);
    match it.next() {
        Some((_, h)) if h == header => Ok(it.collect()),
        Some((line, _)) => Err(Error::parse(path, line, format!("expected header `{header}`"))),
        None => Err(Error::parse(path, 1, format!("missing header `{header}`"))),
    }
}

// --- scene -----------------------------------------------------------------

pub fn parse_scene(text: &str, path: &Path) -> Result<Vec<Target>> {
    records(text)
        .map(|(line, l)| {
            let f = Fields::new(path, line, l, Some(6))?;
            Ok(Target {
                id: f.get(0, "id")?,
                x_m: f.get(1, "x_m")?,
                y_m: f.get(2, "y_m")?,
                vx_m_s: f.get(3, "vx_m_s")?,
                vy_m_s: f.get(4, "vy_m_s")?,
                rcs_dbsm: f.get(5, "rcs_dbsm")?,
            })
        })
        .collect()
}

pub fn read_scene(path: impl AsRef<Path>) -> Result<Vec<Target>> {
    let path = path.as_ref();
    parse_scene(&std::fs::read_to_string(path)?, path)
}

pub fn write_scene<W: Write>(mut w: W, targets: &[Target]) -> io::Result<()> {
    writeln!(w, "# id,x_m,y_m,vx_m_s,vy_m_s,rcs_dbsm")?;
    for t in targets {
        writeln!(
            w,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            t.id, t.x_m, t.y_m, t.vx_m_s, t.vy_m_s, t.rcs_dbsm
        )?;
    }
    Ok(())
}

// --- frames ----------------------------------------------------------------

pub fn quantize_frame(frame: &Frame) -> Frame {
    Frame {
        samples: frame
            .samples
            .iter()
            .map(|s| Complex64::new(q6(s.re), q6(s.im)))
            .collect(),
        ..frame.clone()
    }
}

pub fn format_frame(frame: &Frame) -> String {
    let mut line = format!("{},{}", frame.frame_index, frame.radar_id);
    for s in &frame.samples {
        write!(line, ",{:.6},{:.6}", s.re, s.im).expect("write to String");
    }
    line
}

pub fn write_frames<W: Write>(mut w: W, frames: &[Frame]) -> io::Result<()> {
    for f in frames {
        writeln!(w, "{}", format_frame(f))?;
    }
    Ok(())
}

pub fn parse_frames(text: &str, path: &Path) -> Result<Vec<Frame>> {
    records(text)
        .map(|(line, l)| {
            let f = Fields::new(path, line, l, None)?;
            let n = f.parts.len();
            if n < 2 || n % 2 != 0 {
                return Err(Error::parse(
                    path,
                    line,
                    "expected frame_index,radar_id followed by re,im pairs",
                ));
            }
            let samples = (2..n)
                .step_by(2)
                .map(|i| Ok(Complex64::new(f.get(i, "re")?, f.get(i + 1, "im")?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Frame {
                frame_index: f.get(0, "frame_index")?,
                radar_id: f.radar(1)?,
                samples,
            })
        })
        .collect()
}

pub fn read_frames(path: impl AsRef<Path>) -> Result<Vec<Frame>> {
    let path = path.as_ref();
    parse_frames(&std::fs::read_to_string(path)?, path)
}

// --- detections ------------------------------------------------------------

pub fn quantize_detection(d: &Detection) -> Detection {
    Detection {
        refined_bin: q6(d.refined_bin),
        range_m: q6(d.range_m),
        intensity: q6(d.intensity),
        ..*d
    }
}

pub fn write_detections<W: Write>(mut w: W, dets: &[Detection]) -> io::Result<()> {
    writeln!(w, "{DETECTIONS_HEADER}")?;
    for d in dets {
        writeln!(
            w,
            "{},{},{},{:.6},{:.6},{:.6}",
            d.frame_index, d.radar_id, d.bin, d.refined_bin, d.range_m, d.intensity
        )?;
    }
    Ok(())
}

pub fn parse_detections(text: &str, path: &Path) -> Result<Vec<Detection>> {
    body(text, DETECTIONS_HEADER, path)?
        .into_iter()
        .map(|(line, l)| {
            let f = Fields::new(path, line, l, Some(6))?;
            Ok(Detection {
                frame_index: f.get(0, "frame")?,
                radar_id: f.radar(1)?,
                bin: f.get(2, "bin")?,
                refined_bin: f.get(3, "refined_bin")?,
                range_m: f.get(4, "range_m")?,
                intensity: f.get(5, "intensity")?,
            })
        })
        .collect()
}

pub fn read_detections(path: impl AsRef<Path>) -> Result<Vec<Detection>> {
    let path = path.as_ref();
    parse_detections(&std::fs::read_to_string(path)?, path)
}

// --- candidates ------------------------------------------------------------

pub fn quantize_candidate(c: &CandidatePoint) -> CandidatePoint {
    CandidatePoint {
        frame_index: c.frame_index,
        x_m: q6(c.x_m),
        y_m: q6(c.y_m),
        r1_m: q6(c.r1_m),
        r2_m: q6(c.r2_m),
        intensity: q6(c.intensity),
    }
}

pub fn write_candidates<W: Write>(mut w: W, candidates: &[CandidatePoint]) -> io::Result<()> {
    writeln!(w, "{CANDIDATES_HEADER}")?;
    for c in candidates {
        writeln!(
            w,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            c.frame_index, c.x_m, c.y_m, c.r1_m, c.r2_m, c.intensity
        )?;
    }
    Ok(())
}

pub fn parse_candidates(text: &str, path: &Path) -> Result<Vec<CandidatePoint>> {
    body(text, CANDIDATES_HEADER, path)?
        .into_iter()
        .map(|(line, l)| {
            let f = Fields::new(path, line, l, Some(6))?;
            Ok(CandidatePoint {
                frame_index: f.get(0, "frame")?,
                x_m: f.get(1, "x_m")?,
                y_m: f.get(2, "y_m")?,
                r1_m: f.get(3, "r1_m")?,
                r2_m: f.get(4, "r2_m")?,
                intensity: f.get(5, "intensity")?,
            })
        })
        .collect()
}

pub fn read_candidates(path: impl AsRef<Path>) -> Result<Vec<CandidatePoint>> {
    let path = path.as_ref();
    parse_candidates(&std::fs::read_to_string(path)?, path)
}

// --- tracks ----------------------------------------------------------------

/// One row of the tracks file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackRow {
    pub frame_index: u64,
    pub track: TrackSnapshot,
}

pub fn write_tracks<W: Write>(mut w: W, rows: &[TrackRow]) -> io::Result<()> {
    writeln!(w, "{TRACKS_HEADER}")?;
    for r in rows {
        let t = &r.track;
        writeln!(
            w,
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            r.frame_index, t.track_id, t.status, t.x_m, t.y_m, t.vx_m_s, t.vy_m_s
        )?;
    }
    Ok(())
}

pub fn parse_tracks(text: &str, path: &Path) -> Result<Vec<TrackRow>> {
    body(text, TRACKS_HEADER, path)?
        .into_iter()
        .map(|(line, l)| {
            let f = Fields::new(path, line, l, Some(7))?;
            let status: TrackStatus = f.get(2, "status")?;
            Ok(TrackRow {
                frame_index: f.get(0, "frame")?,
                track: TrackSnapshot {
                    track_id: f.get(1, "track_id")?,
                    status,
                    x_m: f.get(3, "x_m")?,
                    y_m: f.get(4, "y_m")?,
                    vx_m_s: f.get(5, "vx_m_s")?,
                    vy_m_s: f.get(6, "vy_m_s")?,
                },
            })
        })
        .collect()
}

pub fn read_tracks(path: impl AsRef<Path>) -> Result<Vec<TrackRow>> {
    let path = path.as_ref();
    parse_tracks(&std::fs::read_to_string(path)?, path)
}
