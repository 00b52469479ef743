//! C ABI for `fmcw-bilat`.
//!
//! Every fallible function returns an [`FmcwStatus`]. On failure a message
//! describing the error is kept per thread and can be read with
//! [`fmcw_last_error`]. Configurations and trackers are opaque handles owned
//! by the caller and released with their `_free` function.
//!
//! Functions that fill a caller buffer take its capacity and write the
//! number of records produced to `out_len`. When the buffer is too small
//! they return `FMCW_STATUS_BUFFER_TOO_SMALL` with `out_len` set to the
//! required count and leave the buffer untouched, except
//! [`fmcw_tracker_step`], which has already advanced the tracker and
//! can be followed by [`fmcw_tracker_tracks`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fmcw_bilat::{
    bilaterate, detect, io, load_config, pipeline, range_profile, CandidatePoint, Error, Frame,
    PipelineConfig, RadarId, TrackSnapshot, TrackStatus, Tracker,
};
use num_complex::Complex64;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmcwStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A configuration value or argument is out of its valid range.
    InvalidConfig = 2,
    /// The two ranges do not intersect.
    Infeasible = 3,
    /// Malformed or inconsistent input data.
    Data = 4,
    Io = 5,
    BufferTooSmall = 6,
    /// A string argument is not valid UTF-8.
    InvalidUtf8 = 7,
    /// Internal error; the library caught a panic.
    Internal = 8,
}

/// One pruned detection from a single radar.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmcwDetection {
    /// 1 or 2.
    pub radar: u8,
    pub frame_index: u64,
    pub bin: usize,
    pub refined_bin: f64,
    pub range_m: f64,
    pub intensity: f64,
}

/// A 2D point from one pair of detections.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmcwCandidate {
    pub frame_index: u64,
    pub x_m: f64,
    pub y_m: f64,
    pub r1_m: f64,
    pub r2_m: f64,
    pub intensity: f64,
}

pub const FMCW_TRACK_TENTATIVE: u8 = 1;
pub const FMCW_TRACK_CONFIRMED: u8 = 2;

/// A live track after a tracker step.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmcwTrack {
    pub track_id: u64,
    /// `FMCW_TRACK_TENTATIVE` or `FMCW_TRACK_CONFIRMED`.
    pub status: u8,
    pub x_m: f64,
    pub y_m: f64,
    pub vx_m_s: f64,
    pub vy_m_s: f64,
}

/// Opaque pipeline configuration.
pub struct FmcwConfig(PipelineConfig);

/// Opaque tracker state.
pub struct FmcwTracker {
    tracker: Tracker,
    frame_period_s: f64,
    last: Vec<TrackSnapshot>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FmcwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_config_error() {
            FmcwStatus::InvalidConfig
        } else if matches!(e, Error::Io(_)) {
            FmcwStatus::Io
        } else {
            FmcwStatus::Data
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: FmcwStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_last_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FmcwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            FmcwStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(Some(msg));
            status
        }
        Err(_) => {
            set_last_error(Some("internal error".into()));
            FmcwStatus::Internal
        }
    }
}

fn non_null<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees non-null pointers are valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| fail(FmcwStatus::NullArgument, format!("`{name}` is null")))
}

fn non_null_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller guarantees non-null pointers are valid and unaliased.
    unsafe { p.as_mut() }.ok_or_else(|| fail(FmcwStatus::NullArgument, format!("`{name}` is null")))
}

/// # Safety
/// `p` must be null or valid for `len` reads of `T`.
unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(FmcwStatus::NullArgument, format!("`{name}` is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(FmcwStatus::NullArgument, format!("`{name}` is null")));
    }
    // SAFETY: the caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| fail(FmcwStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

/// Copies `items` into the caller buffer or reports the required length.
///
/// # Safety
/// `out` must be null or valid for `cap` writes.
unsafe fn emit<T: Copy>(items: &[T], out: *mut T, cap: usize, out_len: &mut usize) -> Result<(), Failure> {
    *out_len = items.len();
    if items.len() > cap {
        return Err(fail(
            FmcwStatus::BufferTooSmall,
            format!("need room for {} records, got {cap}", items.len()),
        ));
    }
    if !items.is_empty() {
        if out.is_null() {
            return Err(fail(FmcwStatus::NullArgument, "`out` is null"));
        }
        ptr::copy_nonoverlapping(items.as_ptr(), out, items.len());
    }
    Ok(())
}

fn track_record(t: &TrackSnapshot) -> FmcwTrack {
    FmcwTrack {
        track_id: t.track_id,
        status: match t.status {
            TrackStatus::Confirmed => FMCW_TRACK_CONFIRMED,
            _ => FMCW_TRACK_TENTATIVE,
        },
        x_m: t.x_m,
        y_m: t.y_m,
        vx_m_s: t.vx_m_s,
        vy_m_s: t.vy_m_s,
    }
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn fmcw_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fmcw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New configuration with every default. Never null.
#[no_mangle]
pub extern "C" fn fmcw_config_default() -> *mut FmcwConfig {
    Box::into_raw(Box::new(FmcwConfig(PipelineConfig::default())))
}

/// Loads a `key = value` configuration file into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn fmcw_config_load(path: *const c_char, out: *mut *mut FmcwConfig) -> FmcwStatus {
    guard(|| {
        let out = non_null_mut(out, "out")?;
        let config = load_config(str_arg(path, "path")?).map_err(|e| match e {
            e @ Error::Io(_) => Failure(FmcwStatus::InvalidConfig, e.to_string()),
            e => Failure::from(e),
        })?;
        *out = Box::into_raw(Box::new(FmcwConfig(config)));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fmcw_config_free(config: *mut FmcwConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fmcw_config_set_seed(config: *mut FmcwConfig, seed: u64) -> FmcwStatus {
    guard(|| {
        non_null_mut(config, "config")?.0.seed = seed;
        Ok(())
    })
}

/// Total complex noise power per sample used by the simulator.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fmcw_config_set_noise_power(config: *mut FmcwConfig, noise_power: f64) -> FmcwStatus {
    guard(|| {
        let config = non_null_mut(config, "config")?;
        if !(noise_power.is_finite() && noise_power >= 0.0) {
            return Err(fail(FmcwStatus::InvalidConfig, "noise power must be finite and >= 0"));
        }
        config.0.noise_power = noise_power;
        Ok(())
    })
}

/// Number of complex samples per chirp, or 0 for a null handle.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fmcw_config_samples_per_chirp(config: *const FmcwConfig) -> usize {
    config.as_ref().map_or(0, |c| c.0.radar.samples_per_chirp())
}

/// Range bin width in meters, or NaN for a null handle.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fmcw_range_resolution(config: *const FmcwConfig) -> f64 {
    config.as_ref().map_or(f64::NAN, |c| c.0.radar.range_resolution())
}

/// Largest range the sampled beat spectrum can represent, or NaN for a null handle.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fmcw_max_range(config: *const FmcwConfig) -> f64 {
    config.as_ref().map_or(f64::NAN, |c| c.0.radar.max_unambiguous_range())
}

/// Intersects two range circles centred at (0, 0) and (d, 0), upper half plane.
///
/// # Safety
/// `x_m` and `y_m` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn fmcw_bilaterate(
    r1_m: f64,
    r2_m: f64,
    d_m: f64,
    x_m: *mut f64,
    y_m: *mut f64,
) -> FmcwStatus {
    guard(|| {
        let x_m = non_null_mut(x_m, "x_m")?;
        let y_m = non_null_mut(y_m, "y_m")?;
        if !(d_m.is_finite() && d_m > 0.0) {
            return Err(fail(FmcwStatus::InvalidConfig, "baseline must be > 0"));
        }
        let (x, y) = bilaterate(r1_m, r2_m, d_m)
            .map_err(|_| fail(FmcwStatus::Infeasible, format!("ranges {r1_m} and {r2_m} do not intersect")))?;
        *x_m = x;
        *y_m = y;
        Ok(())
    })
}

/// Runs the range FFT and CFAR detector on one chirp.
///
/// `samples` holds `n_samples` complex values as interleaved re, im pairs
/// (`2 * n_samples` doubles); `n_samples` must equal the configured
/// samples per chirp.
///
/// # Safety
/// `samples` must be valid for `2 * n_samples` reads and `out` for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn fmcw_detect(
    config: *const FmcwConfig,
    radar: u8,
    frame_index: u64,
    samples: *const f64,
    n_samples: usize,
    out: *mut FmcwDetection,
    cap: usize,
    out_len: *mut usize,
) -> FmcwStatus {
    guard(|| {
        let config = &non_null(config, "config")?.0;
        let out_len = non_null_mut(out_len, "out_len")?;
        let radar_id = RadarId::from_number(radar)
            .ok_or_else(|| fail(FmcwStatus::InvalidConfig, format!("radar must be 1 or 2, got {radar}")))?;
        let n2 = n_samples
            .checked_mul(2)
            .ok_or_else(|| fail(FmcwStatus::Data, "sample count overflows"))?;
        let raw = slice(samples, n2, "samples")?;
        let frame = Frame {
            radar_id,
            frame_index,
            samples: raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        };
        frame.check_len(&config.radar)?;
        let profile = range_profile(&frame, config.window_kind);
        let dets: Vec<FmcwDetection> = detect(&profile, &config.cfar, &config.geometry, &config.radar)?
            .iter()
            .map(|d| FmcwDetection {
                radar: d.radar_id.number(),
                frame_index: d.frame_index,
                bin: d.bin,
                refined_bin: d.refined_bin,
                range_m: d.range_m,
                intensity: d.intensity,
            })
            .collect();
        emit(&dets, out, cap, out_len)
    })
}

/// New tracker using the configuration's tracker parameters and frame period.
/// Returns null for a null handle.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fmcw_tracker_new(config: *const FmcwConfig) -> *mut FmcwTracker {
    match config.as_ref() {
        Some(c) => Box::into_raw(Box::new(FmcwTracker {
            tracker: Tracker::new(c.0.tracker),
            frame_period_s: c.0.frame_period_s,
            last: Vec::new(),
        })),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `tracker` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fmcw_tracker_free(tracker: *mut FmcwTracker) {
    if !tracker.is_null() {
        drop(Box::from_raw(tracker));
    }
}

/// Advances the tracker by one frame and reports every live track.
///
/// # Safety
/// `candidates` must be valid for `n` reads and `out` for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn fmcw_tracker_step(
    tracker: *mut FmcwTracker,
    candidates: *const FmcwCandidate,
    n: usize,
    out: *mut FmcwTrack,
    cap: usize,
    out_len: *mut usize,
) -> FmcwStatus {
    guard(|| {
        let tracker = non_null_mut(tracker, "tracker")?;
        let out_len = non_null_mut(out_len, "out_len")?;
        let meas: Vec<CandidatePoint> = slice(candidates, n, "candidates")?
            .iter()
            .map(|c| CandidatePoint {
                frame_index: c.frame_index,
                x_m: c.x_m,
                y_m: c.y_m,
                r1_m: c.r1_m,
                r2_m: c.r2_m,
                intensity: c.intensity,
            })
            .collect();
        if meas.iter().any(|c| !(c.x_m.is_finite() && c.y_m.is_finite())) {
            return Err(fail(FmcwStatus::Data, "candidate position is not finite"));
        }
        let report = tracker.tracker.step(&meas, tracker.frame_period_s)?;
        tracker.last = report.tracks;
        let records: Vec<FmcwTrack> = tracker.last.iter().map(track_record).collect();
        emit(&records, out, cap, out_len)
    })
}

/// Tracks reported by the most recent step, for retrying with a larger buffer.
///
/// # Safety
/// `out` must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn fmcw_tracker_tracks(
    tracker: *const FmcwTracker,
    out: *mut FmcwTrack,
    cap: usize,
    out_len: *mut usize,
) -> FmcwStatus {
    guard(|| {
        let tracker = non_null(tracker, "tracker")?;
        let out_len = non_null_mut(out_len, "out_len")?;
        let records: Vec<FmcwTrack> = tracker.last.iter().map(track_record).collect();
        emit(&records, out, cap, out_len)
    })
}

/// Simulates `scene_path` and writes the same files as the CLI `pipeline`
/// command into `out_dir`.
///
/// # Safety
/// `scene_path` and `out_dir` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn fmcw_pipeline_run(
    config: *const FmcwConfig,
    scene_path: *const c_char,
    out_dir: *const c_char,
    include_tentative: bool,
) -> FmcwStatus {
    guard(|| {
        let config = &non_null(config, "config")?.0;
        let scene = io::read_scene(str_arg(scene_path, "scene_path")?)?;
        let out_dir = Path::new(str_arg(out_dir, "out_dir")?);
        let output = pipeline::run_scene(config, &scene)?;
        pipeline::write_outputs(out_dir, config, &output, include_tentative)?;
        Ok(())
    })
}
