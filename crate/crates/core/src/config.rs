//! Pipeline configuration and its `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! radar.bandwidth_hz = 3.49e9
//! geometry.baseline_m = 0.35
//! ```
//!
//! Missing keys keep their defaults. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::detection::CfarParams;
use crate::error::{Error, Result};
use crate::radar::{GeometryConfig, RadarConfig, SimulationParams};
use crate::range::WindowKind;
use crate::tracking::TrackerParams;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub radar: RadarConfig,
    pub geometry: GeometryConfig,
    pub cfar: CfarParams,
    pub tracker: TrackerParams,
    /// Extra range difference tolerated beyond the baseline when pairing detections.
    pub pairing_slack_m: f64,
    pub frame_period_s: f64,
    pub frames: usize,
    pub seed: u64,
    pub noise_power: f64,
    pub window_kind: WindowKind,
}

impl PipelineConfig {
    pub const DEFAULT_FRAME_PERIOD_S: f64 = 0.05;
    pub const DEFAULT_FRAMES: usize = 50;
    pub const DEFAULT_NOISE_POWER: f64 = 1e-3;

    pub fn simulation(&self) -> SimulationParams {
        SimulationParams {
            noise_power: self.noise_power,
            seed: self.seed,
            frame_period_s: self.frame_period_s,
        }
    }

    /// Checks the cross-field invariants not covered by the component constructors.
    pub fn validate(&self) -> Result<()> {
        if self.cfar.window_len() > self.radar.samples_per_chirp() {
            return Err(Error::invalid(
                "cfar.training_cells_per_side",
                format!(
                    "CFAR window of {} cells exceeds {} samples per chirp",
                    self.cfar.window_len(),
                    self.radar.samples_per_chirp()
                ),
            ));
        }
        if !(self.pairing_slack_m >= 0.0 && self.pairing_slack_m.is_finite()) {
            return Err(Error::invalid("pipeline.pairing_slack_m", "must be >= 0"));
        }
        if !(self.frame_period_s > 0.0 && self.frame_period_s.is_finite()) {
            return Err(Error::invalid("pipeline.frame_period_s", "must be > 0"));
        }
        if self.frames < 1 {
            return Err(Error::invalid("pipeline.frames", "must be >= 1"));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(Error::invalid("pipeline.noise_power", "must be >= 0"));
        }
        Ok(())
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let radar = RadarConfig::default();
        Self {
            radar,
            geometry: GeometryConfig::default(),
            cfar: CfarParams::default(),
            tracker: TrackerParams::default(),
            pairing_slack_m: radar.range_resolution(),
            frame_period_s: Self::DEFAULT_FRAME_PERIOD_S,
            frames: Self::DEFAULT_FRAMES,
            seed: 0,
            noise_power: Self::DEFAULT_NOISE_POWER,
            window_kind: WindowKind::default(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "radar.center_frequency_hz",
    "radar.bandwidth_hz",
    "radar.chirp_time_s",
    "radar.samples_per_chirp",
    "geometry.baseline_m",
    "geometry.min_range_m",
    "cfar.training_cells_per_side",
    "cfar.guard_cells_per_side",
    "cfar.probability_false_alarm",
    "tracker.process_noise_intensity",
    "tracker.measurement_noise_std_x_m",
    "tracker.measurement_noise_std_y_m",
    "tracker.gate_threshold",
    "tracker.confirm_m",
    "tracker.confirm_n",
    "tracker.delete_misses",
    "tracker.initial_velocity_std_m_s",
    "pipeline.pairing_slack_m",
    "pipeline.frame_period_s",
    "pipeline.frames",
    "pipeline.seed",
    "pipeline.noise_power",
    "pipeline.window",
];

pub fn load_config(path: impl AsRef<Path>) -> Result<PipelineConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, path)
}

/// Parses config text; `origin` is only used in error messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<PipelineConfig> {
    let mut values: BTreeMap<&str, &str> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(origin, line_no, "expected `key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::parse(origin, line_no, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(Error::parse(origin, line_no, format!("missing value for `{key}`")));
        }
        if values.insert(key, value).is_some() {
            return Err(Error::parse(origin, line_no, format!("duplicate key `{key}`")));
        }
    }
    Values(values).build()
}

struct Values<'a>(BTreeMap<&'a str, &'a str>);

impl Values<'_> {
    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.0.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::invalid(key, format!("cannot parse `{raw}`"))),
        }
    }

    fn build(&self) -> Result<PipelineConfig> {
        let d = PipelineConfig::default();

        let radar = RadarConfig::new(
            self.get("radar.center_frequency_hz", d.radar.center_frequency_hz())?,
            self.get("radar.bandwidth_hz", d.radar.bandwidth_hz())?,
            self.get("radar.chirp_time_s", d.radar.chirp_time_s())?,
            self.get("radar.samples_per_chirp", d.radar.samples_per_chirp())?,
        )?;
        let geometry = GeometryConfig::new(
            self.get("geometry.baseline_m", d.geometry.baseline_m())?,
            self.get("geometry.min_range_m", d.geometry.min_range_m())?,
        )?;
        let cfar = CfarParams::new(
            self.get("cfar.training_cells_per_side", d.cfar.training_cells_per_side())?,
            self.get("cfar.guard_cells_per_side", d.cfar.guard_cells_per_side())?,
            self.get("cfar.probability_false_alarm", d.cfar.probability_false_alarm())?,
        )?;
        let t = d.tracker;
        let tracker = TrackerParams::new(
            self.get("tracker.process_noise_intensity", t.process_noise_intensity())?,
            self.get("tracker.measurement_noise_std_x_m", t.measurement_noise_std_x_m())?,
            self.get("tracker.measurement_noise_std_y_m", t.measurement_noise_std_y_m())?,
            self.get("tracker.gate_threshold", t.gate_threshold())?,
            self.get("tracker.confirm_m", t.confirm_m())?,
            self.get("tracker.confirm_n", t.confirm_n())?,
            self.get("tracker.delete_misses", t.delete_misses())?,
            self.get("tracker.initial_velocity_std_m_s", t.initial_velocity_std_m_s())?,
        )?;
        let window_kind = match self.0.get("pipeline.window") {
            None => d.window_kind,
            Some(raw) => raw
                .parse()
                .map_err(|e: String| Error::invalid("pipeline.window", e))?,
        };

        let config = PipelineConfig {
            radar,
            geometry,
            cfar,
            tracker,
            // slack defaults to one range bin of the configured radar
            pairing_slack_m: self.get("pipeline.pairing_slack_m", radar.range_resolution())?,
            frame_period_s: self.get("pipeline.frame_period_s", d.frame_period_s)?,
            frames: self.get("pipeline.frames", d.frames)?,
            seed: self.get("pipeline.seed", d.seed)?,
            noise_power: self.get("pipeline.noise_power", d.noise_power)?,
            window_kind,
        };
        config.validate()?;
        Ok(config)
    }
}
