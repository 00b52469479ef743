//! Radar parameterization and the two-radar beat-signal simulator.
//!
//! Radar 1 sits at the origin and radar 2 at `(baseline_m, 0)`. The field of
//! view is the upper half-plane. Each radar is single channel with complex
//! (I/Q) sampling, so a chirp of `N` samples spans `N` range bins of width
//! `c / 2B`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Which of the two sensors a frame or detection belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RadarId {
    One,
    Two,
}

impl RadarId {
    pub const BOTH: [RadarId; 2] = [RadarId::One, RadarId::Two];

    pub fn number(self) -> u8 {
        match self {
            RadarId::One => 1,
            RadarId::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(RadarId::One),
            2 => Some(RadarId::Two),
            _ => None,
        }
    }
}

impl fmt::Display for RadarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Chirp and sampling parameters of one radar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarConfig {
    center_frequency_hz: f64,
    bandwidth_hz: f64,
    chirp_time_s: f64,
    samples_per_chirp: usize,
}

impl RadarConfig {
    pub const DEFAULT_CENTER_FREQUENCY_HZ: f64 = 79.0e9;
    pub const DEFAULT_BANDWIDTH_HZ: f64 = 3.49e9;
    pub const DEFAULT_CHIRP_TIME_S: f64 = 68.8e-6;
    pub const DEFAULT_SAMPLES_PER_CHIRP: usize = 128;

    pub fn new(
        center_frequency_hz: f64,
        bandwidth_hz: f64,
        chirp_time_s: f64,
        samples_per_chirp: usize,
    ) -> Result<Self> {
        if !(center_frequency_hz.is_finite() && center_frequency_hz > 0.0) {
            return Err(Error::invalid("radar.center_frequency_hz", "must be > 0"));
        }
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
            return Err(Error::invalid("radar.bandwidth_hz", "must be > 0"));
        }
        if !(chirp_time_s.is_finite() && chirp_time_s > 0.0) {
            return Err(Error::invalid("radar.chirp_time_s", "must be > 0"));
        }
        if samples_per_chirp < 2 {
            return Err(Error::invalid("radar.samples_per_chirp", "must be >= 2"));
        }
        Ok(Self {
            center_frequency_hz,
            bandwidth_hz,
            chirp_time_s,
            samples_per_chirp,
        })
    }

    pub fn center_frequency_hz(&self) -> f64 {
        self.center_frequency_hz
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn chirp_time_s(&self) -> f64 {
        self.chirp_time_s
    }

    pub fn samples_per_chirp(&self) -> usize {
        self.samples_per_chirp
    }

    /// Complex sample rate `N / T_c`.
    pub fn sample_rate_hz(&self) -> f64 {
        self.samples_per_chirp as f64 / self.chirp_time_s
    }

    /// Chirp slope `B / T_c` in Hz/s.
    pub fn chirp_slope_hz_s(&self) -> f64 {
        self.bandwidth_hz / self.chirp_time_s
    }

    /// `c / 2B`, the width of one range bin.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / (2.0 * self.bandwidth_hz)
    }

    pub fn max_unambiguous_range(&self) -> f64 {
        self.samples_per_chirp as f64 * self.range_resolution()
    }

    /// Beat frequency `2 R S / c` of a reflector at `range_m`.
    pub fn beat_frequency(&self, range_m: f64) -> Result<f64> {
        if range_m < 0.0 || range_m.is_nan() {
            return Err(Error::NegativeRange(range_m));
        }
        Ok(2.0 * range_m * self.chirp_slope_hz_s() / SPEED_OF_LIGHT_M_S)
    }
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self {
            center_frequency_hz: Self::DEFAULT_CENTER_FREQUENCY_HZ,
            bandwidth_hz: Self::DEFAULT_BANDWIDTH_HZ,
            chirp_time_s: Self::DEFAULT_CHIRP_TIME_S,
            samples_per_chirp: Self::DEFAULT_SAMPLES_PER_CHIRP,
        }
    }
}

pub fn range_resolution(config: &RadarConfig) -> f64 {
    config.range_resolution()
}

pub fn max_unambiguous_range(config: &RadarConfig) -> f64 {
    config.max_unambiguous_range()
}

pub fn beat_frequency(range_m: f64, config: &RadarConfig) -> Result<f64> {
    config.beat_frequency(range_m)
}

/// Placement of the two radars along the x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig {
    baseline_m: f64,
    min_range_m: f64,
}

impl GeometryConfig {
    pub const DEFAULT_BASELINE_M: f64 = 0.20;
    pub const DEFAULT_MIN_RANGE_M: f64 = 0.30;

    pub fn new(baseline_m: f64, min_range_m: f64) -> Result<Self> {
        if !(baseline_m.is_finite() && baseline_m > 0.0) {
            return Err(Error::invalid("geometry.baseline_m", "must be > 0"));
        }
        if !(min_range_m.is_finite() && min_range_m >= 0.0) {
            return Err(Error::invalid("geometry.min_range_m", "must be >= 0"));
        }
        Ok(Self {
            baseline_m,
            min_range_m,
        })
    }

    pub fn baseline_m(&self) -> f64 {
        self.baseline_m
    }

    pub fn min_range_m(&self) -> f64 {
        self.min_range_m
    }

    pub fn radar_position(&self, radar: RadarId) -> (f64, f64) {
        match radar {
            RadarId::One => (0.0, 0.0),
            RadarId::Two => (self.baseline_m, 0.0),
        }
    }
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            baseline_m: Self::DEFAULT_BASELINE_M,
            min_range_m: Self::DEFAULT_MIN_RANGE_M,
        }
    }
}

/// A point reflector moving with constant velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub id: i64,
    pub x_m: f64,
    pub y_m: f64,
    pub vx_m_s: f64,
    pub vy_m_s: f64,
    pub rcs_dbsm: f64,
}

impl Target {
    pub fn stationary(id: i64, x_m: f64, y_m: f64, rcs_dbsm: f64) -> Self {
        Self {
            id,
            x_m,
            y_m,
            vx_m_s: 0.0,
            vy_m_s: 0.0,
            rcs_dbsm,
        }
    }

    pub fn position_at(&self, t_s: f64) -> (f64, f64) {
        (self.x_m + self.vx_m_s * t_s, self.y_m + self.vy_m_s * t_s)
    }

    pub fn range_from(&self, origin: (f64, f64), t_s: f64) -> f64 {
        let (x, y) = self.position_at(t_s);
        (x - origin.0).hypot(y - origin.1)
    }
}

/// Noiseless tone amplitude of a reflector: `10^(rcs/20) / R²`.
pub fn echo_amplitude(rcs_dbsm: f64, range_m: f64) -> f64 {
    10f64.powf(rcs_dbsm / 20.0) / (range_m * range_m)
}

/// Noise power giving a per-sample SNR of `snr_db` for a tone of amplitude `amplitude`.
pub fn noise_power_for_snr(amplitude: f64, snr_db: f64) -> f64 {
    amplitude * amplitude / 10f64.powf(snr_db / 10.0)
}

/// One chirp of complex ADC samples from one radar.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub radar_id: RadarId,
    pub frame_index: u64,
    pub samples: Vec<Complex64>,
}

impl Frame {
    pub fn check_len(&self, config: &RadarConfig) -> Result<()> {
        if self.samples.len() != config.samples_per_chirp() {
            return Err(Error::FrameLength {
                got: self.samples.len(),
                expected: config.samples_per_chirp(),
            });
        }
        Ok(())
    }
}

/// Everything besides the scene needed to synthesize a frame.
#[derive(Debug, Clone, Copy)]
pub struct SimulationParams {
    pub noise_power: f64,
    pub seed: u64,
    pub frame_period_s: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the noise stream for one (seed, radar, frame) triple.
fn noise_stream_seed(seed: u64, radar: RadarId, frame_index: u64) -> u64 {
    let h = splitmix64(seed);
    let h = splitmix64(h ^ u64::from(radar.number()));
    splitmix64(h ^ frame_index)
}

/// Synthesizes the beat signal seen by `radar` at frame `frame_index`.
///
/// Each target contributes `a·exp(j(2π f_b n / f_s + φ))` where the range is
/// evaluated at `frame_index · frame_period_s`, plus circular complex
/// Gaussian noise of total power `noise_power`.
pub fn synthesize_frame(
    targets: &[Target],
    radar: RadarId,
    radar_position: (f64, f64),
    config: &RadarConfig,
    params: &SimulationParams,
    frame_index: u64,
) -> Result<Frame> {
    if !(params.noise_power.is_finite() && params.noise_power >= 0.0) {
        return Err(Error::invalid("pipeline.noise_power", "must be >= 0"));
    }
    let n = config.samples_per_chirp();
    let t_s = frame_index as f64 * params.frame_period_s;
    let max_range = config.max_unambiguous_range();
    let fs = config.sample_rate_hz();

    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for target in targets {
        let range = target.range_from(radar_position, t_s);
        if range >= max_range {
            return Err(Error::TargetOutOfRange {
                id: target.id,
                range_m: range,
                max_range_m: max_range,
            });
        }
        let amplitude = echo_amplitude(target.rcs_dbsm, range);
        let cycles_per_sample = config.beat_frequency(range)? / fs;
        // Round-trip carrier phase; only the fractional cycle matters.
        let carrier_cycles = config.center_frequency_hz() * 2.0 * range / SPEED_OF_LIGHT_M_S;
        let phase = -2.0 * PI * carrier_cycles.fract();
        for (k, s) in samples.iter_mut().enumerate() {
            let arg = 2.0 * PI * cycles_per_sample * k as f64 + phase;
            *s += Complex64::from_polar(amplitude, arg);
        }
    }

    if params.noise_power > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(noise_stream_seed(params.seed, radar, frame_index));
        let sigma = (params.noise_power / 2.0).sqrt();
        for s in samples.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *s += Complex64::new(sigma * re, sigma * im);
        }
    }

    Ok(Frame {
        radar_id: radar,
        frame_index,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_radar() -> RadarConfig {
        RadarConfig::default()
    }

    #[test]
    fn resolution_matches_reported_values() {
        assert_relative_eq!(default_radar().range_resolution(), 0.04295, max_relative = 1e-3);
        let half_c = RadarConfig::new(79e9, SPEED_OF_LIGHT_M_S / 2.0, 68.8e-6, 128).unwrap();
        assert_eq!(half_c.range_resolution(), 1.0);
        let narrow = RadarConfig::new(79e9, 150e6, 68.8e-6, 128).unwrap();
        assert_relative_eq!(narrow.range_resolution(), 0.999_308_193_3, max_relative = 1e-9);
    }

    #[test]
    fn max_range_is_n_bins() {
        assert_relative_eq!(default_radar().max_unambiguous_range(), 5.498, epsilon = 1e-3);
        let half_c = RadarConfig::new(79e9, SPEED_OF_LIGHT_M_S / 2.0, 68.8e-6, 128).unwrap();
        assert_eq!(half_c.max_unambiguous_range(), 128.0);
    }

    #[test]
    fn beat_frequency_examples() {
        let cfg = default_radar();
        assert_eq!(cfg.beat_frequency(0.0).unwrap(), 0.0);
        let one_bin = cfg.beat_frequency(cfg.range_resolution()).unwrap();
        assert_relative_eq!(one_bin, 1.0 / 68.8e-6, max_relative = 1e-12);
        assert_relative_eq!(one_bin, 14_534.88, epsilon = 0.01);
        let top = cfg.beat_frequency(cfg.max_unambiguous_range()).unwrap();
        assert_relative_eq!(top, cfg.sample_rate_hz(), max_relative = 1e-12);
        assert_relative_eq!(top, 1.8605e6, max_relative = 1e-4);
        assert!(matches!(cfg.beat_frequency(-0.1), Err(Error::NegativeRange(_))));
    }

    #[test]
    fn invalid_radar_parameters_rejected() {
        assert!(RadarConfig::new(79e9, -1.0, 68.8e-6, 128).is_err());
        assert!(RadarConfig::new(79e9, 3.49e9, 0.0, 128).is_err());
        assert!(RadarConfig::new(79e9, 3.49e9, 68.8e-6, 1).is_err());
        assert!(GeometryConfig::new(0.0, 0.3).is_err());
        assert!(GeometryConfig::new(0.2, -0.1).is_err());
    }

    fn sim(noise_power: f64) -> SimulationParams {
        SimulationParams {
            noise_power,
            seed: 7,
            frame_period_s: 0.05,
        }
    }

    #[test]
    fn empty_noiseless_scene_is_zero() {
        let f = synthesize_frame(&[], RadarId::One, (0.0, 0.0), &default_radar(), &sim(0.0), 0).unwrap();
        assert_eq!(f.samples.len(), 128);
        assert!(f.samples.iter().all(|s| s.re == 0.0 && s.im == 0.0));
    }

    #[test]
    fn out_of_range_target_names_id() {
        let t = Target::stationary(42, 0.0, 6.0, 20.0);
        let err = synthesize_frame(&[t], RadarId::One, (0.0, 0.0), &default_radar(), &sim(0.0), 0)
            .unwrap_err();
        assert!(matches!(err, Error::TargetOutOfRange { id: 42, .. }));
    }

    #[test]
    fn noise_is_deterministic_and_radar_specific() {
        let cfg = default_radar();
        let a = synthesize_frame(&[], RadarId::One, (0.0, 0.0), &cfg, &sim(1.0), 3).unwrap();
        let b = synthesize_frame(&[], RadarId::One, (0.0, 0.0), &cfg, &sim(1.0), 3).unwrap();
        let c = synthesize_frame(&[], RadarId::Two, (0.0, 0.0), &cfg, &sim(1.0), 3).unwrap();
        let d = synthesize_frame(&[], RadarId::One, (0.0, 0.0), &cfg, &sim(1.0), 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples, c.samples);
        assert_ne!(a.samples, d.samples);
        let power = a.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / 128.0;
        assert!(power > 0.6 && power < 1.5, "noise power {power}");
    }

    #[test]
    fn six_db_doubles_amplitude() {
        let cfg = default_radar();
        let base = Target::stationary(1, 0.3, 2.0, 10.0);
        let louder = Target {
            rcs_dbsm: 10.0 + 20.0 * 2f64.log10(),
            ..base
        };
        let a = synthesize_frame(&[base], RadarId::One, (0.0, 0.0), &cfg, &sim(0.0), 0).unwrap();
        let b = synthesize_frame(&[louder], RadarId::One, (0.0, 0.0), &cfg, &sim(0.0), 0).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_relative_eq!(y.norm(), 2.0 * x.norm(), max_relative = 1e-9);
        }
    }

    #[test]
    fn targets_advance_with_constant_velocity() {
        let t = Target {
            id: 1,
            x_m: 0.0,
            y_m: 1.0,
            vx_m_s: 0.0,
            vy_m_s: 1.0,
            rcs_dbsm: 0.0,
        };
        assert_relative_eq!(t.range_from((0.0, 0.0), 0.5), 1.5);
        assert_relative_eq!(t.range_from((0.0, 0.0), 0.0), 1.0);
    }
}
