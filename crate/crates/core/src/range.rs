//! Range profiles: windowed DFT of a beat-signal frame, bin-to-meter mapping
//! and sub-bin peak refinement.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::radar::{Frame, RadarConfig, RadarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowKind {
    Rectangular,
    #[default]
    Hann,
}

impl WindowKind {
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            WindowKind::Rectangular => vec![1.0; n],
            WindowKind::Hann if n < 2 => vec![1.0; n],
            WindowKind::Hann => {
                let denom = (n - 1) as f64;
                (0..n)
                    .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / denom).cos()))
                    .collect()
            }
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowKind::Rectangular => "rectangular",
            WindowKind::Hann => "hann",
        })
    }
}

impl FromStr for WindowKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rectangular" | "rect" => Ok(WindowKind::Rectangular),
            "hann" => Ok(WindowKind::Hann),
            other => Err(format!("unknown window `{other}` (expected hann or rectangular)")),
        }
    }
}

/// Squared magnitude spectrum of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    pub radar_id: RadarId,
    pub frame_index: u64,
    pub power: Vec<f64>,
    pub window_kind: WindowKind,
}

impl RangeProfile {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    /// Index of the strongest bin, lowest index on ties.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, &p) in self.power.iter().enumerate() {
            if best.is_none_or(|b| p > self.power[b]) {
                best = Some(k);
            }
        }
        best
    }
}

/// `power[k] = |Σ_n w[n] x[n] e^{-j2πkn/N}|²`.
pub fn range_profile(frame: &Frame, window_kind: WindowKind) -> RangeProfile {
    let n = frame.samples.len();
    let window = window_kind.coefficients(n);
    let mut buffer: Vec<Complex64> = frame
        .samples
        .iter()
        .zip(&window)
        .map(|(s, w)| s * w)
        .collect();
    if n > 0 {
        FftPlanner::<f64>::new()
            .plan_fft_forward(n)
            .process(&mut buffer);
    }
    RangeProfile {
        radar_id: frame.radar_id,
        frame_index: frame.frame_index,
        power: buffer.iter().map(|c| c.norm_sqr()).collect(),
        window_kind,
    }
}

pub fn bin_to_range(bin: f64, config: &RadarConfig) -> Result<f64> {
    let len = config.samples_per_chirp();
    if !(bin >= 0.0 && bin < len as f64) {
        return Err(Error::BinOutOfDomain { bin, len });
    }
    Ok(bin * config.range_resolution())
}

/// Outcome of [`refine_peak`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedPeak {
    pub bin: f64,
    /// False when the input was an edge bin or not a local peak and the
    /// integer bin was returned unchanged.
    pub refined: bool,
}

impl RefinedPeak {
    fn unrefined(bin: usize) -> Self {
        Self {
            bin: bin as f64,
            refined: false,
        }
    }
}

/// Parabolic interpolation through the log-powers of `bin - 1`, `bin`, `bin + 1`.
pub fn refine_peak(profile: &RangeProfile, bin: usize) -> RefinedPeak {
    let p = &profile.power;
    if bin == 0 || bin + 1 >= p.len() {
        return RefinedPeak::unrefined(bin);
    }
    let (pl, pc, pr) = (p[bin - 1], p[bin], p[bin + 1]);
    if !(pc >= pl && pc >= pr) || pl <= 0.0 || pr <= 0.0 {
        return RefinedPeak::unrefined(bin);
    }
    let offset = parabolic_offset(pl.ln(), pc.ln(), pr.ln());
    RefinedPeak {
        bin: bin as f64 + offset,
        refined: true,
    }
}

/// Vertex offset of the parabola through `(-1, left)`, `(0, center)`, `(1, right)`.
pub fn parabolic_offset(left: f64, center: f64, right: f64) -> f64 {
    let denom = left - 2.0 * center + right;
    if denom == 0.0 {
        return 0.0;
    }
    (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
}
