//! Cell-averaging CFAR, run pruning and near-field blanking.

use crate::error::{Error, Result};
use crate::radar::{GeometryConfig, RadarConfig, RadarId};
use crate::range::{bin_to_range, refine_peak, RangeProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfarParams {
    training_cells_per_side: usize,
    guard_cells_per_side: usize,
    probability_false_alarm: f64,
}

impl CfarParams {
    pub const DEFAULT_TRAINING_CELLS_PER_SIDE: usize = 6;
    pub const DEFAULT_GUARD_CELLS_PER_SIDE: usize = 2;
    pub const DEFAULT_PROBABILITY_FALSE_ALARM: f64 = 1e-3;

    pub fn new(
        training_cells_per_side: usize,
        guard_cells_per_side: usize,
        probability_false_alarm: f64,
    ) -> Result<Self> {
        if training_cells_per_side == 0 {
            return Err(Error::invalid("cfar.training_cells_per_side", "must be >= 1"));
        }
        if !(probability_false_alarm > 0.0 && probability_false_alarm < 1.0) {
            return Err(Error::invalid(
                "cfar.probability_false_alarm",
                "must lie in (0, 1)",
            ));
        }
        Ok(Self {
            training_cells_per_side,
            guard_cells_per_side,
            probability_false_alarm,
        })
    }

    pub fn training_cells_per_side(&self) -> usize {
        self.training_cells_per_side
    }

    pub fn guard_cells_per_side(&self) -> usize {
        self.guard_cells_per_side
    }

    pub fn probability_false_alarm(&self) -> f64 {
        self.probability_false_alarm
    }

    /// Cells spanned by one test window: both training bands, both guard bands and the cell under test.
    pub fn window_len(&self) -> usize {
        2 * (self.training_cells_per_side + self.guard_cells_per_side) + 1
    }

    /// Threshold multiplier for the full two-sided window.
    pub fn scale_factor(&self) -> f64 {
        cfar_scale_factor(2 * self.training_cells_per_side, self.probability_false_alarm)
    }

    /// Errors when a profile of `len` bins cannot hold one full window.
    pub fn check_len(&self, len: usize) -> Result<()> {
        if self.window_len() > len {
            return Err(Error::ProfileTooShort {
                len,
                window: self.window_len(),
            });
        }
        Ok(())
    }
}

impl Default for CfarParams {
    fn default() -> Self {
        Self {
            training_cells_per_side: Self::DEFAULT_TRAINING_CELLS_PER_SIDE,
            guard_cells_per_side: Self::DEFAULT_GUARD_CELLS_PER_SIDE,
            probability_false_alarm: Self::DEFAULT_PROBABILITY_FALSE_ALARM,
        }
    }
}

/// `α = N_t (P_fa^(-1/N_t) - 1)`, exact for exponentially distributed cells.
pub fn cfar_scale_factor(training_cells: usize, probability_false_alarm: f64) -> f64 {
    let nt = training_cells as f64;
    nt * (probability_false_alarm.powf(-1.0 / nt) - 1.0)
}

/// Bins whose power exceeds `α` times the mean of their training cells.
///
/// Near either end of the profile only the training cells that exist are
/// averaged and `α` is recomputed for that smaller count.
pub fn ca_cfar(profile: &RangeProfile, params: &CfarParams) -> Result<Vec<usize>> {
    let power = &profile.power;
    let n = power.len();
    params.check_len(n)?;

    let train = params.training_cells_per_side;
    let gap = params.guard_cells_per_side + 1;
    let full_alpha = params.scale_factor();

    let mut hits = Vec::new();
    for k in 0..n {
        let mut sum = 0.0;
        let mut count = 0usize;
        // leading side: k-gap-train+1 ..= k-gap
        if k >= gap {
            let hi = k - gap;
            let lo = (k + 1).saturating_sub(gap + train);
            sum += power[lo..=hi].iter().sum::<f64>();
            count += hi - lo + 1;
        }
        // trailing side: k+gap ..= k+gap+train-1
        if k + gap < n {
            let lo = k + gap;
            let hi = (k + gap + train - 1).min(n - 1);
            sum += power[lo..=hi].iter().sum::<f64>();
            count += hi - lo + 1;
        }
        if count == 0 {
            continue;
        }
        let alpha = if count == 2 * train {
            full_alpha
        } else {
            cfar_scale_factor(count, params.probability_false_alarm)
        };
        if power[k] > alpha * (sum / count as f64) {
            hits.push(k);
        }
    }
    Ok(hits)
}

/// Collapses each run of consecutive bins to its strongest member.
pub fn prune(raw_bins: &[usize], profile: &RangeProfile) -> Vec<usize> {
    let mut bins = raw_bins.to_vec();
    bins.sort_unstable();
    bins.dedup();

    let mut peaks = Vec::new();
    let mut run_best: Option<usize> = None;
    let mut prev: Option<usize> = None;
    for &b in &bins {
        if prev.is_some_and(|p| b != p + 1) {
            peaks.extend(run_best.take());
        }
        run_best = match run_best {
            Some(best) if profile.power[best] >= profile.power[b] => Some(best),
            _ => Some(b),
        };
        prev = Some(b);
    }
    peaks.extend(run_best);
    peaks
}

/// A pruned per-radar target report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub radar_id: RadarId,
    pub frame_index: u64,
    pub bin: usize,
    pub refined_bin: f64,
    pub range_m: f64,
    pub intensity: f64,
}

pub fn blank_near_field(detections: Vec<Detection>, geometry: &GeometryConfig) -> Vec<Detection> {
    detections
        .into_iter()
        .filter(|d| d.range_m >= geometry.min_range_m())
        .collect()
}

/// CFAR, pruning, sub-bin refinement and near-field blanking for one profile.
pub fn detect(
    profile: &RangeProfile,
    params: &CfarParams,
    geometry: &GeometryConfig,
    config: &RadarConfig,
) -> Result<Vec<Detection>> {
    let raw = ca_cfar(profile, params)?;
    let detections = prune(&raw, profile)
        .into_iter()
        .map(|bin| {
            let refined = refine_peak(profile, bin);
            Ok(Detection {
                radar_id: profile.radar_id,
                frame_index: profile.frame_index,
                bin,
                refined_bin: refined.bin,
                range_m: bin_to_range(refined.bin, config)?,
                intensity: profile.power[bin],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(blank_near_field(detections, geometry))
}
