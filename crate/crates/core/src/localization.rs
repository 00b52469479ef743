//! Two-circle intersection and cross-radar pairing.
//!
//! With radar 1 at the origin and radar 2 at `(d, 0)`:
//!
//! ```text
//! x = (R1² - R2² + d²) / 2d
//! y = sqrt(R1² - x²)
//! ```
//!
//! Only the `y >= 0` root is kept; the radars look into the upper half-plane.

use std::fmt;

use crate::detection::Detection;
use crate::radar::GeometryConfig;

/// The two range circles do not meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Infeasible;

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("range circles do not intersect")
    }
}

impl std::error::Error for Infeasible {}

/// Position of a reflector at range `r1_m` from radar 1 and `r2_m` from radar 2.
///
/// Radicands down to `-1e-12·R1²` are treated as tangency and clamped to `y = 0`.
pub fn bilaterate(r1_m: f64, r2_m: f64, d_m: f64) -> Result<(f64, f64), Infeasible> {
    if !(r1_m >= 0.0 && r2_m >= 0.0 && d_m > 0.0) {
        return Err(Infeasible);
    }
    let x = ((r1_m - r2_m) * (r1_m + r2_m) + d_m * d_m) / (2.0 * d_m);
    let r1_sq = r1_m * r1_m;
    let radicand = (r1_m - x) * (r1_m + x);
    if radicand < -1e-12 * r1_sq {
        return Err(Infeasible);
    }
    Ok((x, radicand.max(0.0).sqrt()))
}

/// An `(x, y)` intersection built from one radar-1 and one radar-2 detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidatePoint {
    pub frame_index: u64,
    pub x_m: f64,
    pub y_m: f64,
    pub r1_m: f64,
    pub r2_m: f64,
    pub intensity: f64,
}

impl CandidatePoint {
    /// Both range circles pass through the point within `tol` relative error.
    pub fn is_consistent(&self, d_m: f64, tol: f64) -> bool {
        let scale = self.r1_m.max(self.r2_m).max(f64::MIN_POSITIVE);
        let e1 = (self.x_m.hypot(self.y_m) - self.r1_m).abs();
        let e2 = ((self.x_m - d_m).hypot(self.y_m) - self.r2_m).abs();
        e1 <= tol * scale && e2 <= tol * scale
    }
}

/// Candidates from one frame plus rejection counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Pairing {
    pub candidates: Vec<CandidatePoint>,
    /// Pairs whose range difference exceeded `d + slack`.
    pub gated: usize,
    /// Pairs that passed the gate but whose circles do not meet.
    pub infeasible: usize,
}

/// Relative tolerance of the per-candidate circle check.
pub const CONSISTENCY_TOL: f64 = 1e-6;

/// Bilaterates every radar-1/radar-2 detection pair whose range difference
/// is at most `baseline + slack_m`, in `(i, j)` order.
///
/// A detection may appear in several candidates. Pairs of different targets
/// that pass the gate yield ghosts; the tracker is expected to reject them.
pub fn pair_detections(
    dets1: &[Detection],
    dets2: &[Detection],
    geometry: &GeometryConfig,
    slack_m: f64,
) -> Pairing {
    let d = geometry.baseline_m();
    let mut out = Pairing::default();
    for a in dets1 {
        for b in dets2 {
            if (a.range_m - b.range_m).abs() > d + slack_m {
                out.gated += 1;
                continue;
            }
            let Ok((x, y)) = bilaterate(a.range_m, b.range_m, d) else {
                out.infeasible += 1;
                continue;
            };
            let candidate = CandidatePoint {
                frame_index: a.frame_index,
                x_m: x,
                y_m: y,
                r1_m: a.range_m,
                r2_m: b.range_m,
                intensity: a.intensity.min(b.intensity),
            };
            if candidate.is_consistent(d, CONSISTENCY_TOL) {
                out.candidates.push(candidate);
            } else {
                out.infeasible += 1;
            }
        }
    }
    out
}
