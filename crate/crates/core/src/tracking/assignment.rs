//! Global-nearest-neighbor association.
//!
//! Track-to-measurement costs are squared Mahalanobis distances. Pairs above
//! the gate are forbidden. Among all one-to-one matchings that use only
//! allowed pairs, the solver picks the one with the most pairs and, among
//! those, the lowest total cost. This is solved exactly with the
//! shortest-augmenting-path Hungarian method by pricing forbidden pairs above
//! any achievable allowed total.

use super::kalman::mahalanobis_sq;
use super::{Track, TrackerParams};
use crate::error::Result;
use crate::localization::CandidatePoint;

/// Minimum-cost assignment of every row of a `rows × cols` matrix
/// (`rows <= cols`) to a distinct column. Returns the column of each row.
fn hungarian(cost: &[Vec<f64>], cols: usize) -> Vec<usize> {
    let rows = cost.len();
    debug_assert!(rows <= cols);
    // 1-based potentials; column 0 is the virtual start.
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];

    for i in 1..=rows {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut min_v = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < min_v[j] {
                    min_v[j] = reduced;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0usize; rows];
    for j in 1..=cols {
        if owner[j] > 0 {
            col_of_row[owner[j] - 1] = j - 1;
        }
    }
    col_of_row
}

/// Gated optimal assignment on a dense cost matrix.
///
/// `cost[i][j]` is allowed when it is finite and `<= gate`. Returns
/// `(row, col)` pairs sorted by row: maximum number of allowed pairs first,
/// then minimum total cost.
pub fn solve_gated(cost: &[Vec<f64>], gate: f64) -> Vec<(usize, usize)> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|r| r.len() == cols));

    let allowed = |c: f64| c.is_finite() && c <= gate;
    let max_allowed = cost
        .iter()
        .flatten()
        .copied()
        .filter(|&c| allowed(c))
        .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.max(c))));
    let Some(max_allowed) = max_allowed else {
        return Vec::new();
    };
    let min_allowed = cost
        .iter()
        .flatten()
        .copied()
        .filter(|&c| allowed(c))
        .fold(f64::INFINITY, f64::min);

    // Shift allowed costs to be non-negative; a forbidden pair then costs
    // more than any full set of allowed pairs.
    let k = rows.min(cols) as f64;
    let span = max_allowed - min_allowed;
    let forbidden = (k + 1.0) * (span + 1.0);
    let priced = |c: f64| {
        if allowed(c) {
            c - min_allowed
        } else {
            forbidden
        }
    };

    let transposed = rows > cols;
    let (n, m) = if transposed { (cols, rows) } else { (rows, cols) };
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let (i, j) = if transposed { (b, a) } else { (a, b) };
                    priced(cost[i][j])
                })
                .collect()
        })
        .collect();

    let mut pairs: Vec<(usize, usize)> = hungarian(&matrix, m)
        .into_iter()
        .enumerate()
        .map(|(a, b)| if transposed { (b, a) } else { (a, b) })
        .filter(|&(i, j)| allowed(cost[i][j]))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Result of associating one frame of measurements with the current tracks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Association {
    /// `(track index, measurement index)`, sorted by track index.
    pub pairs: Vec<(usize, usize)>,
    pub unassigned_tracks: Vec<usize>,
    pub unassigned_measurements: Vec<usize>,
}

impl Association {
    pub fn from_pairs(pairs: Vec<(usize, usize)>, n_tracks: usize, n_measurements: usize) -> Self {
        let mut track_used = vec![false; n_tracks];
        let mut meas_used = vec![false; n_measurements];
        for &(t, m) in &pairs {
            track_used[t] = true;
            meas_used[m] = true;
        }
        let unused = |used: Vec<bool>| {
            used.into_iter()
                .enumerate()
                .filter_map(|(i, u)| (!u).then_some(i))
                .collect()
        };
        Self {
            pairs,
            unassigned_tracks: unused(track_used),
            unassigned_measurements: unused(meas_used),
        }
    }

    /// Measurement assigned to track `t`, if any.
    pub fn measurement_for(&self, t: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(ti, _)| ti == t).map(|&(_, m)| m)
    }
}

/// Mahalanobis cost of every measurement against every (predicted) track.
pub fn cost_matrix(
    tracks: &[Track],
    measurements: &[CandidatePoint],
    params: &TrackerParams,
) -> Result<Vec<Vec<f64>>> {
    tracks
        .iter()
        .map(|t| {
            measurements
                .iter()
                .map(|z| mahalanobis_sq(t, (z.x_m, z.y_m), params))
                .collect()
        })
        .collect()
}

pub fn gnn_associate(
    tracks: &[Track],
    measurements: &[CandidatePoint],
    params: &TrackerParams,
) -> Result<Association> {
    let cost = cost_matrix(tracks, measurements, params)?;
    let pairs = solve_gated(&cost, params.gate_threshold());
    Ok(Association::from_pairs(pairs, tracks.len(), measurements.len()))
}
