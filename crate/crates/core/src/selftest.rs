//! Built-in invariant checks behind the `selftest` subcommand.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::config::PipelineConfig;
use crate::detection::ca_cfar;
use crate::localization::bilaterate;
use crate::radar::{Frame, RadarId};
use crate::range::{range_profile, RangeProfile, WindowKind};
use crate::tracking::solve_gated;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

const SEED: u64 = 0x5E1F_7E57;

pub fn run(config: &PipelineConfig) -> Report {
    Report {
        checks: vec![
            parseval(config),
            bilateration_round_trip(config),
            cfar_false_alarm_rate(config),
            gnn_vs_brute_force(config),
        ],
    }
}

fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * i % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

fn parseval(config: &PipelineConfig) -> Check {
    let n = config.radar.samples_per_chirp();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_parseval = 0.0f64;
    let mut worst_dft = 0.0f64;
    for window in [WindowKind::Rectangular, WindowKind::Hann] {
        for trial in 0..5 {
            let samples: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let frame = Frame {
                radar_id: RadarId::One,
                frame_index: trial,
                samples,
            };
            let profile = range_profile(&frame, window);
            let w = window.coefficients(n);
            let time_energy: f64 = frame
                .samples
                .iter()
                .zip(&w)
                .map(|(s, w)| (s * w).norm_sqr())
                .sum();
            let freq_energy: f64 = profile.power.iter().sum();
            worst_parseval = worst_parseval
                .max(((freq_energy - n as f64 * time_energy) / (n as f64 * time_energy)).abs());

            let windowed: Vec<Complex64> = frame.samples.iter().zip(&w).map(|(s, w)| s * w).collect();
            let peak = profile.power.iter().copied().fold(0.0, f64::max);
            for (p, x) in profile.power.iter().zip(direct_dft(&windowed)) {
                worst_dft = worst_dft.max((p - x.norm_sqr()).abs() / peak);
            }
        }
    }
    Check {
        name: "parseval",
        passed: worst_parseval < 1e-9 && worst_dft < 1e-9,
        detail: format!(
            "max relative energy error {worst_parseval:.3e}, max FFT-vs-DFT error {worst_dft:.3e}"
        ),
    }
}

fn bilateration_round_trip(config: &PipelineConfig) -> Check {
    let d = config.geometry.baseline_m();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..1000 {
        let x = rng.random_range(-2.0..2.0 + d);
        let y = rng.random_range(0.1..=5.0);
        let r1 = x.hypot(y);
        let r2 = (x - d).hypot(y);
        match bilaterate(r1, r2, d) {
            Ok((ex, ey)) => worst = worst.max((ex - x).hypot(ey - y)),
            Err(_) => failures += 1,
        }
    }
    Check {
        name: "bilateration round trip",
        passed: failures == 0 && worst < 1e-9,
        detail: format!("1000 targets, max position error {worst:.3e} m, {failures} infeasible"),
    }
}

fn cfar_false_alarm_rate(config: &PipelineConfig) -> Check {
    let cells = 100_000;
    let pfa = config.cfar.probability_false_alarm();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let profile = RangeProfile {
        radar_id: RadarId::One,
        frame_index: 0,
        power: (0..cells).map(|_| Exp1.sample(&mut rng)).collect(),
        window_kind: WindowKind::Rectangular,
    };
    match ca_cfar(&profile, &config.cfar) {
        Ok(hits) => {
            let rate = hits.len() as f64 / cells as f64;
            Check {
                name: "CFAR false-alarm rate",
                passed: rate >= 0.5 * pfa && rate <= 2.0 * pfa,
                detail: format!(
                    "{} of {cells} noise cells, measured {rate:.3e} vs configured {pfa:.3e}",
                    hits.len()
                ),
            }
        }
        Err(e) => Check {
            name: "CFAR false-alarm rate",
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Lowest (unassigned count, total cost) over all permutations of a square matrix.
fn brute_force(cost: &[Vec<f64>], gate: f64) -> (usize, f64) {
    fn go(cost: &[Vec<f64>], gate: f64, row: usize, used: &mut Vec<bool>, acc: (usize, f64), best: &mut (usize, f64)) {
        if row == cost.len() {
            if acc.0 < best.0 || (acc.0 == best.0 && acc.1 < best.1) {
                *best = acc;
            }
            return;
        }
        for j in 0..cost.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            let c = cost[row][j];
            let next = if c <= gate { (acc.0, acc.1 + c) } else { (acc.0 + 1, acc.1) };
            go(cost, gate, row + 1, used, next, best);
            used[j] = false;
        }
    }
    let mut best = (usize::MAX, f64::INFINITY);
    go(cost, gate, 0, &mut vec![false; cost.len()], (0, 0.0), &mut best);
    best
}

fn gnn_vs_brute_force(config: &PipelineConfig) -> Check {
    let gate = config.tracker.gate_threshold();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let instances = 100;
    let mut matches = 0;
    for _ in 0..instances {
        let cost: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..4).map(|_| rng.random_range(0.0..2.0 * gate)).collect())
            .collect();
        let pairs = solve_gated(&cost, gate);
        let total: f64 = pairs.iter().map(|&(i, j)| cost[i][j]).sum();
        let (unassigned, best) = brute_force(&cost, gate);
        if 4 - pairs.len() == unassigned && (total - best).abs() <= 1e-9 * best.max(1.0) {
            matches += 1;
        }
    }
    Check {
        name: "GNN optimality",
        passed: matches == instances,
        detail: format!("{matches}/{instances} random 4x4 gated instances match brute force"),
    }
}
