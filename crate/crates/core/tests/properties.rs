use fmcw_bilat::radar::beat_frequency;
use fmcw_bilat::tracking::gnn_associate;
use fmcw_bilat::{
    bilaterate, ca_cfar, pair_detections, prune, CandidatePoint, CfarParams, Detection,
    GeometryConfig, RadarConfig, RadarId, RangeProfile, Track, TrackStatus, TrackerParams,
    WindowKind,
};
use nalgebra::{Matrix4, Vector4};
use proptest::prelude::*;

fn profile(power: Vec<f64>) -> RangeProfile {
    RangeProfile {
        radar_id: RadarId::One,
        frame_index: 0,
        power,
        window_kind: WindowKind::Rectangular,
    }
}

fn det(radar_id: RadarId, range_m: f64) -> Detection {
    Detection {
        radar_id,
        frame_index: 0,
        bin: 0,
        refined_bin: 0.0,
        range_m,
        intensity: 1.0,
    }
}

fn point(x: f64, y: f64) -> CandidatePoint {
    CandidatePoint {
        frame_index: 0,
        x_m: x,
        y_m: y,
        r1_m: x.hypot(y),
        r2_m: (x - 0.2).hypot(y),
        intensity: 1.0,
    }
}

proptest! {
    #[test]
    fn beat_frequency_is_linear(r in 0.0f64..2.7) {
        let c = RadarConfig::default();
        let one = beat_frequency(r, &c).unwrap();
        let two = beat_frequency(2.0 * r, &c).unwrap();
        prop_assert!((two - 2.0 * one).abs() <= 1e-12 * two.max(1.0));
    }

    #[test]
    fn cfar_is_scale_invariant(
        power in prop::collection::vec(1e-3f64..100.0, 17..160),
        exponent in -6.0f64..6.0,
    ) {
        let params = CfarParams::default();
        let base = profile(power);
        let alpha = 10f64.powf(exponent);
        let scaled = profile(base.power.iter().map(|p| p * alpha).collect());
        let a = ca_cfar(&base, &params).unwrap();
        let b = ca_cfar(&scaled, &params).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(prune(&a, &base), prune(&b, &scaled));
    }

    #[test]
    fn prune_keeps_one_maximum_per_run(
        power in prop::collection::vec(0.0f64..10.0, 1..80),
        mask in prop::collection::vec(any::<bool>(), 80),
    ) {
        let raw: Vec<usize> = (0..power.len()).filter(|&i| mask[i]).collect();
        let runs = raw.windows(2).filter(|w| w[1] != w[0] + 1).count() + usize::from(!raw.is_empty());
        let p = profile(power);
        let peaks = prune(&raw, &p);
        prop_assert_eq!(peaks.len(), runs);
        prop_assert!(peaks.windows(2).all(|w| w[0] < w[1]));
        for &k in &peaks {
            prop_assert!(raw.contains(&k));
            // walk the run containing k
            let mut lo = k;
            while lo > 0 && raw.contains(&(lo - 1)) {
                lo -= 1;
            }
            let mut hi = k;
            while raw.contains(&(hi + 1)) {
                hi += 1;
            }
            for j in lo..=hi {
                prop_assert!(p.power[j] < p.power[k] || (p.power[j] == p.power[k] && j >= k));
            }
        }
    }

    #[test]
    fn bilateration_round_trip(x in -2.0f64..2.2, y in 0.1f64..5.0, d in 0.05f64..1.0) {
        let (ex, ey) = bilaterate(x.hypot(y), (x - d).hypot(y), d).unwrap();
        prop_assert!((ex - x).abs() <= 1e-9 * x.abs().max(1.0));
        prop_assert!((ey - y).abs() <= 1e-9 * y);
    }

    #[test]
    fn bilateration_mirror_symmetry(r1 in 0.3f64..5.0, delta in -0.2f64..0.2) {
        let d = 0.2;
        let r2 = r1 + delta;
        let (x, y) = bilaterate(r1, r2, d).unwrap();
        let (mx, my) = bilaterate(r2, r1, d).unwrap();
        prop_assert!((mx - (d - x)).abs() <= 1e-12);
        prop_assert!((my - y).abs() <= 1e-12);
    }

    #[test]
    fn separated_ranges_make_no_ghosts(
        targets in prop::collection::vec((-2.0f64..2.2, 0.3f64..5.0), 1..5),
    ) {
        let g = GeometryConfig::default();
        let slack = RadarConfig::default().range_resolution();
        let d = g.baseline_m();
        let r1: Vec<f64> = targets.iter().map(|&(x, y)| x.hypot(y)).collect();
        let r2: Vec<f64> = targets.iter().map(|&(x, y)| (x - d).hypot(y)).collect();
        let separated = (0..targets.len()).all(|i| {
            (0..targets.len()).all(|j| i == j || (r1[i] - r2[j]).abs() > d + slack)
        });
        prop_assume!(separated);
        let dets1: Vec<_> = r1.iter().map(|&r| det(RadarId::One, r)).collect();
        let dets2: Vec<_> = r2.iter().map(|&r| det(RadarId::Two, r)).collect();
        let p = pair_detections(&dets1, &dets2, &g, slack);
        prop_assert_eq!(p.candidates.len(), targets.len());
        for (c, &(x, y)) in p.candidates.iter().zip(&targets) {
            prop_assert!((c.x_m - x).abs() < 1e-9 && (c.y_m - y).abs() < 1e-9);
        }
    }

    #[test]
    fn gnn_ignores_measurement_order(
        tracks in prop::collection::vec((-2.0f64..2.0, 0.5f64..5.0), 1..5),
        meas in prop::collection::vec((-2.0f64..2.0, 0.5f64..5.0), 1..6),
        rotate in 0usize..6,
    ) {
        let params = TrackerParams::default();
        let cov = Matrix4::from_diagonal(&Vector4::new(0.3, 0.3, 1.0, 1.0));
        let tracks: Vec<Track> = tracks
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Track::new(i as u64 + 1, Vector4::new(x, y, 0.0, 0.0), cov, TrackStatus::Confirmed))
            .collect();
        let points: Vec<CandidatePoint> = meas.iter().map(|&(x, y)| point(x, y)).collect();
        let mut shuffled = points.clone();
        shuffled.rotate_left(rotate % points.len());
        shuffled.reverse();

        let a = gnn_associate(&tracks, &points, &params).unwrap();
        let b = gnn_associate(&tracks, &shuffled, &params).unwrap();
        let mut by_value_a: Vec<(usize, (u64, u64))> = a.pairs.iter()
            .map(|&(t, m)| (t, (points[m].x_m.to_bits(), points[m].y_m.to_bits())))
            .collect();
        let mut by_value_b: Vec<(usize, (u64, u64))> = b.pairs.iter()
            .map(|&(t, m)| (t, (shuffled[m].x_m.to_bits(), shuffled[m].y_m.to_bits())))
            .collect();
        by_value_a.sort();
        by_value_b.sort();
        prop_assert_eq!(by_value_a, by_value_b);
    }
}
