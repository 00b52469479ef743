use std::fs;

use fmcw_bilat::io;
use fmcw_bilat::pipeline::{self, CANDIDATES_FILE, DETECTIONS_FILE, FRAMES_FILE, MAP_FILE, TRACKS_FILE};
use fmcw_bilat::radar::{echo_amplitude, noise_power_for_snr};
use fmcw_bilat::{CandidatePoint, PipelineConfig, RadarId, Target, TrackStatus, Tracker};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn two_reflectors() -> (PipelineConfig, Vec<Target>) {
    let targets = vec![
        Target::stationary(1, -0.30, 1.50, 20.0),
        Target::stationary(2, 0.50, 2.00, 20.0),
    ];
    let config = PipelineConfig {
        noise_power: noise_power_for_snr(echo_amplitude(20.0, 2.0), 20.0),
        seed: 17,
        ..PipelineConfig::default()
    };
    (config, targets)
}

#[test]
fn fifty_frames_make_a_hundred_records() {
    let (config, targets) = two_reflectors();
    let dir = tempfile::tempdir().unwrap();
    let frames = pipeline::simulate(&config, &targets).unwrap();
    let path = pipeline::write_frames_file(dir.path(), &frames).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 100);
    let first: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(first.len(), 2 + 2 * config.radar.samples_per_chirp());
    assert_eq!(&first[..2], &["0", "1"]);

    let again = pipeline::simulate(&config, &targets).unwrap();
    let path2 = pipeline::write_frames_file(&dir.path().join("again"), &again).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(path2).unwrap());
}

#[test]
fn empty_noiseless_scene_writes_zeros() {
    let config = PipelineConfig {
        noise_power: 0.0,
        frames: 3,
        ..PipelineConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let frames = pipeline::simulate(&config, &[]).unwrap();
    let path = pipeline::write_frames_file(dir.path(), &frames).unwrap();
    for line in fs::read_to_string(path).unwrap().lines() {
        assert!(line.split(',').skip(2).all(|v| v == "0.000000"), "{line}");
    }
}

#[test]
fn empty_scene_gives_header_only_tracks_and_empty_map() {
    let config = PipelineConfig {
        frames: 10,
        ..PipelineConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let out = pipeline::run_scene(&config, &[]).unwrap();
    pipeline::write_outputs(dir.path(), &config, &out, false).unwrap();
    let tracks = fs::read_to_string(dir.path().join(TRACKS_FILE)).unwrap();
    assert_eq!(tracks, format!("{}\n", io::TRACKS_HEADER));
    let map = fs::read_to_string(dir.path().join(MAP_FILE)).unwrap();
    assert!(map.starts_with("<svg") && map.trim_end().ends_with("</svg>"));
    assert_eq!(map.matches("class=\"track\"").count(), 0);
    assert_eq!(map.matches("class=\"radar\"").count(), 2);
}

#[test]
fn stages_through_files_equal_the_monolithic_run() {
    let (config, targets) = two_reflectors();
    let dir = tempfile::tempdir().unwrap();
    let staged = dir.path().join("staged");
    let whole = dir.path().join("whole");

    // simulate -> frames.csv
    let frames = pipeline::simulate(&config, &targets).unwrap();
    pipeline::write_frames_file(&staged, &frames).unwrap();
    // detect from the file
    let frames = io::read_frames(staged.join(FRAMES_FILE)).unwrap();
    let (_, dets) = pipeline::detect_frames(&config, &frames).unwrap();
    pipeline::write_detections_file(&staged, &dets).unwrap();
    // localize from the file
    let dets = io::read_detections(staged.join(DETECTIONS_FILE)).unwrap();
    let localized = pipeline::localize(&config, &dets);
    pipeline::write_candidates_file(&staged, &localized.candidates).unwrap();
    // track from the file
    let cands = io::read_candidates(staged.join(CANDIDATES_FILE)).unwrap();
    let rows = pipeline::track(&config, &cands, config.frames as u64).unwrap();
    pipeline::write_tracks_file(&staged, &rows, false).unwrap();

    let out = pipeline::run_scene(&config, &targets).unwrap();
    pipeline::write_outputs(&whole, &config, &out, false).unwrap();

    for name in [DETECTIONS_FILE, CANDIDATES_FILE, TRACKS_FILE] {
        let a = fs::read(staged.join(name)).unwrap();
        let b = fs::read(whole.join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn outputs_reparse_to_the_written_values() {
    let (config, targets) = two_reflectors();
    let dir = tempfile::tempdir().unwrap();
    let frames = pipeline::simulate(&config, &targets).unwrap();
    pipeline::write_frames_file(dir.path(), &frames).unwrap();
    let out = pipeline::run(&config, &frames).unwrap();
    pipeline::write_outputs(dir.path(), &config, &out, true).unwrap();

    assert_eq!(io::read_frames(dir.path().join(FRAMES_FILE)).unwrap(), frames);
    assert_eq!(io::read_detections(dir.path().join(DETECTIONS_FILE)).unwrap(), out.detections);
    assert_eq!(
        io::read_candidates(dir.path().join(CANDIDATES_FILE)).unwrap(),
        out.localized.candidates
    );
    let rows = io::read_tracks(dir.path().join(TRACKS_FILE)).unwrap();
    let expected: Vec<_> = pipeline::confirmed_rows(&out.track_rows, true)
        .into_iter()
        .map(|mut r| {
            r.track.x_m = io::q6(r.track.x_m);
            r.track.y_m = io::q6(r.track.y_m);
            r.track.vx_m_s = io::q6(r.track.vx_m_s);
            r.track.vy_m_s = io::q6(r.track.vy_m_s);
            r
        })
        .collect();
    assert_eq!(rows, expected);

    let scene = dir.path().join("scene.csv");
    let mut buf = Vec::new();
    io::write_scene(&mut buf, &targets).unwrap();
    fs::write(&scene, buf).unwrap();
    assert_eq!(io::read_scene(&scene).unwrap(), targets);
}

#[test]
fn both_radars_see_both_reflectors() {
    let (config, targets) = two_reflectors();
    let out = pipeline::run_scene(&config, &targets).unwrap();
    let dr = config.radar.range_resolution();
    for radar in RadarId::BOTH {
        let pos = config.geometry.radar_position(radar);
        for t in &targets {
            let r = t.range_from(pos, 0.0);
            let hits = out
                .detections
                .iter()
                .filter(|d| d.radar_id == radar && (d.range_m - r).abs() < dr)
                .count();
            assert_eq!(hits, config.frames, "radar {radar}, target {}", t.id);
        }
    }
}

#[test]
fn stationary_target_tracking_beats_raw_measurements() {
    let config = PipelineConfig::default();
    let noise = Normal::new(0.0, 0.02).unwrap();
    let (mut raw_sq, mut est_sq, mut n) = (0.0, 0.0, 0);
    for run in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(run);
        let mut tracker = Tracker::new(config.tracker);
        let mut confirmed_ids = Vec::new();
        for k in 0..10 {
            let z = (0.4 + noise.sample(&mut rng), 2.1 + noise.sample(&mut rng));
            let c = CandidatePoint {
                frame_index: k,
                x_m: z.0,
                y_m: z.1,
                r1_m: z.0.hypot(z.1),
                r2_m: (z.0 - 0.2).hypot(z.1),
                intensity: 1.0,
            };
            let report = tracker.step(&[c], config.frame_period_s).unwrap();
            for t in report.tracks.iter().filter(|t| t.status == TrackStatus::Confirmed) {
                confirmed_ids.push(t.track_id);
                est_sq += (t.x_m - 0.4).powi(2) + (t.y_m - 2.1).powi(2);
                raw_sq += (z.0 - 0.4).powi(2) + (z.1 - 2.1).powi(2);
                n += 1;
            }
        }
        confirmed_ids.dedup();
        assert_eq!(confirmed_ids, vec![1], "run {run}");
    }
    assert!(n > 0);
    assert!(est_sq <= raw_sq, "track {:.4} vs raw {:.4}", (est_sq / n as f64).sqrt(), (raw_sq / n as f64).sqrt());
}
