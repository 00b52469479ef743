//! Minimal SVG plots: the x-y track map and per-radar range profiles.

use std::fmt::Write;

use crate::config::PipelineConfig;
use crate::detection::Detection;
use crate::io::TrackRow;
use crate::radar::RadarId;
use crate::range::RangeProfile;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Linear map from a world rectangle onto a pixel rectangle (y up).
struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + (1.0 - (y - self.y0) / (self.y1 - self.y0)) * self.height
    }

    fn frame(&self, out: &mut String, xlabel: &str, ylabel: &str, xstep: f64, ystep: f64) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        writeln!(
            out,
            r##"<rect x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#333"/>"##
        )
        .unwrap();
        for x in ticks(self.x0, self.x1, xstep) {
            let px = self.px(x);
            let bottom = t + h;
            writeln!(
                out,
                r##"<line x1="{px:.2}" y1="{t:.2}" x2="{px:.2}" y2="{bottom:.2}" stroke="#ddd"/>"##
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                bottom + 14.0,
                tick_label(x)
            )
            .unwrap();
        }
        for y in ticks(self.y0, self.y1, ystep) {
            let py = self.py(y);
            writeln!(
                out,
                r##"<line x1="{l:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/>"##,
                l + w
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                l - 6.0,
                py + 4.0,
                tick_label(y)
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{xlabel}</text>"#,
            l + w / 2.0,
            t + h + 32.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
            l - 38.0,
            t + h / 2.0,
            l - 38.0,
            t + h / 2.0
        )
        .unwrap();
    }
}

fn ticks(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.1}");
    s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="20" font-size="15" text-anchor="middle">{title}</text>"#,
        width / 2.0
    )
    .unwrap();
}

/// Cartesian scatter of confirmed track positions over the fixed viewport
/// `[-R_max, R_max + d] × [0, R_max]`.
pub fn track_map(config: &PipelineConfig, rows: &[TrackRow]) -> String {
    let r_max = config.radar.max_unambiguous_range();
    let d = config.geometry.baseline_m();
    let (x0, x1, y0, y1) = (-r_max, r_max + d, 0.0, r_max);
    let height_px = 360.0;
    let width_px = height_px * (x1 - x0) / (y1 - y0);
    let axes = Axes {
        x0,
        x1,
        y0,
        y1,
        left: 60.0,
        top: 32.0,
        width: width_px,
        height: height_px,
    };

    let mut out = String::new();
    header(&mut out, width_px + 80.0, height_px + 80.0, "Confirmed tracks");
    axes.frame(&mut out, "x [m]", "y [m]", 1.0, 1.0);

    for radar in RadarId::BOTH {
        let (rx, ry) = config.geometry.radar_position(radar);
        writeln!(
            out,
            r##"<rect class="radar" x="{:.2}" y="{:.2}" width="6" height="6" fill="#000"/>"##,
            axes.px(rx) - 3.0,
            axes.py(ry) - 6.0
        )
        .unwrap();
    }
    for r in rows {
        let t = &r.track;
        let color = PALETTE[(t.track_id as usize).wrapping_sub(1) % PALETTE.len()];
        writeln!(
            out,
            r#"<circle class="track" data-track="{}" data-frame="{}" cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#,
            t.track_id,
            r.frame_index,
            axes.px(t.x_m),
            axes.py(t.y_m)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Range profiles in dB relative to each profile's peak, one panel per
/// radar, with that frame's detections marked.
pub fn range_profiles(
    config: &PipelineConfig,
    profiles: &[&RangeProfile],
    detections: &[Detection],
) -> String {
    let panel_w = 560.0;
    let panel_h = 180.0;
    let gap = 70.0;
    let floor_db = -80.0;
    let r_max_cm = config.radar.max_unambiguous_range() * 100.0;
    let bin_cm = config.radar.range_resolution() * 100.0;

    let mut out = String::new();
    let total_h = 40.0 + profiles.len().max(1) as f64 * (panel_h + gap);
    header(&mut out, panel_w + 100.0, total_h, "Range profiles");

    for (i, profile) in profiles.iter().enumerate() {
        let axes = Axes {
            x0: 0.0,
            x1: r_max_cm,
            y0: floor_db,
            y1: 0.0,
            left: 70.0,
            top: 40.0 + i as f64 * (panel_h + gap),
            width: panel_w,
            height: panel_h,
        };
        axes.frame(
            &mut out,
            &format!("Radial distance [cm], radar {}", profile.radar_id),
            "Power [dB]",
            100.0,
            20.0,
        );
        let peak = profile.power.iter().copied().fold(0.0, f64::max);
        let db = |p: f64| {
            if peak > 0.0 && p > 0.0 {
                (10.0 * (p / peak).log10()).max(floor_db)
            } else {
                floor_db
            }
        };
        let mut points = String::new();
        for (k, &p) in profile.power.iter().enumerate() {
            write!(points, "{:.2},{:.2} ", axes.px(k as f64 * bin_cm), axes.py(db(p))).unwrap();
        }
        writeln!(
            out,
            r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1.2" points="{}"/>"##,
            points.trim_end()
        )
        .unwrap();
        for det in detections
            .iter()
            .filter(|d| d.radar_id == profile.radar_id && d.frame_index == profile.frame_index)
        {
            let (cx, cy) = (axes.px(det.range_m * 100.0), axes.py(db(det.intensity)));
            match det.radar_id {
                RadarId::One => writeln!(
                    out,
                    r##"<circle class="detection" cx="{cx:.2}" cy="{cy:.2}" r="3.5" fill="#d62728"/>"##
                ),
                RadarId::Two => writeln!(
                    out,
                    r##"<path class="detection" d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="#d62728" stroke-width="2"/>"##,
                    cx - 4.0,
                    cy - 4.0,
                    cx + 4.0,
                    cy + 4.0,
                    cx - 4.0,
                    cy + 4.0,
                    cx + 4.0,
                    cy - 4.0
                ),
            }
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracking::{TrackSnapshot, TrackStatus};

    #[test]
    fn empty_map_is_well_formed() {
        let svg = track_map(&PipelineConfig::default(), &[]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("x [m]") && svg.contains("y [m]"));
        assert_eq!(svg.matches("class=\"track\"").count(), 0);
    }

    #[test]
    fn map_plots_each_row() {
        let row = |frame, id| TrackRow {
            frame_index: frame,
            track: TrackSnapshot {
                track_id: id,
                status: TrackStatus::Confirmed,
                x_m: 0.5,
                y_m: 2.0,
                vx_m_s: 0.0,
                vy_m_s: 0.0,
            },
        };
        let svg = track_map(&PipelineConfig::default(), &[row(3, 1), row(4, 1), row(4, 2)]);
        assert_eq!(svg.matches("class=\"track\"").count(), 3);
    }

    #[test]
    fn ticks_cover_range() {
        assert_eq!(ticks(-5.5, 5.7, 1.0).len(), 11);
        assert_eq!(tick_label(-3.0), "-3");
        assert_eq!(tick_label(0.5), "0.5");
    }
}
