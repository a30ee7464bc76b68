use std::fmt::Write as _;

use adavln_core::geometry::Point2;
use adavln_core::{Scene, TrajectoryLog};

const PX_PER_M: f64 = 60.0;
const PAD: f64 = 24.0;
const HUMAN_COLORS: [&str; 4] = ["#d9822b", "#8e44ad", "#16a085", "#c0392b"];

struct Frame {
    min: Point2,
    height: f64,
}

impl Frame {
    fn map(&self, p: Point2) -> (f64, f64) {
        (PAD + (p.x - self.min.x) * PX_PER_M, PAD + (self.height - (p.y - self.min.y)) * PX_PER_M)
    }

    fn points(&self, pts: impl IntoIterator<Item = Point2>) -> String {
        pts.into_iter()
            .map(|p| {
                let (x, y) = self.map(p);
                format!("{x:.1},{y:.1}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Top-down SVG of the scene with the robot and human paths from `log`.
pub fn render_svg(scene: &Scene, log: &TrajectoryLog) -> String {
    let b = scene.bounds();
    let frame = Frame { min: b.min, height: b.height() };
    let w = b.width() * PX_PER_M + 2.0 * PAD;
    let h = b.height() * PX_PER_M + 2.0 * PAD;
    let ep = &log.header.episode;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&ep.id));
    let (x0, y0) = frame.map(Point2::new(b.min.x, b.max.y));
    let _ = writeln!(
        s,
        r##"<rect x="{x0:.1}" y="{y0:.1}" width="{:.1}" height="{:.1}" fill="#fafafa" stroke="#333" stroke-width="2"/>"##,
        b.width() * PX_PER_M,
        b.height() * PX_PER_M
    );
    for poly in scene.obstacles() {
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#9aa0a6" stroke="#555"/>"##,
            frame.points(poly.vertices().iter().copied())
        );
    }

    let humans = log.records.first().map_or(0, |r| r.humans.len());
    for i in 0..humans {
        let path = log.records.iter().map(|r| r.humans[i].position);
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2" stroke-dasharray="6 4" opacity="0.8"/>"#,
            frame.points(path),
            HUMAN_COLORS[i % HUMAN_COLORS.len()]
        );
        if let Some(last) = log.records.last() {
            let (x, y) = frame.map(last.humans[i].position);
            let r = ep.humans.get(i).map_or(0.3, |h| h.footprint_radius) * PX_PER_M;
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="{r:.1}" fill="{}" opacity="0.35"/>"#,
                HUMAN_COLORS[i % HUMAN_COLORS.len()]
            );
        }
    }

    let robot = std::iter::once(ep.start.position).chain(log.records.iter().map(|r| r.robot.position));
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f5fbf" stroke-width="2.5"/>"##,
        frame.points(robot)
    );
    for r in log.records.iter().filter(|r| r.static_collision || r.human_collision) {
        let (x, y) = frame.map(r.robot.position);
        let color = if r.human_collision { "#e67e22" } else { "#e74c3c" };
        let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.5" fill="{color}"/>"#);
    }

    let (gx, gy) = frame.map(ep.goal);
    let _ = writeln!(
        s,
        r##"<circle cx="{gx:.1}" cy="{gy:.1}" r="{:.1}" fill="none" stroke="#c0392b" stroke-dasharray="4 3"/>"##,
        ep.success_radius * PX_PER_M
    );
    let _ = writeln!(s, r##"<circle cx="{gx:.1}" cy="{gy:.1}" r="6" fill="#c0392b"/>"##);
    let _ = writeln!(s, r##"<text x="{:.1}" y="{:.1}" fill="#c0392b">goal</text>"##, gx + 8.0, gy - 8.0);
    let (sx, sy) = frame.map(ep.start.position);
    let _ = writeln!(s, r##"<circle cx="{sx:.1}" cy="{sy:.1}" r="6" fill="#27ae60"/>"##);
    let _ = writeln!(s, r##"<text x="{:.1}" y="{:.1}" fill="#27ae60">start</text>"##, sx + 8.0, sy - 8.0);
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
