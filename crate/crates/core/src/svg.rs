//! Static top-down SVG snapshot of an overlay frame.

use std::fmt::Write;

use crate::sector::Sector;
use crate::zones::OverlayFrame;

const SIZE: f64 = 420.0;
const RING_OUTER: f64 = 180.0;
const RING_INNER: f64 = 40.0;

/// Renders the frame as a fixed-size top-down diagram: four wedges around a
/// wearer dot, each filled with its zone color and labeled with tag and
/// distance. Output is deterministic for a given frame.
pub fn overlay_svg(frame: &OverlayFrame) -> String {
    let c = SIZE / 2.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(
        out,
        "  <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{c}\" y=\"18\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">t={} ms</text>",
        frame.timestamp_ms
    );

    // Wedge centers: front up, back down, left to the left, right to the right.
    for entry in &frame.sectors {
        let (start, end) = wedge_angles(entry.sector);
        let (r, g, b) = entry.color.rgb;
        let path = annulus_wedge(c, c, RING_INNER, RING_OUTER, start, end);
        let _ = writeln!(
            out,
            "  <path d=\"{path}\" fill=\"rgb({r},{g},{b})\" stroke=\"#333333\" stroke-width=\"1\"/>"
        );
        let mid = (start + end) / 2.0;
        let (lx, ly) = polar(c, c, (RING_INNER + RING_OUTER) / 2.0, mid);
        let label = match entry.distance_m {
            Some(d) => format!("{} {} {:.2} m", entry.sector, entry.tag, d),
            None => format!("{} {}", entry.sector, entry.tag),
        };
        let _ = writeln!(
            out,
            "  <text x=\"{lx:.1}\" y=\"{ly:.1}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">{label}</text>"
        );
    }

    let _ = writeln!(
        out,
        "  <circle cx=\"{c}\" cy=\"{c}\" r=\"10\" fill=\"#222222\"/>"
    );

    for (i, s) in frame.subjects.iter().enumerate() {
        let y = SIZE - 12.0 * (frame.subjects.len() - i) as f64;
        let (r, g, b) = s.color.rgb;
        let label = match s.distance_m {
            Some(d) => format!("{}: {} {:.2} m", s.subject_id, s.tag, d),
            None => format!("{}: {}", s.subject_id, s.tag),
        };
        let _ = writeln!(
            out,
            "  <text x=\"8\" y=\"{y:.1}\" font-family=\"monospace\" font-size=\"11\" fill=\"rgb({r},{g},{b})\">{label}</text>"
        );
    }

    out.push_str("</svg>\n");
    out
}

fn wedge_angles(sector: Sector) -> (f64, f64) {
    // Degrees, measured clockwise from straight up.
    match sector {
        Sector::Front => (-45.0, 45.0),
        Sector::Right => (45.0, 135.0),
        Sector::Back => (135.0, 225.0),
        Sector::Left => (225.0, 315.0),
    }
}

fn polar(cx: f64, cy: f64, radius: f64, angle_deg: f64) -> (f64, f64) {
    let rad = angle_deg.to_radians();
    (cx + radius * rad.sin(), cy - radius * rad.cos())
}

fn annulus_wedge(cx: f64, cy: f64, r_in: f64, r_out: f64, start: f64, end: f64) -> String {
    let (x0, y0) = polar(cx, cy, r_out, start);
    let (x1, y1) = polar(cx, cy, r_out, end);
    let (x2, y2) = polar(cx, cy, r_in, end);
    let (x3, y3) = polar(cx, cy, r_in, start);
    format!(
        "M {x0:.2} {y0:.2} A {r_out:.2} {r_out:.2} 0 0 1 {x1:.2} {y1:.2} L {x2:.2} {y2:.2} A {r_in:.2} {r_in:.2} 0 0 0 {x3:.2} {y3:.2} Z"
    )
}
