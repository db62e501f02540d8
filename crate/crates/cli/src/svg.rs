//! Minimal SVG figures. Presentation only.

use std::fmt::Write as _;

const SIZE: f64 = 480.0;
const PAD: f64 = 24.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            return Frame { x0: 0.0, y0: 0.0, scale: 1.0 };
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        Frame { x0, y0, scale: (SIZE - 2.0 * PAD) / span }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (PAD + (x - self.x0) * self.scale, SIZE - PAD - (y - self.y0) * self.scale)
    }
}

fn header() -> String {
    format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n")
}

/// Images as dots (boundary ones filled red) and the hull as a polygon.
pub fn scatter_hull(points: &[((f64, f64), bool)], hull: &[(f64, f64)]) -> String {
    let frame = Frame::fit(points.iter().map(|p| p.0).chain(hull.iter().copied()));
    let mut out = header();
    if !hull.is_empty() {
        let pts: Vec<String> = hull
            .iter()
            .map(|&p| {
                let (x, y) = frame.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(out, "<polygon points=\"{}\" fill=\"#dde8f6\" stroke=\"#2b5c9e\" stroke-width=\"1.5\"/>", pts.join(" "));
    }
    for &(p, boundary) in points {
        let (x, y) = frame.map(p);
        let fill = if boundary { "#c0392b" } else { "#333333" };
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{fill}\"/>");
    }
    out.push_str("</svg>\n");
    out
}

fn color(t: f64) -> String {
    // t in [-1, 1]: blue through white to red.
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// One dot per site at its planar position, coloured by a signed log scale.
pub fn heatmap(cells: &[((f64, f64), f64)]) -> String {
    let frame = Frame::fit(cells.iter().map(|c| c.0));
    let squash = |v: f64| v.signum() * (1.0 + v.abs()).ln();
    let top = cells.iter().map(|c| squash(c.1).abs()).fold(0.0, f64::max).max(1e-12);
    let r = (0.45 * frame.scale).clamp(1.0, 12.0);
    let mut out = header();
    for &(p, v) in cells {
        let (x, y) = frame.map(p);
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" fill=\"{}\"/>", color(squash(v) / top));
    }
    out.push_str("</svg>\n");
    out
}
