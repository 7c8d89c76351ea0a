//! Minimal SVG 1.1 line plot: axes with ticks, a shaded band, a curve and
//! point markers.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// `(x, lower, upper)` triples.
    pub band: &'a [(f64, f64, f64)],
    pub curve: &'a [(f64, f64)],
    pub points: &'a [(f64, f64)],
}

struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

pub fn render(plot: &Plot<'_>) -> String {
    let xs = plot
        .band
        .iter()
        .map(|b| b.0)
        .chain(plot.curve.iter().map(|c| c.0))
        .chain(plot.points.iter().map(|p| p.0));
    let (x_lo, x_hi) = extent(xs.chain(std::iter::once(0.0)));
    let ys = plot
        .band
        .iter()
        .flat_map(|b| [b.1, b.2])
        .chain(plot.curve.iter().map(|c| c.1))
        .chain(plot.points.iter().map(|p| p.1));
    let (y_lo, y_hi) = extent(ys.chain(std::iter::once(0.0)));
    let pad = 0.05 * (y_hi - y_lo);
    let sx = Scale {
        lo: x_lo,
        hi: x_hi,
        from: MARGIN_LEFT,
        to: WIDTH - MARGIN_RIGHT,
    };
    let sy = Scale {
        lo: y_lo,
        hi: y_hi + pad,
        from: HEIGHT - MARGIN_BOTTOM,
        to: MARGIN_TOP,
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        plot.title
    );

    if !plot.band.is_empty() {
        let mut pts: Vec<String> = plot
            .band
            .iter()
            .map(|&(x, _, hi)| format!("{:.2},{:.2}", sx.map(x), sy.map(hi)))
            .collect();
        pts.extend(
            plot.band
                .iter()
                .rev()
                .map(|&(x, lo, _)| format!("{:.2},{:.2}", sx.map(x), sy.map(lo))),
        );
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#c8c8c8" stroke="none"/>"##,
            pts.join(" ")
        );
    }

    // axes
    let (x0, x1) = (sx.map(x_lo), sx.map(x_hi));
    let (y0, y1) = (sy.map(y_lo), sy.map(y_hi + pad));
    let _ = writeln!(
        s,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>
<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let xv = x_lo + (x_hi - x_lo) * i as f64 / TICKS as f64;
        let px = sx.map(xv);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 20.0,
            fmt_tick(xv)
        );
        let yv = y_lo + (y_hi - y_lo) * i as f64 / TICKS as f64;
        let py = sy.map(yv);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            fmt_tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>
<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        plot.x_label,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        plot.y_label
    );

    if !plot.curve.is_empty() {
        let pts: Vec<String> = plot
            .curve
            .iter()
            .filter(|c| c.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx.map(x), sy.map(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    for &(x, y) in plot.points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="none" stroke="black"/>"#,
            sx.map(x),
            sy.map(y)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_band_curve_and_points() {
        let band = [(1.0, 0.5, 1.5), (2.0, 0.8, 2.0)];
        let curve = [(0.0, 0.0), (2.0, 1.2)];
        let points = [(1.0, 1.0), (2.0, 1.1)];
        let svg = render(&Plot {
            title: "t",
            x_label: "h",
            y_label: "g",
            band: &band,
            curve: &curve,
            points: &points,
        });
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("<polyline"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
