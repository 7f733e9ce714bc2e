//! Deterministic SVG rendering of coefficient grids and curves.
//!
//! A coefficient grid becomes one cell per lattice site, time to the right
//! and frequency up. Cell backgrounds are shaded by sublattice parity. Each
//! visible amplitude gets a disk of radius ∝ |f_{m,n}|, split by a diameter
//! into a black and a white half. Zero phase puts the black half at the
//! bottom, and the diameter turns counterclockwise with Arg(f_{m,n}).
//!
//! Output is byte-stable: numbers carry six significant digits and
//! elements are emitted in a fixed order (backgrounds row-major, axes,
//! markers row-major).

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::frame::CoeffGrid;
use crate::VERSION;

/// Presentation parameters for grid and curve plots.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    /// Pixels per lattice step √π.
    pub cell_px: f64,
    /// Marker radius per unit |f|, as a fraction of `cell_px`.
    pub radius_scale: f64,
    /// Radius multiplier.
    pub magnify: f64,
    /// Gray levels (fraction of white) for the parity classes
    /// (even, even), (even, odd), (odd, even), (odd, odd) of (m, n).
    pub grayscale: [f64; 4],
    /// Amplitudes below this are not drawn.
    pub visibility_floor: f64,
    pub show_axes: bool,
    /// Curve plot size in pixels.
    pub plot_width: f64,
    pub plot_height: f64,
    /// Curve points below this y are dropped, leaving a gap.
    pub y_floor: Option<f64>,
    pub x_label: String,
    pub y_label: String,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            cell_px: 40.0,
            radius_scale: 0.45,
            magnify: 1.0,
            grayscale: [0.95, 0.85, 0.75, 0.65],
            visibility_floor: 1e-4,
            show_axes: true,
            plot_width: 640.0,
            plot_height: 400.0,
            y_floor: None,
            x_label: "t".into(),
            y_label: "dB".into(),
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cell_px", self.cell_px),
            ("radius_scale", self.radius_scale),
            ("magnify", self.magnify),
            ("plot_width", self.plot_width),
            ("plot_height", self.plot_height),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Argument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.visibility_floor >= 0.0 && self.visibility_floor.is_finite()) {
            return Err(Error::Argument("visibility floor must be non-negative".into()));
        }
        let g = self.grayscale;
        if g.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Argument("gray levels must lie in [0, 1]".into()));
        }
        let levels: Vec<u8> = g.iter().map(|&v| gray_byte(v)).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                if levels[i] == levels[j] {
                    return Err(Error::Argument(
                        "the four sublattices need distinct gray levels".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn gray_for(&self, m: i64, n: i64) -> u8 {
        let class = 2 * m.rem_euclid(2) + n.rem_euclid(2);
        gray_byte(self.grayscale[class as usize])
    }
}

/// A rendered SVG document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Svg {
    pub text: String,
    /// Number of amplitude markers (grid plots) or polylines (curve plots).
    pub elements: usize,
    /// Markers whose radius was clipped to half a cell.
    pub clipped: usize,
}

impl Svg {
    /// Adds a comment line after the metadata comment. `--` sequences are
    /// broken up so the comment stays well formed.
    pub fn annotate(&mut self, note: &str) {
        let safe = note.replace("--", "- -").replace('\n', " ");
        let line = format!("<!-- {safe} -->\n");
        let at = self
            .text
            .find("-->\n")
            .map_or(self.text.len(), |i| i + 4);
        self.text.insert_str(at, &line);
    }
}

/// A labelled curve for [`render_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

fn gray_byte(level: f64) -> u8 {
    (level * 255.0).round() as u8
}

/// Formats with six significant digits in fixed notation, trimming
/// trailing zeros.
pub(crate) fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 15) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn header(out: &mut String, width: f64, height: f64, comment: &str) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let (w, h) = (num(width), num(height));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w}px\" height=\"{h}px\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(out, "<!-- tflattice {VERSION} {comment} -->");
}

/// Renders a coefficient grid as the semicircle lattice plot.
pub fn render_grid(g: &CoeffGrid, style: &RenderStyle) -> Result<Svg> {
    style.validate()?;
    let cell = style.cell_px;
    let (mm, nn) = (g.m_max() as i64, g.n_max() as i64);
    let pad = cell;
    let width = 2.0 * pad + (2 * mm + 1) as f64 * cell;
    let height = 2.0 * pad + (2 * nn + 1) as f64 * cell;
    let center = |m: i64, n: i64| {
        (
            pad + ((m + mm) as f64 + 0.5) * cell,
            pad + ((nn - n) as f64 + 0.5) * cell,
        )
    };

    let mut markers = String::new();
    let (mut count, mut clipped) = (0, 0);
    for (m, n, z) in g.iter() {
        let amp = z.norm();
        if amp < style.visibility_floor || amp == 0.0 {
            continue;
        }
        let mut frac = style.radius_scale * style.magnify * amp;
        if frac > 0.5 {
            frac = 0.5;
            clipped += 1;
        }
        count += 1;
        let (x, y) = center(m, n);
        let r = num(frac * cell);
        let angle = num(-z.arg() * 180.0 / PI);
        let _ = writeln!(
            markers,
            "<g transform=\"translate({} {}) rotate({angle})\">\
             <circle r=\"{r}\" fill=\"#ffffff\"/>\
             <circle r=\"{r}\" fill=\"#000000\" clip-path=\"url(#lower-half)\"/></g>",
            num(x),
            num(y)
        );
    }

    let mut out = String::new();
    let comment = format!(
        "coefficient plot M={mm} N={nn} cell_px={} radius_scale={} magnify={} \
         floor={} gray={},{},{},{} markers={count} clipped={clipped}",
        num(cell),
        num(style.radius_scale),
        num(style.magnify),
        num(style.visibility_floor),
        num(style.grayscale[0]),
        num(style.grayscale[1]),
        num(style.grayscale[2]),
        num(style.grayscale[3]),
    );
    header(&mut out, width, height, &comment);
    out.push_str(
        "<defs><clipPath id=\"lower-half\" clipPathUnits=\"objectBoundingBox\">\
         <rect x=\"0\" y=\"0.5\" width=\"1\" height=\"0.5\"/></clipPath></defs>\n",
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");

    out.push_str("<g id=\"cells\" stroke=\"none\">\n");
    for (m, n, _) in g.iter() {
        let (x, y) = center(m, n);
        let gray = style.gray_for(m, n);
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{c}\" height=\"{c}\" fill=\"#{gray:02x}{gray:02x}{gray:02x}\"/>",
            num(x - 0.5 * cell),
            num(y - 0.5 * cell),
            c = num(cell),
        );
    }
    out.push_str("</g>\n");

    if style.show_axes {
        let (ox, oy) = center(0, 0);
        let font = num(0.4 * cell);
        let _ = writeln!(
            out,
            "<g id=\"axes\" stroke=\"#404040\" stroke-width=\"1\" font-family=\"serif\" font-size=\"{font}\">\n\
             <line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\"/>\n\
             <line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" stroke=\"none\" fill=\"#000000\">t</text>\n\
             <text x=\"{}\" y=\"{}\" stroke=\"none\" fill=\"#000000\">ω</text>\n</g>",
            num(0.5 * pad),
            num(width - 0.5 * pad),
            num(0.5 * pad),
            num(height - 0.5 * pad),
            num(width - 0.5 * pad),
            num(oy - 0.15 * cell),
            num(ox + 0.15 * cell),
            num(0.5 * pad),
            x = num(ox),
            y = num(oy),
        );
    }

    out.push_str("<g id=\"markers\" stroke=\"#000000\" stroke-width=\"0.75\">\n");
    out.push_str(&markers);
    out.push_str("</g>\n</svg>\n");
    Ok(Svg {
        text: out,
        elements: count,
        clipped,
    })
}

/// Splits a point list into finite runs, dropping non-finite points and
/// points below `floor`.
fn segments(points: &[(f64, f64)], floor: Option<f64>) -> Vec<Vec<(f64, f64)>> {
    let mut runs = Vec::new();
    let mut cur = Vec::new();
    for &(x, y) in points {
        let keep = x.is_finite() && y.is_finite() && floor.map_or(true, |f| y >= f);
        if keep {
            cur.push((x, y));
        } else if !cur.is_empty() {
            runs.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs
}

/// Tick positions at a 1-2-5 step covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let base = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|k| k * base)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * base);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

/// Renders a polyline plot of `points` with optional overlay curves.
/// Non-finite points (such as −∞ attenuation) break the line.
pub fn render_curve(points: &[(f64, f64)], style: &RenderStyle, overlays: &[Curve]) -> Result<Svg> {
    style.validate()?;
    let main = segments(points, style.y_floor);
    if main.iter().map(Vec::len).sum::<usize>() < 2 {
        return Err(Error::Argument("a curve needs at least two finite points".into()));
    }
    let extra: Vec<Vec<Vec<(f64, f64)>>> = overlays
        .iter()
        .map(|c| segments(&c.points, style.y_floor))
        .collect();

    let all = main.iter().chain(extra.iter().flatten()).flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }

    let (w, h) = (style.plot_width, style.plot_height);
    let (left, right, top, bottom) = (60.0, 20.0, 20.0, 40.0);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| top + (y1 - y) / (y1 - y0) * (h - top - bottom);

    let mut out = String::new();
    let comment = format!(
        "curve plot points={} overlays={} x=[{}, {}] y=[{}, {}]",
        points.len(),
        overlays.len(),
        num(x0),
        num(x1),
        num(y0),
        num(y1)
    );
    header(&mut out, w, h, &comment);
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");

    if style.show_axes {
        out.push_str(
            "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n",
        );
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\"/>",
            num(left),
            num(top),
            num(w - left - right),
            num(h - top - bottom)
        );
        for t in ticks(x0, x1) {
            let x = num(px(t));
            let _ = writeln!(
                out,
                "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\"/>\
                 <text x=\"{x}\" y=\"{}\" stroke=\"none\" text-anchor=\"middle\">{}</text>",
                num(h - bottom),
                num(h - bottom + 4.0),
                num(h - bottom + 16.0),
                num(t)
            );
        }
        for t in ticks(y0, y1) {
            let y = num(py(t));
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\"/>\
                 <text x=\"{}\" y=\"{y}\" stroke=\"none\" text-anchor=\"end\">{}</text>",
                num(left - 4.0),
                num(left),
                num(left - 6.0),
                num(t)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" stroke=\"none\" text-anchor=\"middle\">{}</text>\n\
             <text x=\"14\" y=\"{}\" stroke=\"none\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n</g>",
            num(left + 0.5 * (w - left - right)),
            num(h - 6.0),
            escape(&style.x_label),
            num(top + 0.5 * (h - top - bottom)),
            num(top + 0.5 * (h - top - bottom)),
            escape(&style.y_label),
        );
    }

    let mut lines = 0;
    let mut polyline = |out: &mut String, run: &[(f64, f64)], attrs: &str| {
        let pts: Vec<String> = run
            .iter()
            .map(|&(x, y)| format!("{},{}", num(px(x)), num(py(y))))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" {attrs} points=\"{}\"/>",
            pts.join(" ")
        );
        lines += 1;
    };
    for (curve, runs) in overlays.iter().zip(&extra) {
        let attrs = if curve.dashed {
            "stroke=\"#606060\" stroke-width=\"1.25\" stroke-dasharray=\"6 4\""
        } else {
            "stroke=\"#606060\" stroke-width=\"1.25\""
        };
        for run in runs {
            polyline(&mut out, run, attrs);
        }
    }
    for run in &main {
        polyline(&mut out, run, "stroke=\"#000000\" stroke-width=\"1.75\"");
    }

    if !overlays.is_empty() {
        out.push_str("<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n");
        for (i, curve) in overlays.iter().enumerate() {
            let y = top + 14.0 * (i + 1) as f64;
            let dash = if curve.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#606060\"{dash}/>\
                 <text x=\"{}\" y=\"{}\">{}</text>",
                num(w - right - 130.0),
                num(w - right - 105.0),
                num(w - right - 100.0),
                num(y + 4.0),
                escape(&curve.label),
                y = num(y),
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(Svg {
        text: out,
        elements: lines,
        clipped: 0,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(40.0), "40");
        assert_eq!(num(1.23456789), "1.23457");
        assert_eq!(num(-90.0), "-90");
        assert_eq!(num(0.000123456789), "0.000123457");
        assert_eq!(num(123456789.0), "123456789");
        assert_eq!(num(-1e-20), "0");
    }

    #[test]
    fn zero_grid_has_no_markers() {
        let svg = render_grid(&CoeffGrid::zeros(2, 3), &RenderStyle::default()).unwrap();
        assert_eq!(svg.elements, 0);
        assert_eq!(svg.text.matches("<circle").count(), 0);
        assert_eq!(svg.text.matches("height=\"40\" fill=").count(), 5 * 7);
    }

    #[test]
    fn unit_origin_marker_points_down() {
        let mut g = CoeffGrid::zeros(1, 1);
        g.set(0, 0, Complex64::new(1.0, 0.0));
        let svg = render_grid(&g, &RenderStyle::default()).unwrap();
        assert_eq!(svg.elements, 1);
        // Origin cell center of a 3×3 grid with one-cell padding.
        assert!(svg.text.contains("translate(100 100) rotate(0)"), "{}", svg.text);
        assert!(svg.text.contains("r=\"18\""));

        g.set(0, 0, Complex64::new(0.0, 1.0));
        let svg = render_grid(&g, &RenderStyle::default()).unwrap();
        assert!(svg.text.contains("rotate(-90)"));
    }

    #[test]
    fn parity_classes_get_distinct_grays() {
        let svg = render_grid(&CoeffGrid::zeros(1, 1), &RenderStyle::default()).unwrap();
        for gray in ["f2f2f2", "d9d9d9", "bfbfbf", "a6a6a6"] {
            assert!(svg.text.contains(gray), "missing {gray}");
        }
        let style = RenderStyle {
            grayscale: [0.9, 0.9, 0.5, 0.4],
            ..RenderStyle::default()
        };
        assert!(render_grid(&CoeffGrid::zeros(1, 1), &style).is_err());
    }

    #[test]
    fn oversized_markers_are_clipped_and_flagged() {
        let mut g = CoeffGrid::zeros(1, 1);
        g.set(1, 0, Complex64::new(2.0, 0.0));
        let svg = render_grid(&g, &RenderStyle::default()).unwrap();
        assert_eq!(svg.clipped, 1);
        assert!(svg.text.contains("clipped=1"));
        assert!(svg.text.contains("r=\"20\""));
    }

    #[test]
    fn two_points_make_one_segment() {
        let svg = render_curve(&[(0.0, 0.0), (1.0, 1.0)], &RenderStyle::default(), &[]).unwrap();
        assert_eq!(svg.elements, 1);
        let line = svg.text.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap();
        assert_eq!(pts.trim_end_matches("\"/>").split(' ').count(), 2);
    }

    #[test]
    fn infinite_points_break_the_line() {
        let pts = [(0.0, 0.0), (1.0, -1.0), (2.0, f64::NEG_INFINITY), (3.0, -2.0), (4.0, -3.0)];
        let svg = render_curve(&pts, &RenderStyle::default(), &[]).unwrap();
        assert_eq!(svg.elements, 2);
        assert!(render_curve(&pts[..1], &RenderStyle::default(), &[]).is_err());
    }

    #[test]
    fn overlays_are_dashed() {
        let overlay = Curve {
            label: "approx <3>".into(),
            points: vec![(0.0, 0.0), (1.0, -2.0)],
            dashed: true,
        };
        let svg = render_curve(&[(0.0, 0.0), (1.0, -1.0)], &RenderStyle::default(), &[overlay])
            .unwrap();
        assert_eq!(svg.elements, 2);
        assert!(svg.text.contains("stroke-dasharray"));
        assert!(svg.text.contains("approx &lt;3&gt;"));
    }

    #[test]
    fn annotation_follows_the_metadata_comment() {
        let mut svg = render_grid(&CoeffGrid::zeros(0, 0), &RenderStyle::default()).unwrap();
        svg.annotate("command: tflattice plot --magnify 30");
        let lines: Vec<&str> = svg.text.lines().collect();
        assert!(lines[2].starts_with("<!-- tflattice"));
        assert_eq!(lines[3], "<!-- command: tflattice plot - -magnify 30 -->");
    }

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(ticks(-95.0, 0.0), vec![-80.0, -60.0, -40.0, -20.0, 0.0]);
    }
}
