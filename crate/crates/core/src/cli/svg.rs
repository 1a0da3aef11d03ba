//! Minimal SVG 1.1 plots: axes, ticks, points with error bars, one line.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Axis transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisScale {
    Linear,
    Log,
}

impl AxisScale {
    fn map(self, v: f64) -> f64 {
        match self {
            AxisScale::Linear => v,
            AxisScale::Log => v.log10(),
        }
    }
}

/// A point with a symmetric error bar (`err` may be 0).
#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub err: f64,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: AxisScale,
    pub y_scale: AxisScale,
    pub points: Vec<Point>,
    /// Straight line in the transformed coordinates: `Y = slope X + intercept`,
    /// with `X, Y` in natural log for log axes.
    pub line: Option<(f64, f64)>,
}

/// Tick positions inside `[lo, hi]` (data units).
fn ticks(lo: f64, hi: f64, scale: AxisScale) -> Vec<f64> {
    match scale {
        AxisScale::Log => {
            let mut out = Vec::new();
            let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
            for e in a..=b {
                for m in [1.0, 2.0, 5.0] {
                    let v = m * 10f64.powi(e);
                    if v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12) {
                        out.push(v);
                    }
                }
            }
            out
        }
        AxisScale::Linear => {
            let raw = (hi - lo) / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let mut v = (lo / step).ceil() * step;
            let mut out = Vec::new();
            while v <= hi + 1e-9 * step {
                out.push(v);
                v += step;
            }
            out
        }
    }
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else {
        format!("{}", (v * 1e6).round() / 1e6)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> String {
        let usable: Vec<Point> = self
            .points
            .iter()
            .copied()
            .filter(|p| {
                p.x.is_finite()
                    && p.y.is_finite()
                    && (self.x_scale == AxisScale::Linear || p.x > 0.0)
                    && (self.y_scale == AxisScale::Linear || p.y > 0.0)
            })
            .collect();
        let mut svg = String::new();
        let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        if usable.is_empty() {
            let _ = writeln!(svg, "</svg>");
            return svg;
        }
        let lo_of = |v: f64, e: f64, s: AxisScale| if s == AxisScale::Log && v - e <= 0.0 { v } else { v - e };
        let mut xlo = usable.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let mut xhi = usable.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let mut ylo = usable.iter().map(|p| lo_of(p.y, p.err, self.y_scale)).fold(f64::INFINITY, f64::min);
        let mut yhi = usable.iter().map(|p| p.y + p.err).fold(f64::NEG_INFINITY, f64::max);
        let pad = |lo: &mut f64, hi: &mut f64, s: AxisScale| match s {
            AxisScale::Log => {
                *lo /= 1.25;
                *hi *= 1.25;
            }
            AxisScale::Linear => {
                let d = if *hi > *lo { 0.05 * (*hi - *lo) } else { 0.5 * lo.abs().max(1.0) };
                *lo -= d;
                *hi += d;
            }
        };
        pad(&mut xlo, &mut xhi, self.x_scale);
        pad(&mut ylo, &mut yhi, self.y_scale);
        let (fx0, fx1) = (self.x_scale.map(xlo), self.x_scale.map(xhi));
        let (fy0, fy1) = (self.y_scale.map(ylo), self.y_scale.map(yhi));
        let px = |x: f64| LEFT + (self.x_scale.map(x) - fx0) / (fx1 - fx0) * (WIDTH - LEFT - RIGHT);
        let py = |y: f64| HEIGHT - BOTTOM - (self.y_scale.map(y) - fy0) / (fy1 - fy0) * (HEIGHT - TOP - BOTTOM);
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            svg,
            r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
        );
        for t in ticks(xlo, xhi, self.x_scale) {
            let x = px(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
                y0 + 5.0,
                y0 + 18.0,
                label(t)
            );
        }
        for t in ticks(ylo, yhi, self.y_scale) {
            let y = py(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                y + 4.0,
                label(t)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{0}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {0})">{1}</text>"#,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );
        if let Some((slope, intercept)) = self.line {
            let nat = |x: f64, s: AxisScale| if s == AxisScale::Log { x.ln() } else { x };
            let from_nat = |y: f64, s: AxisScale| if s == AxisScale::Log { y.exp() } else { y };
            let xa = usable.first().map(|p| p.x).unwrap_or(xlo);
            let xb = usable.last().map(|p| p.x).unwrap_or(xhi);
            let ya = from_nat(slope * nat(xa, self.x_scale) + intercept, self.y_scale);
            let yb = from_nat(slope * nat(xb, self.x_scale) + intercept, self.y_scale);
            if ya.is_finite() && yb.is_finite() && (self.y_scale == AxisScale::Linear || (ya > 0.0 && yb > 0.0)) {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-width="1.5"/>"#,
                    px(xa),
                    py(ya),
                    px(xb),
                    py(yb)
                );
            }
        }
        for p in &usable {
            let (x, y) = (px(p.x), py(p.y));
            if p.err > 0.0 {
                let lo = lo_of(p.y, p.err, self.y_scale);
                let _ = writeln!(
                    svg,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="steelblue"/>"#,
                    py(lo),
                    py(p.y + p.err)
                );
            }
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="steelblue"/>"#);
        }
        let _ = writeln!(svg, "</svg>");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_ticks() {
        assert_eq!(ticks(30.0, 250.0, AxisScale::Log), vec![50.0, 100.0, 200.0]);
        assert_eq!(ticks(0.0, 1.0, AxisScale::Linear).len(), 6);
    }

    #[test]
    fn renders_points_and_line() {
        let plot = Plot {
            title: "a < b".into(),
            x_label: "n".into(),
            y_label: "median".into(),
            x_scale: AxisScale::Log,
            y_scale: AxisScale::Log,
            points: (1..=5).map(|k| Point { x: 10.0 * k as f64, y: 1.0 / k as f64, err: 0.01 }).collect(),
            line: Some((-1.0, 10f64.ln())),
        };
        let svg = plot.render();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains(r#"version="1.1""#));
        assert_eq!(svg.matches("<circle").count(), 5);
        assert!(svg.contains("firebrick"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
