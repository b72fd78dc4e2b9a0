//! Minimal SVG line charts for the analysis outputs.

use std::fmt::Write;

use chrono::NaiveDate;

const W: f64 = 860.0;
const H: f64 = 360.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 40.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Line<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

#[derive(Clone, Copy)]
pub enum Marker {
    Up(usize),
    Down(usize),
}

#[derive(Default)]
pub struct Chart<'a> {
    pub title: &'a str,
    pub dates: &'a [NaiveDate],
    pub lines: Vec<Line<'a>>,
    pub markers: Vec<Marker>,
    /// Positions that get a dashed vertical rule.
    pub rules: Vec<usize>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Chart<'_> {
    pub fn render(&self) -> String {
        let n = self.dates.len().max(1);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for l in &self.lines {
            for v in l.values.iter().filter(|v| v.is_finite()) {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let x = |i: usize| {
            LEFT + if n > 1 {
                i as f64 / (n - 1) as f64 * pw
            } else {
                pw / 2.0
            }
        };
        let y = |v: f64| TOP + (hi - v) / (hi - lo) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{LEFT}" y="22" font-size="14">{}</text>"#,
            esc(self.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>"##
        );
        for (v, label) in [(hi, hi), (lo, lo)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.1}" text-anchor="end">{label:.4}</text>"#,
                LEFT - 6.0,
                y(v) + 4.0
            );
        }
        if lo < 0.0 && hi > 0.0 {
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" x2="{}" y1="{:.2}" y2="{:.2}" stroke="#bbb"/>"##,
                LEFT + pw,
                y(0.0),
                y(0.0)
            );
        }
        if let (Some(first), Some(last)) = (self.dates.first(), self.dates.last()) {
            let _ = writeln!(s, r#"<text x="{LEFT}" y="{}">{first}</text>"#, H - 16.0);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">{last}</text>"#,
                LEFT + pw,
                H - 16.0
            );
        }
        for &i in &self.rules {
            let _ = writeln!(
                s,
                r##"<line x1="{0:.2}" x2="{0:.2}" y1="{TOP}" y2="{1}" stroke="#999" stroke-dasharray="3,3"/>"##,
                x(i),
                TOP + ph
            );
        }
        for (k, l) in self.lines.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let mut pts = String::new();
            for (i, v) in l.values.iter().enumerate().filter(|(_, v)| v.is_finite()) {
                let _ = write!(pts, "{:.2},{:.2} ", x(i), y(*v));
            }
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.trim_end()
            );
            let ly = TOP + 14.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{0}" x2="{1}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{2}" y="{3}">{4}</text>"#,
                W - RIGHT + 12.0,
                W - RIGHT + 30.0,
                W - RIGHT + 36.0,
                ly + 4.0,
                esc(l.name)
            );
        }
        if let Some(base) = self.lines.first() {
            for m in &self.markers {
                let (i, up) = match *m {
                    Marker::Up(i) => (i, true),
                    Marker::Down(i) => (i, false),
                };
                let Some(v) = base.values.get(i) else {
                    continue;
                };
                let (cx, cy) = (x(i), y(*v));
                let (dy, color) = if up {
                    (-6.0, "#d62728")
                } else {
                    (6.0, "#2ca02c")
                };
                let _ = writeln!(
                    s,
                    r#"<path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z" fill="{color}"/>"#,
                    cx - 4.0,
                    cy + dy,
                    cx + 4.0,
                    cy + dy,
                    cx,
                    cy
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}
