//! CSV and SVG emitters.
//!
//! Numbers in CSV use Rust's shortest round-trip formatting, so identical
//! runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::{CliError, CliResult};

/// A line segment between two points in data coordinates.
pub(crate) type Segment = ((f64, f64), (f64, f64));

pub(crate) struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row<I, T>(&mut self, fields: I)
    where
        I: IntoIterator<Item = T>,
        T: std::fmt::Display,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{f}");
        }
        self.text.push('\n');
    }

    pub fn write(&self, dir: &Path, name: &str) -> CliResult<PathBuf> {
        write_file(dir, name, &self.text)
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub(crate) fn flag(b: bool) -> u8 {
    b as u8
}

/// A fixed-size 2-D plot in data coordinates.
pub(crate) struct Svg {
    width: f64,
    height: f64,
    margin: f64,
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

impl Svg {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        Svg {
            width: 640.0,
            height: 520.0,
            margin: 60.0,
            x: pad(x),
            y: pad(y),
            body: String::new(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.margin + (x - self.x.0) / (self.x.1 - self.x.0) * (self.width - 2.0 * self.margin)
    }

    fn py(&self, y: f64) -> f64 {
        self.height - self.margin - (y - self.y.0) / (self.y.1 - self.y.0) * (self.height - 2.0 * self.margin)
    }

    pub fn axes(&mut self, x_label: &str, y_label: &str) {
        let (l, r) = (self.margin, self.width - self.margin);
        let (t, b) = (self.margin, self.height - self.margin);
        let _ = writeln!(
            self.body,
            r##"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
            r - l,
            b - t
        );
        for k in 0..=4 {
            let fx = self.x.0 + (self.x.1 - self.x.0) * k as f64 / 4.0;
            let fy = self.y.0 + (self.y.1 - self.y.0) * k as f64 / 4.0;
            let (sx, sy) = (self.px(fx), self.py(fy));
            let _ = writeln!(
                self.body,
                r#"<text x="{sx:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
                b + 18.0,
                tick(fx)
            );
            let _ = writeln!(
                self.body,
                r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
                l - 6.0,
                sy + 4.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{x_label}</text>"#,
            (l + r) / 2.0,
            self.height - 15.0
        );
        let _ = writeln!(
            self.body,
            r#"<text x="18" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.2})">{y_label}</text>"#,
            (t + b) / 2.0,
            (t + b) / 2.0
        );
    }

    pub fn title(&mut self, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="30" font-size="15" text-anchor="middle">{text}</text>"#,
            self.width / 2.0
        );
    }

    pub fn rect(&mut self, lo: (f64, f64), hi: (f64, f64), stroke: &str) {
        let (x0, x1) = (self.px(lo.0), self.px(hi.0));
        let (y0, y1) = (self.py(hi.1), self.py(lo.1));
        let _ = writeln!(
            self.body,
            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{stroke}" stroke-width="2"/>"#,
            x1 - x0,
            y1 - y0
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, stroke: &str, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}" stroke="{stroke}"/>"#,
            self.px(x),
            self.py(y)
        );
    }

    pub fn cross(&mut self, x: f64, y: f64, r: f64, stroke: &str) {
        let (cx, cy) = (self.px(x), self.py(y));
        let _ = writeln!(
            self.body,
            r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="{stroke}"/>"#,
            cx - r,
            cy - r,
            cx + r,
            cy + r,
            cx - r,
            cy + r,
            cx + r,
            cy - r
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, dashed: bool) {
        if points.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, &(x, y)) in points.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2} {:.2}",
                if i == 0 { 'M' } else { 'L' },
                self.px(x),
                self.py(y)
            );
        }
        self.path(&d, stroke, dashed);
    }

    pub fn segments(&mut self, segs: &[Segment], stroke: &str, dashed: bool) {
        if segs.is_empty() {
            return;
        }
        let mut d = String::new();
        for &((x0, y0), (x1, y1)) in segs {
            let _ = write!(
                d,
                "M{:.2} {:.2}L{:.2} {:.2}",
                self.px(x0),
                self.py(y0),
                self.px(x1),
                self.py(y1)
            );
        }
        self.path(&d, stroke, dashed);
    }

    fn path(&mut self, d: &str, stroke: &str, dashed: bool) {
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<path d="{d}" fill="none" stroke="{stroke}" stroke-width="2"{dash}/>"#
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Zero-level contour of `values` sampled at grid nodes `xs × ys`
/// (`values[i * ys.len() + j]` at `(xs[i], ys[j])`), by marching squares.
pub(crate) fn contour(xs: &[f64], ys: &[f64], values: &[f64]) -> Vec<Segment> {
    let ny = ys.len();
    let v = |i: usize, j: usize| values[i * ny + j];
    let lerp = |a: (f64, f64, f64), b: (f64, f64, f64)| {
        let t = a.2 / (a.2 - b.2);
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    };
    let mut segs = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        for j in 0..ny.saturating_sub(1) {
            let corners = [
                (xs[i], ys[j], v(i, j)),
                (xs[i + 1], ys[j], v(i + 1, j)),
                (xs[i + 1], ys[j + 1], v(i + 1, j + 1)),
                (xs[i], ys[j + 1], v(i, j + 1)),
            ];
            let mut crossings = Vec::with_capacity(4);
            for k in 0..4 {
                let (a, b) = (corners[k], corners[(k + 1) % 4]);
                if (a.2 >= 0.0) != (b.2 >= 0.0) {
                    crossings.push(lerp(a, b));
                }
            }
            // Saddle cells (four crossings) are split into two segments.
            for pair in crossings.chunks_exact(2) {
                segs.push((pair[0], pair[1]));
            }
        }
    }
    segs
}
