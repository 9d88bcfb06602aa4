//! Minimal SVG line charts of sweep summaries.

use std::fmt::Write as _;

use multigroup::experiments::{summarize, Metric, MetricsRecord};
use multigroup::Modality;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub metric: Metric,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl PlotSpec {
    pub fn for_metric(metric: Metric) -> Self {
        Self {
            metric,
            title: format!("{metric} by network size"),
            x_label: "network size n".into(),
            y_label: metric.as_str().into(),
        }
    }
}

/// One point of a series: size, mean and 95% half width (0 when undefined).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub n: usize,
    pub mean: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub modality: Modality,
    pub points: Vec<Point>,
}

pub fn color(m: Modality) -> &'static str {
    match m {
        Modality::Bridge => "#d62728",
        Modality::EdgeBundle => "#9467bd",
        Modality::Comembership => "#2ca02c",
        Modality::Liaison => "#1f77b4",
    }
}

/// Per-modality series of `metric`, ordered by size.
pub fn series(records: &[MetricsRecord], metric: Metric) -> Vec<Series> {
    let rows = summarize(records);
    Modality::ALL
        .into_iter()
        .filter_map(|modality| {
            let points: Vec<Point> = rows
                .iter()
                .filter(|r| r.modality == modality && r.metric == metric.as_str())
                .map(|r| Point {
                    n: r.n,
                    mean: r.mean,
                    half_width: r.ci95_half_width.unwrap_or(0.0),
                })
                .collect();
            (!points.is_empty()).then_some(Series { modality, points })
        })
        .collect()
}

/// Tick positions covering `[lo, hi]` with a 1-2-5 step.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|f| f * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn frame(data: &[Series]) -> Frame {
    let pts = data.iter().flat_map(|s| &s.points);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts {
        x0 = x0.min(p.n as f64);
        x1 = x1.max(p.n as f64);
        y0 = y0.min(p.mean - p.half_width);
        y1 = y1.max(p.mean + p.half_width);
    }
    if x1 <= x0 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if y1 <= y0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    Frame {
        x0,
        x1,
        y0: y0 - pad,
        y1: y1 + pad,
    }
}

/// Renders the chart; an empty `data` yields axes with a "no data" note.
pub fn render_svg(spec: &PlotSpec, data: &[Series]) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        xml_escape(&spec.title)
    )
    .unwrap();

    let f = frame(data);
    let (left, right, top, bottom) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    writeln!(
        w,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    if data.is_empty() {
        writeln!(
            w,
            r#"<text x="{}" y="{}" text-anchor="middle">no data</text>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        )
        .unwrap();
    } else {
        for t in nice_ticks(f.x0, f.x1, 8) {
            let x = f.px(t);
            writeln!(
                w,
                r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                bottom + 5.0,
                bottom + 18.0,
                fmt_tick(t)
            )
            .unwrap();
        }
        for t in nice_ticks(f.y0, f.y1, 6) {
            let y = f.py(t);
            writeln!(
                w,
                r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/><line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="gainsboro"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                left - 5.0,
                left - 8.0,
                y + 4.0,
                fmt_tick(t)
            )
            .unwrap();
        }
    }
    writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        HEIGHT - 15.0,
        xml_escape(&spec.x_label)
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        (top + bottom) / 2.0,
        xml_escape(&spec.y_label)
    )
    .unwrap();

    for s in data {
        let c = color(s.modality);
        let upper = s.points.iter().map(|p| (f.px(p.n as f64), f.py(p.mean + p.half_width)));
        let lower = s.points.iter().rev().map(|p| (f.px(p.n as f64), f.py(p.mean - p.half_width)));
        let band: Vec<String> = upper.chain(lower).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        writeln!(
            w,
            r#"<polygon class="ci {}" points="{}" fill="{c}" fill-opacity="0.2" stroke="none"/>"#,
            s.modality,
            band.join(" ")
        )
        .unwrap();
        let line: Vec<String> = s
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", f.px(p.n as f64), f.py(p.mean)))
            .collect();
        writeln!(
            w,
            r#"<polyline class="series {}" points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
            s.modality,
            line.join(" ")
        )
        .unwrap();
    }

    let lx = right - 150.0;
    for (i, s) in data.iter().enumerate() {
        let y = top + 15.0 + 18.0 * i as f64;
        writeln!(
            w,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            color(s.modality),
            lx + 32.0,
            y + 4.0,
            s.modality
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
