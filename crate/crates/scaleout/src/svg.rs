//! Minimal SVG line charts of sweep results.
//!
//! The x axis is categorical (one evenly spaced slot per distinct value of the
//! swept axis), the y axis is the simulated scaling factor. Measured reference
//! points are drawn as hollow diamonds in the colour of the matching series.
//! Output is a pure function of the rows.

use std::collections::BTreeSet;
use std::fmt::Write;

use scaleout_core::SweepRow;

const WIDTH: f64 = 780.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 560.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 400.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Bandwidth,
    Workers,
    Ratio,
}

impl Axis {
    fn value(self, r: &SweepRow) -> f64 {
        match self {
            Axis::Bandwidth => r.bandwidth_bps,
            Axis::Workers => r.n_workers as f64,
            Axis::Ratio => r.compression_ratio,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Axis::Bandwidth => "bandwidth (Gbps)",
            Axis::Workers => "workers",
            Axis::Ratio => "compression ratio",
        }
    }

    fn tick(self, v: f64) -> String {
        match self {
            Axis::Bandwidth => format!("{}", v / 1e9),
            Axis::Workers => format!("{v}"),
            Axis::Ratio => format!("{v}x"),
        }
    }

    /// The axis with the most distinct values; ties go to bandwidth, then
    /// ratio, then workers.
    pub fn infer(rows: &[SweepRow]) -> Axis {
        let mut best = (Axis::Bandwidth, distinct(rows, |r| r.bandwidth_bps).len());
        for a in [Axis::Ratio, Axis::Workers] {
            let n = distinct(rows, |r| a.value(r)).len();
            if n > best.1 {
                best = (a, n);
            }
        }
        best.0
    }
}

fn distinct(rows: &[SweepRow], f: impl Fn(&SweepRow) -> f64) -> Vec<f64> {
    let mut v: Vec<f64> = rows.iter().map(f).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

struct Series {
    label: String,
    points: Vec<(usize, f64)>,
    markers: Vec<(usize, f64)>,
}

/// A rendered chart and the file-name suffix that distinguishes it from its
/// siblings (empty for a single chart).
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub suffix: String,
    pub svg: String,
}

/// One chart per bandwidth when another axis is swept across several
/// bandwidths; a single chart otherwise.
pub fn charts(rows: &[SweepRow], x: Axis, title: &str) -> Vec<Chart> {
    let bandwidths = distinct(rows, |r| r.bandwidth_bps);
    if x != Axis::Bandwidth && bandwidths.len() > 1 {
        bandwidths
            .iter()
            .map(|&bw| {
                let subset: Vec<SweepRow> = rows
                    .iter()
                    .filter(|r| r.bandwidth_bps == bw)
                    .cloned()
                    .collect();
                let gbps = bw / 1e9;
                Chart {
                    suffix: format!("-{gbps}gbps"),
                    svg: render(&subset, x, &format!("{title} ({gbps} Gbps)")),
                }
            })
            .collect()
    } else {
        vec![Chart {
            suffix: String::new(),
            svg: render(rows, x, title),
        }]
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn group(rows: &[SweepRow], x: Axis, categories: &[f64]) -> Vec<Series> {
    let vary_n = x != Axis::Workers && distinct(rows, |r| r.n_workers as f64).len() > 1;
    let vary_r = x != Axis::Ratio && distinct(rows, |r| r.compression_ratio).len() > 1;
    let vary_bw = x != Axis::Bandwidth && distinct(rows, |r| r.bandwidth_bps).len() > 1;

    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let mut label = r.model.clone();
        if vary_n {
            label += &format!(" N={}", r.n_workers);
        }
        if vary_bw {
            label += &format!(" {}Gbps", r.bandwidth_bps / 1e9);
        }
        if vary_r {
            label += &format!(" {}x", r.compression_ratio);
        }
        let cat = categories
            .iter()
            .position(|&c| c == x.value(r))
            .expect("category derived from the same rows");
        let idx = match out.iter().position(|s| s.label == label) {
            Some(i) => i,
            None => {
                out.push(Series {
                    label,
                    points: Vec::new(),
                    markers: Vec::new(),
                });
                out.len() - 1
            }
        };
        out[idx].points.push((cat, r.f_sim));
        if let Some(m) = r.reference_f {
            out[idx].markers.push((cat, m));
        }
    }
    for s in &mut out {
        s.points.sort_by_key(|p| p.0);
    }
    out
}

fn y_range(series: &[Series]) -> (f64, f64, f64) {
    let lo = series
        .iter()
        .flat_map(|s| s.points.iter().chain(&s.markers).map(|p| p.1))
        .fold(1.0_f64, f64::min);
    let mut y0 = ((lo * 10.0).floor() / 10.0).max(0.0);
    if y0 >= 1.0 {
        y0 = 0.9;
    }
    let span = 1.0 - y0;
    let step = if span <= 0.2 {
        0.02
    } else if span <= 0.5 {
        0.05
    } else {
        0.1
    };
    (y0, 1.0, step)
}

pub fn render(rows: &[SweepRow], x: Axis, title: &str) -> String {
    let categories = distinct(rows, |r| x.value(r));
    let series = group(rows, x, &categories);
    let (y0, y1, step) = y_range(&series);
    let slot = (RIGHT - LEFT) / categories.len().max(1) as f64;
    let px = |c: usize| LEFT + (c as f64 + 0.5) * slot;
    let py = |v: f64| BOTTOM - (v - y0) / (y1 - y0) * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(title)
    );

    // grid and y ticks
    let ticks = ((y1 - y0) / step).round() as usize;
    for k in 0..=ticks {
        let v = y0 + k as f64 * step;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#e0e0e0"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for (i, &c) in categories.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(i),
            BOTTOM + 18.0,
            escape(&x.tick(c))
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{BOTTOM}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0,
        x.label()
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">scaling factor</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(c, v)| format!("{:.2},{:.2}", px(c), py(v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        for &(c, v) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(c),
                py(v)
            );
        }
        for &(c, v) in &ser.markers {
            let (cx, cy) = (px(c), py(v));
            let _ = writeln!(
                s,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="white" stroke="{color}" stroke-width="2"/>"#,
                cx,
                cy - 6.0,
                cx + 6.0,
                cy,
                cx,
                cy + 6.0,
                cx - 6.0,
                cy
            );
        }
        let ly = TOP + 10.0 + i as f64 * 18.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            RIGHT + 20.0,
            RIGHT + 44.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            RIGHT + 50.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    if series.iter().any(|s| !s.markers.is_empty()) {
        let ly = TOP + 10.0 + series.len() as f64 * 18.0;
        let (cx, cy) = (RIGHT + 32.0, ly);
        let _ = writeln!(
            s,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="white" stroke="black" stroke-width="2"/>"#,
            cx,
            cy - 6.0,
            cx + 6.0,
            cy,
            cx,
            cy + 6.0,
            cx - 6.0,
            cy
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">measured</text>"#,
            RIGHT + 50.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Distinct model names in first-seen order.
pub fn models(rows: &[SweepRow]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    rows.iter()
        .filter(|r| seen.insert(r.model.clone()))
        .map(|r| r.model.clone())
        .collect()
}
