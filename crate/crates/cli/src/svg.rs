//! Static SVG boxplot: one box per strategy spanning the quartiles, a median
//! bar, whiskers to the extremes, and a red horizontal line at the true value.

use std::fmt::Write as _;

use dpimpute::simulation::SimSummary;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

/// Tick positions at a 1/2/5 × 10^k step covering `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::EPSILON);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn boxplot_svg(summary: &SimSummary) -> String {
    let stats: Vec<_> = summary
        .strategies
        .iter()
        .map(|s| (s.strategy, s.stats))
        .collect();
    let mut lo = summary.true_mean;
    let mut hi = summary.true_mean;
    for (_, st) in &stats {
        if let Some(st) = st {
            lo = lo.min(st.min);
            hi = hi.max(st.max);
        }
    }
    let pad = 0.05 * (hi - lo).max(1e-6);
    let (lo, hi) = (lo - pad, hi + pad);
    let plot_h = HEIGHT - TOP - BOTTOM;
    let plot_w = WIDTH - LEFT - RIGHT;
    let y_of = |v: f64| TOP + (hi - v) / (hi - lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    // Axis and ticks.
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        TOP + plot_h
    );
    for t in nice_ticks(lo, hi, 6) {
        let y = y_of(t);
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let slot = plot_w / stats.len().max(1) as f64;
    for (k, (strategy, st)) in stats.iter().enumerate() {
        let cx = LEFT + slot * (k as f64 + 0.5);
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{strategy}</text>"#,
            HEIGHT - BOTTOM + 20.0
        );
        let Some(st) = st else { continue };
        let half = (slot * 0.3).min(60.0);
        let (ymin, yq1, ymed, yq3, ymax) = (y_of(st.min), y_of(st.q1), y_of(st.median), y_of(st.q3), y_of(st.max));
        let _ = writeln!(
            out,
            r#"<line x1="{cx:.2}" y1="{ymax:.2}" x2="{cx:.2}" y2="{yq3:.2}" stroke="black"/><line x1="{cx:.2}" y1="{yq1:.2}" x2="{cx:.2}" y2="{ymin:.2}" stroke="black"/>"#
        );
        for yw in [ymin, ymax] {
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{yw:.2}" x2="{:.2}" y2="{yw:.2}" stroke="black"/>"#,
                cx - half / 2.0,
                cx + half / 2.0
            );
        }
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{yq3:.2}" width="{:.2}" height="{:.2}" fill="#cfe0f3" stroke="black"/>"##,
            cx - half,
            2.0 * half,
            (yq1 - yq3).max(0.5)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ymed:.2}" x2="{:.2}" y2="{ymed:.2}" stroke="black" stroke-width="2"/>"#,
            cx - half,
            cx + half
        );
    }
    let yt = y_of(summary.true_mean);
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{yt:.2}" x2="{}" y2="{yt:.2}" stroke="red" stroke-width="1.5"/>"#,
        WIDTH - RIGHT
    );
    out.push_str("</svg>\n");
    out
}
