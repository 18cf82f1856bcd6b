//! Log-log convergence chart rendered as a standalone SVG.

use std::fmt::Write as _;
use std::path::Path;

use crate::csvio::{read_scores_csv, write_file, ScoreRow};
use crate::error::Result;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 64.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    points: Vec<(f64, f64)>, // (log10 T, log10 value)
}

/// Renders `l1_score` and `l2_dist_C` against `T` on log-log axes.
pub fn emit_plot(scores: &Path, out: &Path) -> Result<()> {
    let rows = read_scores_csv(scores)?;
    let svg = render_svg(&rows);
    write_file(out, &svg)
}

fn collect(rows: &[ScoreRow], pick: impl Fn(&ScoreRow) -> f64) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|r| {
            let v = pick(r);
            // Log axes can only carry positive finite values.
            if r.rounds > 0 && v > 0.0 && v.is_finite() {
                Some(((r.rounds as f64).log10(), v.log10()))
            } else {
                None
            }
        })
        .collect()
}

pub fn render_svg(rows: &[ScoreRow]) -> String {
    let series = [
        Series {
            label: "l1_score",
            color: "#1f77b4",
            points: collect(rows, |r| r.l1),
        },
        Series {
            label: "l2_dist_C",
            color: "#d62728",
            points: collect(rows, |r| r.l2_distance),
        },
    ];

    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (x_lo, x_hi) = padded_range(all.iter().map(|p| p.0));
    let (y_lo, y_hi) = padded_range(all.iter().map(|p| p.1));

    let x_of = |lx: f64| {
        MARGIN_LEFT + (lx - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    };
    let y_of = |ly: f64| {
        HEIGHT - MARGIN_BOTTOM - (ly - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );

    // Frame.
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{}\" height=\"{}\" \
         fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>",
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    );

    // Decade gridlines and tick labels.
    for d in (x_lo.floor() as i64)..=(x_hi.ceil() as i64) {
        let lx = d as f64;
        if lx < x_lo || lx > x_hi {
            continue;
        }
        let x = x_of(lx);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{MARGIN_TOP}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
             stroke=\"#ddd\" stroke-width=\"1\"/>",
            HEIGHT - MARGIN_BOTTOM
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">1e{d}</text>",
            HEIGHT - MARGIN_BOTTOM + 18.0
        );
    }
    for d in (y_lo.floor() as i64)..=(y_hi.ceil() as i64) {
        let ly = d as f64;
        if ly < y_lo || ly > y_hi {
            continue;
        }
        let y = y_of(ly);
        let _ = writeln!(
            svg,
            "<line x1=\"{MARGIN_LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"#ddd\" stroke-width=\"1\"/>",
            WIDTH - MARGIN_RIGHT
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" \
             font-family=\"sans-serif\">1e{d}</text>",
            MARGIN_LEFT - 8.0,
            y + 4.0
        );
    }

    // Axis labels.
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" \
         font-family=\"sans-serif\">rounds T</text>",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"20\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" \
         font-family=\"sans-serif\" transform=\"rotate(-90 20 {:.2})\">score</text>",
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0
    );

    // Series.
    for s in &series {
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|(lx, ly)| format!("{:.2},{:.2}", x_of(*lx), y_of(*ly)))
                .collect();
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
                path.join(" "),
                s.color
            );
        }
        for (lx, ly) in &s.points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\"/>",
                x_of(*lx),
                y_of(*ly),
                s.color
            );
        }
    }

    // Legend.
    let mut ly = MARGIN_TOP + 16.0;
    for s in &series {
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" \
             stroke-width=\"2\"/>",
            WIDTH - MARGIN_RIGHT - 140.0,
            WIDTH - MARGIN_RIGHT - 116.0,
            s.color
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>",
            WIDTH - MARGIN_RIGHT - 110.0,
            ly + 4.0,
            s.label
        );
        ly += 18.0;
    }

    if all.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">no positive data points</text>",
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
    }

    svg.push_str("</svg>\n");
    svg
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        // Single point: open up one decade around it.
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}
