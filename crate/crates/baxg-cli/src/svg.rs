//! Minimal static SVG charts: merit (log scale) against oracle accesses.

use crate::csvio::CsvSeries;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Render the chart for a set of trace series and write it to a file.
pub fn emit_svg(series: &[CsvSeries], title: &str, path: &Path) -> io::Result<()> {
    std::fs::write(path, render_chart(series, title))
}

/// Render a log-y line chart of merit versus extended-oracle accesses, one
/// polyline per series. Nonpositive merits are clamped to the smallest
/// positive value present so the log axis stays defined.
pub fn render_chart(series: &[CsvSeries], title: &str) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let mut x_max = 1.0f64;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(oracle, merit) in &s.points {
            x_max = x_max.max(oracle as f64);
            if merit > 0.0 {
                y_min = y_min.min(merit);
                y_max = y_max.max(merit);
            }
        }
    }
    if !y_min.is_finite() {
        y_min = 1e-12;
        y_max = 1.0;
    }
    if y_min == y_max {
        y_min /= 10.0;
        y_max *= 10.0;
    }
    let ly_min = y_min.log10().floor();
    let ly_max = y_max.log10().ceil();

    let x_of = |oracle: f64| MARGIN_LEFT + plot_w * oracle / x_max;
    let y_of = |merit: f64| {
        let clamped = merit.max(y_min);
        MARGIN_TOP + plot_h * (ly_max - clamped.log10()) / (ly_max - ly_min)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"black\"/>",
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{x0}\" y1=\"{}\" x2=\"{x0}\" y2=\"{y0}\" stroke=\"black\"/>",
        MARGIN_TOP
    );

    // Decade gridlines and y tick labels.
    let mut decade = ly_min as i64;
    while decade <= ly_max as i64 {
        let y = y_of(10f64.powi(decade as i32));
        let _ = writeln!(
            svg,
            "<line x1=\"{x0}\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>",
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{}</text>",
            x0 - 6.0,
            y + 4.0,
            decade
        );
        decade += 1;
    }
    // x tick labels.
    for tick in 0..=4 {
        let oracle = x_max * tick as f64 / 4.0;
        let x = x_of(oracle);
        let _ = writeln!(
            svg,
            "<text x=\"{x:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.0}</text>",
            y0 + 18.0,
            oracle
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">extended first-order oracle accesses</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">merit</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // Series.
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for &(oracle, merit) in &s.points {
            let _ = write!(path, "{:.1},{:.1} ", x_of(oracle as f64), y_of(merit));
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\" points=\"{}\"/>",
            path.trim_end()
        );
        let legend_y = MARGIN_TOP + 16.0 * i as f64 + 8.0;
        let legend_x = MARGIN_LEFT + plot_w - 180.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{legend_x}\" y1=\"{legend_y}\" x2=\"{}\" y2=\"{legend_y}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            legend_x + 22.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            legend_x + 28.0,
            legend_y + 4.0,
            escape(&format!("{} ({})", s.label.algorithm, s.label.problem))
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
