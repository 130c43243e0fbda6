//! Minimal SVG rendering of sweep summaries: one mean-accuracy curve per
//! method over the outlier-fraction grid, with ±1 standard deviation bars.
//! Cells whose mean is NaN (no scored trials) are skipped.

use subseg_core::{Method, SummaryRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 56.0;

struct Scale {
    x_min: f64,
    x_span: f64,
}

impl Scale {
    fn new(fractions: &[f64]) -> Self {
        let x_min = fractions.iter().copied().fold(f64::INFINITY, f64::min);
        let x_max = fractions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Scale {
            x_min,
            x_span: (x_max - x_min).max(1e-12),
        }
    }

    fn x(&self, fraction: f64) -> f64 {
        LEFT + (fraction - self.x_min) / self.x_span * (WIDTH - LEFT - RIGHT)
    }

    /// Accuracy axis is fixed to [0, 1.05] so curves from different sweeps
    /// are comparable at a glance.
    fn y(&self, accuracy: f64) -> f64 {
        let t = accuracy / 1.05;
        HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
    }
}

fn method_color(method: Method) -> &'static str {
    match method {
        Method::Lrr => "#d95f02",
        Method::Rsi => "#1b9e77",
    }
}

pub fn render_sweep(summary: &[SummaryRow]) -> String {
    let mut fractions: Vec<f64> = summary.iter().map(|r| r.fraction).collect();
    fractions.sort_by(|a, b| a.partial_cmp(b).expect("finite fractions"));
    fractions.dedup();
    let scale = Scale::new(&fractions);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // Axes and gridlines.
    for i in 0..=5 {
        let acc = i as f64 * 0.2;
        let y = scale.y(acc);
        svg.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            WIDTH - RIGHT
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{acc:.1}</text>\n",
            LEFT - 8.0,
            y + 4.0
        ));
    }
    for &f in &fractions {
        let x = scale.x(f);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
             stroke=\"#000000\" stroke-width=\"1\"/>\n",
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{f}</text>\n",
            HEIGHT - BOTTOM + 20.0
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        HEIGHT - BOTTOM
    ));
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        HEIGHT - BOTTOM,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">outlier fraction</text>\n",
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.2})\">mean segmentation accuracy</text>\n",
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0
    ));

    for method in [Method::Lrr, Method::Rsi] {
        let color = method_color(method);
        let points: Vec<&SummaryRow> = summary
            .iter()
            .filter(|r| r.method == method && r.mean.is_finite())
            .collect();

        // Error bars first so the curve draws over them.
        for r in &points {
            if !r.std.is_finite() {
                continue;
            }
            let x = scale.x(r.fraction);
            let (y_lo, y_hi) = (
                scale.y((r.mean - r.std).max(0.0)),
                scale.y((r.mean + r.std).min(1.05)),
            );
            svg.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{y_lo:.2}\" x2=\"{x:.2}\" y2=\"{y_hi:.2}\" \
                 stroke=\"{color}\" stroke-width=\"1.5\" opacity=\"0.6\"/>\n"
            ));
        }
        let path: Vec<String> = points
            .iter()
            .map(|r| format!("{:.2},{:.2}", scale.x(r.fraction), scale.y(r.mean)))
            .collect();
        if path.len() > 1 {
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                path.join(" ")
            ));
        }
        for r in &points {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{color}\"/>\n",
                scale.x(r.fraction),
                scale.y(r.mean)
            ));
        }
    }

    // Legend.
    for (i, method) in [Method::Lrr, Method::Rsi].into_iter().enumerate() {
        let y = TOP + 16.0 + i as f64 * 20.0;
        let x = WIDTH - RIGHT - 110.0;
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"{}\" stroke-width=\"2\"/>\n",
            x + 28.0,
            method_color(method)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\">{method}</text>\n",
            x + 36.0,
            y + 4.0
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
