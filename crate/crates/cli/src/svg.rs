//! Minimal SVG line plots: fixed 960x540 viewport, linear axes, polyline
//! series, and an inline legend. No plotting dependency; the figures are
//! static result displays.

use std::fmt::Write;

pub const WIDTH: f64 = 960.0;
pub const HEIGHT: f64 = 540.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
    /// Palette index; series sharing a color pair a solid and dashed line.
    pub color: usize,
}

#[derive(Debug, Clone)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub legend: bool,
}

fn data_range(series: &[Series], pick: fn(&(f64, f64)) -> f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for p in &s.points {
            let v = pick(p);
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{v:.2e}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

// Renders one panel into the rectangle (x0, y0, w, h) of the document.
fn render_panel(out: &mut String, plot: &LinePlot, x0: f64, y0: f64, w: f64, h: f64) {
    let margin_l = 62.0;
    let margin_r = 12.0;
    let margin_t = 28.0;
    let margin_b = 40.0;
    let px0 = x0 + margin_l;
    let py0 = y0 + margin_t;
    let pw = w - margin_l - margin_r;
    let ph = h - margin_t - margin_b;

    let (xlo, xhi) = data_range(&plot.series, |p| p.0);
    let (ylo, yhi) = data_range(&plot.series, |p| p.1);
    let sx = |v: f64| px0 + (v - xlo) / (xhi - xlo) * pw;
    let sy = |v: f64| py0 + ph - (v - ylo) / (yhi - ylo) * ph;

    let _ = write!(
        out,
        r##"<rect x="{px0:.1}" y="{py0:.1}" width="{pw:.1}" height="{ph:.1}" fill="white" stroke="#444" stroke-width="1"/>"##
    );
    let _ = write!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13" font-family="sans-serif">{}</text>"#,
        x0 + w / 2.0,
        y0 + 18.0,
        escape(&plot.title)
    );

    // 5 ticks per axis with light grid lines.
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = xlo + f * (xhi - xlo);
        let yv = ylo + f * (yhi - ylo);
        let gx = sx(xv);
        let gy = sy(yv);
        let _ = write!(
            out,
            r##"<line x1="{gx:.1}" y1="{py0:.1}" x2="{gx:.1}" y2="{:.1}" stroke="#ddd" stroke-width="0.5"/>"##,
            py0 + ph
        );
        let _ = write!(
            out,
            r##"<line x1="{px0:.1}" y1="{gy:.1}" x2="{:.1}" y2="{gy:.1}" stroke="#ddd" stroke-width="0.5"/>"##,
            px0 + pw
        );
        let _ = write!(
            out,
            r#"<text x="{gx:.1}" y="{:.1}" text-anchor="middle" font-size="10" font-family="sans-serif">{}</text>"#,
            py0 + ph + 14.0,
            tick_label(xv)
        );
        let _ = write!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10" font-family="sans-serif">{}</text>"#,
            px0 - 4.0,
            gy + 3.5,
            tick_label(yv)
        );
    }
    let _ = write!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11" font-family="sans-serif">{}</text>"#,
        px0 + pw / 2.0,
        y0 + h - 8.0,
        escape(&plot.x_label)
    );
    let _ = write!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11" font-family="sans-serif" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        x0 + 14.0,
        py0 + ph / 2.0,
        x0 + 14.0,
        py0 + ph / 2.0,
        escape(&plot.y_label)
    );

    for s in &plot.series {
        let color = PALETTE[s.color % PALETTE.len()];
        let mut path = String::new();
        let mut pen_down = false;
        for &(x, y) in &s.points {
            if !(x.is_finite() && y.is_finite()) {
                pen_down = false;
                continue;
            }
            let _ = write!(
                path,
                "{}{:.2},{:.2} ",
                if pen_down { "L" } else { "M" },
                sx(x),
                sy(y)
            );
            pen_down = true;
        }
        let dash = if s.dashed {
            r#" stroke-dasharray="5,4""#
        } else {
            ""
        };
        let _ = write!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.4"{dash}/>"#,
            path.trim_end()
        );
    }

    if plot.legend {
        let shown: Vec<&Series> = plot.series.iter().filter(|s| !s.label.is_empty()).collect();
        let lh = 15.0;
        let lw = 150.0;
        let lx = px0 + pw - lw - 6.0;
        let ly = py0 + 6.0;
        let _ = write!(
            out,
            r##"<rect x="{lx:.1}" y="{ly:.1}" width="{lw:.1}" height="{:.1}" fill="white" fill-opacity="0.85" stroke="#999" stroke-width="0.5"/>"##,
            lh * shown.len() as f64 + 8.0
        );
        for (k, s) in shown.iter().enumerate() {
            let color = PALETTE[s.color % PALETTE.len()];
            let yy = ly + 12.0 + lh * k as f64;
            let dash = if s.dashed {
                r#" stroke-dasharray="5,4""#
            } else {
                ""
            };
            let _ = write!(
                out,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="1.6"{dash}/>"#,
                lx + 6.0,
                yy - 3.5,
                lx + 28.0,
                yy - 3.5
            );
            let _ = write!(
                out,
                r#"<text x="{:.1}" y="{yy:.1}" font-size="10" font-family="sans-serif">{}</text>"#,
                lx + 33.0,
                escape(&s.label)
            );
        }
    }
}

fn document(body: &str) -> String {
    format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" "#,
            r#"viewBox="0 0 {w} {h}">"#,
            r#"<rect width="{w}" height="{h}" fill="white"/>{body}</svg>"#,
            "\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        body = body
    )
}

/// Renders one plot filling the 960x540 viewport.
pub fn render(plot: &LinePlot) -> String {
    let mut body = String::new();
    render_panel(&mut body, plot, 0.0, 0.0, WIDTH, HEIGHT);
    document(&body)
}

/// Renders several panels in a grid inside the fixed viewport.
pub fn render_grid(plots: &[LinePlot]) -> String {
    let n = plots.len().max(1);
    let cols = if n <= 1 {
        1
    } else if n <= 4 {
        2
    } else {
        3
    };
    let rows = n.div_ceil(cols);
    let pw = WIDTH / cols as f64;
    let ph = HEIGHT / rows as f64;
    let mut body = String::new();
    for (k, plot) in plots.iter().enumerate() {
        let col = k % cols;
        let row = k / cols;
        render_panel(&mut body, plot, col as f64 * pw, row as f64 * ph, pw, ph);
    }
    document(&body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_plot() -> LinePlot {
        LinePlot {
            title: "demo".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "curve".into(),
                points: (0..50).map(|k| (k as f64, (k as f64 * 0.3).sin())).collect(),
                dashed: false,
                color: 0,
            }],
            legend: true,
        }
    }

    #[test]
    fn render_produces_fixed_viewport_svg() {
        let svg = render(&sample_plot());
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"viewBox="0 0 960 540""#));
        assert!(svg.contains("<path"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn render_grid_places_all_panels() {
        let plots = vec![sample_plot(), sample_plot(), sample_plot(), sample_plot()];
        let svg = render_grid(&plots);
        assert_eq!(svg.matches("demo").count(), 4);
    }

    #[test]
    fn non_finite_points_break_the_path() {
        let mut plot = sample_plot();
        plot.series[0].points[10].1 = f64::NAN;
        let svg = render(&plot);
        // The path restarts after the NaN sample: two moveto commands.
        assert_eq!(svg.matches('M').count(), 2);
    }
}
